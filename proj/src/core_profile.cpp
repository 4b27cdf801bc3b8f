#include "spiralwave/core_profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "spiralwave/types.hpp"

namespace spiralwave {
namespace {

struct Residual {
    Eigen::ArrayXd value;
    double interior_max = 0;
};

Residual ode_residual(const Eigen::ArrayXd& r, const Eigen::ArrayXd& f, double h) {
    const Eigen::Index n = r.size();
    Residual res;
    res.value = Eigen::ArrayXd::Zero(n);
    res.value[0] = f[0];
    for (Eigen::Index i = 1; i < n - 1; ++i) {
        const double ri = r[i];
        res.value[i] = (f[i + 1] - 2 * f[i] + f[i - 1]) / (h * h) + (f[i + 1] - f[i - 1]) / (2 * h * ri) -
                       f[i] / (ri * ri) + (1 - f[i] * f[i]) * f[i];
        res.interior_max = std::max(res.interior_max, std::abs(res.value[i]));
    }
    const double R = r[n - 1];
    res.value[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h) - 2 * (1 - f[n - 1]) / R;
    return res;
}

// Newton step for the banded system: tridiagonal interior rows plus a last
// row with three entries (one-sided derivative), reduced to tridiagonal form.
Eigen::ArrayXd newton_update(const Eigen::ArrayXd& r, const Eigen::ArrayXd& f, double h, const Eigen::ArrayXd& F) {
    const Eigen::Index n = r.size();
    std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0), rhs(n, 0.0);
    di[0] = 1;
    rhs[0] = -F[0];
    for (Eigen::Index i = 1; i < n - 1; ++i) {
        const double ri = r[i];
        lo[i] = 1 / (h * h) - 1 / (2 * h * ri);
        di[i] = -2 / (h * h) - 1 / (ri * ri) + 1 - 3 * f[i] * f[i];
        up[i] = 1 / (h * h) + 1 / (2 * h * ri);
        rhs[i] = -F[i];
    }
    const double R = r[n - 1];
    double a = 3 / (2 * h) + 2 / R, b = -4 / (2 * h), c = 1 / (2 * h);
    double rl = -F[n - 1];
    const double scale = c / lo[n - 2];
    b -= scale * di[n - 2];
    a -= scale * up[n - 2];
    rl -= scale * rhs[n - 2];
    lo[n - 1] = b;
    di[n - 1] = a;
    rhs[n - 1] = rl;

    for (Eigen::Index i = 1; i < n; ++i) {
        const double w = lo[i] / di[i - 1];
        di[i] -= w * up[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    Eigen::ArrayXd d(n);
    d[n - 1] = rhs[n - 1] / di[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) d[i] = (rhs[i] - up[i] * d[i + 1]) / di[i];
    return d;
}

// Cumulative trapezoid with the first Gregory end correction, fourth order.
Eigen::ArrayXd cumulative_integral(const Eigen::ArrayXd& g, double h) {
    const Eigen::Index n = g.size();
    Eigen::ArrayXd trap(n), dg(n);
    trap[0] = 0;
    for (Eigen::Index i = 1; i < n; ++i) trap[i] = trap[i - 1] + 0.5 * h * (g[i] + g[i - 1]);
    dg[0] = (-3 * g[0] + 4 * g[1] - g[2]) / (2 * h);
    for (Eigen::Index i = 1; i < n - 1; ++i) dg[i] = (g[i + 1] - g[i - 1]) / (2 * h);
    dg[n - 1] = (3 * g[n - 1] - 4 * g[n - 2] + g[n - 3]) / (2 * h);
    return trap - h * h / 12.0 * (dg - dg[0]);
}

double cubic_at(const Eigen::ArrayXd& r, const Eigen::ArrayXd& v, double x) {
    const Eigen::Index n = r.size();
    const double h = r[1] - r[0];
    Eigen::Index i = static_cast<Eigen::Index>(std::floor(x / h));
    i = std::clamp<Eigen::Index>(i - 1, 0, n - 4);
    double s = 0;
    for (int a = 0; a < 4; ++a) {
        double w = 1;
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (x - r[i + b]) / (r[i + a] - r[i + b]);
        s += w * v[i + a];
    }
    return s;
}

void check_radius(const CoreProfile& p, double r) {
    if (!(r > 0) || r > p.r_max() * (1 + 1e-12)) {
        std::ostringstream os;
        os << "radius " << r << " outside profile range (0, " << p.r_max() << "]";
        throw ValidationError(os.str());
    }
}

}  // namespace

CoreProfile solve_core_amplitude(double r_max, int n_nodes) {
    if (r_max < 20) throw ValidationError("r_max must be at least 20 to fit the far-field tail");
    if (n_nodes < 2000) throw ValidationError("n_nodes must be at least 2000");

    CoreProfile p;
    p.r_nodes = Eigen::ArrayXd::LinSpaced(n_nodes, 0.0, r_max);
    const double h = p.spacing();
    Eigen::ArrayXd f = (0.58 * p.r_nodes).tanh();

    Residual res;
    int it = 0;
    for (; it < 60; ++it) {
        res = ode_residual(p.r_nodes, f, h);
        const Eigen::ArrayXd d = newton_update(p.r_nodes, f, h, res.value);
        f += d;
        if (d.abs().maxCoeff() < 1e-14) break;
    }
    res = ode_residual(p.r_nodes, f, h);
    if (res.interior_max > 1e-8 || !f.allFinite()) {
        std::ostringstream os;
        os << "core profile Newton iteration did not converge, residual " << res.interior_max;
        throw NumericalError(os.str());
    }

    p.f_values = f;
    p.residual = res.interior_max;
    p.newton_iterations = it + 1;
    p.slope_at_zero = (8 * f[1] - f[2]) / (6 * h);
    p.far_field_coeff = r_max * r_max * (1 - f[n_nodes - 1]);
    const Eigen::ArrayXd f2 = f.square();
    p.phase_integral = cumulative_integral(f2 * (1 - f2) * p.r_nodes, h);
    p.c1 = compute_c1(p);
    return p;
}

double c1_partial(const CoreProfile& profile, double r) {
    check_radius(profile, r);
    return cubic_at(profile.r_nodes, profile.phase_integral, r) - std::log(r);
}

double compute_c1(const CoreProfile& profile) {
    const double R = profile.r_max();
    if (R < 40) throw ValidationError("c1 needs a profile with r_max >= 40");
    const double full = c1_partial(profile, R);
    const double half = c1_partial(profile, R / 2);
    if (std::abs(full - half) > 1e-3) {
        std::ostringstream os;
        os << "c1 tail not converged: " << half << " at r=" << R / 2 << " vs " << full << " at r=" << R;
        throw NumericalError(os.str());
    }
    return (4 * full - half) / 3;
}

double core_amplitude_at(const CoreProfile& profile, double r) {
    if (r <= 0) return 0;
    if (r >= profile.r_max()) return 1 - profile.far_field_coeff / (r * r);
    return cubic_at(profile.r_nodes, profile.f_values, r);
}

double phase_gradient_correction(const CoreProfile& profile, double r) {
    check_radius(profile, r);
    if (r < profile.spacing()) return -r / 4;
    const double f = core_amplitude_at(profile, r);
    return -cubic_at(profile.r_nodes, profile.phase_integral, r) / (r * f * f);
}

const CoreProfile& default_core_profile() {
    static const CoreProfile profile = solve_core_amplitude();
    return profile;
}

}  // namespace spiralwave
