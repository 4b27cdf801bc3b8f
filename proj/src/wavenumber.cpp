#include "spiralwave/wavenumber.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

namespace spiralwave {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::canonical:
            return "canonical";
        case Regime::near_field:
            return "near_field";
        case Regime::uniform:
            return "uniform";
    }
    return "?";
}

void SpiralConfigurationParams::validate() const {
    if (!(q > 0 && q < 1)) throw ValidationError("q must lie in (0,1)");
    for (std::size_t i = 0; i < spirals.size(); ++i) {
        const auto& s = spirals[i];
        if (std::abs(s.winding) != 1) throw ValidationError("winding numbers must be +1 or -1");
        if (!s.position.allFinite() || dom.wall_distance(s.position) < kMinSeparation) {
            std::ostringstream os;
            os << "spiral " << i + 1 << " at (" << s.position.x() << "," << s.position.y() << ") is closer than "
               << kMinSeparation << " to a wall or outside the domain";
            throw ValidationError(os.str());
        }
        for (std::size_t j = 0; j < i; ++j)
            if ((s.position - spirals[j].position).norm() <= 2.0) {
                std::ostringstream os;
                os << "spirals " << j + 1 << " and " << i + 1 << " are closer than two core radii";
                throw ValidationError(os.str());
            }
    }
}

Eigen::MatrixXd beta_matrix(const SpiralConfigurationParams& cfg, double k) {
    if (!(k > 0)) throw ValidationError("beta_matrix needs k > 0");
    const double two_pi = 2 * std::numbers::pi;
    const double kappa = cfg.q * k;
    const auto n = static_cast<Eigen::Index>(cfg.spirals.size());
    Eigen::MatrixXd M(n, n);
    const double diag_shift = cfg.c1 - std::numbers::pi / (2 * cfg.q);
    for (Eigen::Index l = 0; l < n; ++l) {
        const Vec2& xl = cfg.spirals[l].position;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Vec2& xj = cfg.spirals[j].position;
            if (l == j)
                M(l, l) = two_pi * mh_neumann_reg(xl, xl, kappa, cfg.dom, cfg.trunc).value - diag_shift;
            else
                M(l, j) = two_pi * mh_neumann_value(xl, xj, kappa, cfg.dom, cfg.trunc);
        }
    }
    return M;
}

namespace {

double det_at(const SpiralConfigurationParams& cfg, double k) {
    const Eigen::MatrixXd M = beta_matrix(cfg, k);
    if (M.rows() == 1) return M(0, 0);
    return M.partialPivLu().determinant();
}

double refine_root(const SpiralConfigurationParams& cfg, double k_lo, double k_hi, double d_lo, double d_hi) {
    auto f = [&](double logk) { return det_at(cfg, std::exp(logk)); };
    boost::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    auto r = boost::math::tools::toms748_solve(f, std::log(k_lo), std::log(k_hi), d_lo, d_hi, tol, iters);
    return std::exp(0.5 * (r.first + r.second));
}

WavenumberSolution finish(const SpiralConfigurationParams& cfg, double k) {
    WavenumberSolution sol;
    sol.k = k;
    sol.regime = Regime::canonical;
    const Eigen::MatrixXd M = beta_matrix(cfg, k);
    const auto n = M.rows();
    // Scale by the magnitudes of the summands, so a cancelling diagonal still counts.
    const double shift = std::abs(cfg.c1 - std::numbers::pi / (2 * cfg.q));
    Eigen::MatrixXd mag = M.cwiseAbs();
    for (Eigen::Index i = 0; i < n; ++i)
        mag(i, i) = std::abs(M(i, i) - (cfg.c1 - std::numbers::pi / (2 * cfg.q))) + shift;
    double rownorm = 1;
    for (Eigen::Index i = 0; i < n; ++i) rownorm *= mag.row(i).norm();
    const double det = n == 1 ? M(0, 0) : M.partialPivLu().determinant();
    sol.residual = std::abs(det) / rownorm;
    if (n == 1) {
        sol.beta = Eigen::VectorXd::Ones(1);
        return sol;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(n - 2) < 1e-8 * sv(0)) throw NumericalError("null space of the beta system has dimension > 1");
    Eigen::VectorXd b = svd.matrixV().col(n - 1);
    Eigen::Index imax;
    b.cwiseAbs().maxCoeff(&imax);
    b /= b(imax);
    if (b(0) < 0) b = -b;
    sol.beta = b;
    return sol;
}

bool positive_weights(const WavenumberSolution& sol) { return (sol.beta.array() > 0).all(); }

}  // namespace

WavenumberSolution solve_canonical(const SpiralConfigurationParams& cfg, const CanonicalScan& scan) {
    cfg.validate();
    if (cfg.spirals.empty()) throw ValidationError("canonical wavenumber needs at least one spiral");
    const double k_hi = scan.k_hi_times_q / cfg.q;
    const double a = std::log(scan.k_lo), b = std::log(k_hi);
    std::vector<double> ks(scan.points), dets(scan.points);
    std::vector<std::pair<double, double>> changes;
    for (int i = 0; i < scan.points; ++i) {
        ks[i] = std::exp(a + (b - a) * i / (scan.points - 1));
        dets[i] = det_at(cfg, ks[i]);
        if (i > 0 && (dets[i - 1] < 0) != (dets[i] < 0)) changes.emplace_back(ks[i - 1], ks[i]);
    }
    if (changes.empty()) {
        std::ostringstream os;
        os << "no sign change of det M(k) on [" << scan.k_lo << ", " << k_hi << "]; det profile:";
        for (int i = 0; i < scan.points; i += std::max(1, scan.points / 20))
            os << " (" << ks[i] << ", " << dets[i] << ")";
        throw NumericalError(os.str());
    }
    // The far-field amplitude -2 pi sum beta_j G(x; x_j) must stay positive, so
    // roots whose weights change sign are skipped.
    for (const auto& [lo, hi] : changes) {
        const auto ilo = static_cast<std::size_t>(std::lower_bound(ks.begin(), ks.end(), lo) - ks.begin());
        const double k = dets[ilo] == 0 ? lo : refine_root(cfg, lo, hi, dets[ilo], dets[ilo + 1]);
        WavenumberSolution sol = finish(cfg, k);
        if (!positive_weights(sol)) continue;
        sol.sign_changes = std::move(changes);
        return sol;
    }
    throw NumericalError("every root of det M(k) in the scan has weights of mixed sign");
}

WavenumberSolution solve_canonical_near(const SpiralConfigurationParams& cfg, double k_guess,
                                        const CanonicalScan& scan) {
    cfg.validate();
    if (!(k_guess > 0)) return solve_canonical(cfg, scan);
    auto accept = [&](double k) -> std::optional<WavenumberSolution> {
        WavenumberSolution sol = finish(cfg, k);
        if (positive_weights(sol)) return sol;
        return std::nullopt;
    };
    double d0 = det_at(cfg, k_guess);
    if (d0 == 0) {
        if (auto sol = accept(k_guess)) return *sol;
        return solve_canonical(cfg, scan);
    }
    for (double rel = 1e-5; rel < 0.3; rel *= 4) {
        const double kl = k_guess * (1 - rel), kh = k_guess * (1 + rel);
        const double dl = det_at(cfg, kl);
        if ((dl < 0) != (d0 < 0)) {
            if (auto sol = accept(refine_root(cfg, kl, k_guess, dl, d0))) return *sol;
            break;
        }
        const double dh = det_at(cfg, kh);
        if ((dh < 0) != (d0 < 0)) {
            if (auto sol = accept(refine_root(cfg, k_guess, kh, d0, dh))) return *sol;
            break;
        }
    }
    return solve_canonical(cfg, scan);
}

double two_spiral_k_residual(const SpiralConfigurationParams& cfg, double k) {
    if (cfg.spirals.size() != 2) throw ValidationError("two_spiral_k_residual needs exactly two spirals");
    const double two_pi = 2 * std::numbers::pi;
    const double kappa = cfg.q * k;
    const Vec2& x1 = cfg.spirals[0].position;
    const Vec2& x2 = cfg.spirals[1].position;
    const double shift = cfg.c1 - std::numbers::pi / (2 * cfg.q);
    const double a1 = -two_pi * mh_neumann_reg(x1, x1, kappa, cfg.dom, cfg.trunc).value + shift;
    const double a2 = -two_pi * mh_neumann_reg(x2, x2, kappa, cfg.dom, cfg.trunc).value + shift;
    const double g21 = mh_neumann_value(x2, x1, kappa, cfg.dom, cfg.trunc);
    const double g12 = mh_neumann_value(x1, x2, kappa, cfg.dom, cfg.trunc);
    return a1 * a2 - two_pi * two_pi * g21 * g12;
}

double near_field_k(int n_spirals, double q, double eps, double area) {
    if (n_spirals < 0) throw ValidationError("spiral count must be non-negative");
    if (!(eps > 0 && eps < 1)) throw ValidationError("eps must lie in (0,1)");
    if (!(area > 0)) throw ValidationError("area must be positive");
    const double theta = q * std::log(1 / eps);
    if (!(theta > 0)) throw ValidationError("near-field wavenumber needs q log(1/eps) > 0");
    if (theta >= std::numbers::pi / 2)
        throw ValidationError("q log(1/eps) >= pi/2: near-field wavenumber undefined, use the canonical regime");
    return std::sqrt(2 * std::numbers::pi * n_spirals * std::tan(theta) / (q * area));
}

double uniform_k(const SpiralConfigurationParams& cfg, double eps, double k_canonical) {
    if (!(eps > 0 && eps < 1)) throw ValidationError("eps must lie in (0,1)");
    const double theta = cfg.q * std::log(1 / eps);
    if (theta >= std::numbers::pi / 2) throw ValidationError("q log(1/eps) >= pi/2 in uniform wavenumber");
    const double n = static_cast<double>(cfg.spirals.size());
    const double c = 2 * std::numbers::pi * n / (cfg.q * cfg.dom.area());
    double k2 = k_canonical * k_canonical + c * std::tan(theta) - c / (std::numbers::pi / 2 - theta);
    if (k2 < 0) {
        if (k2 > -1e-12) return 0;
        std::ostringstream os;
        os << "uniform k^2 = " << k2 << " is negative: regime mismatch";
        throw NumericalError(os.str());
    }
    return std::sqrt(k2);
}

double uniform_k(const SpiralConfigurationParams& cfg, double eps) {
    if (cfg.spirals.empty()) return 0;
    return uniform_k(cfg, eps, solve_canonical(cfg).k);
}

}  // namespace spiralwave
