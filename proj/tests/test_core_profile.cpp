#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spiralwave/core_profile.hpp"

using namespace spiralwave;

namespace {

// Independent shooting solve: bisect the slope a in f ~ a r so that the
// solution neither overshoots 1 nor turns back down, then integrate the
// converged solution to r_end.
struct Shot {
    double slope;
    double c1;
};

// Returns +1 on overshoot, -1 on turning down, 0 if undecided by r_stop.
int shoot_once(double a, double r_stop, double r_int, double& integral) {
    auto rhs = [](double r, double f, double g) { return -g / r + f / (r * r) - (1 - f * f) * f; };
    const double h = 1e-3;
    // Series start: f = a r - a r^3 / 8 + O(r^5).
    double r = 1e-3, f = a * r - a * r * r * r / 8, g = a - 3 * a * r * r / 8;
    integral = 0;
    for (int i = 1; r < r_stop; ++i) {
        const double f0 = f, g0 = g;
        const double k1f = g0, k1g = rhs(r, f0, g0);
        const double k2f = g0 + h / 2 * k1g, k2g = rhs(r + h / 2, f0 + h / 2 * k1f, g0 + h / 2 * k1g);
        const double k3f = g0 + h / 2 * k2g, k3g = rhs(r + h / 2, f0 + h / 2 * k2f, g0 + h / 2 * k2g);
        const double k4f = g0 + h * k3g, k4g = rhs(r + h, f0 + h * k3f, g0 + h * k3g);
        f = f0 + h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
        g = g0 + h / 6 * (k1g + 2 * k2g + 2 * k3g + k4g);
        const double r1 = 1e-3 + i * h;
        if (r1 <= r_int + 1e-12) integral += 0.5 * h * (f0 * f0 * (1 - f0 * f0) * r + f * f * (1 - f * f) * r1);
        r = r1;
        if (f > 1) return 1;
        if (g < 0) return -1;
    }
    return 0;
}

Shot shoot(double r_end) {
    double lo = 0.5, hi = 0.7, integral = 0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double a = 0.5 * (lo + hi);
        const int verdict = shoot_once(a, 40, r_end, integral);
        if (verdict > 0)
            hi = a;
        else if (verdict < 0)
            lo = a;
        else
            break;
    }
    const double a = 0.5 * (lo + hi);
    shoot_once(a, r_end, r_end, integral);
    // Tail beyond r_end from f ~ 1 - 1/(2 r^2) - 9/(8 r^4): integrand 1/s + 1/s^3.
    return {a, integral - std::log(r_end) + 1 / (2 * r_end * r_end)};
}

}  // namespace

TEST_CASE("profile satisfies the boundary conditions and is monotone") {
    const CoreProfile& p = default_core_profile();
    CHECK(p.f_values[0] == 0.0);
    for (Eigen::Index i = 1; i < p.f_values.size(); ++i) REQUIRE(p.f_values[i] > p.f_values[i - 1]);
    CHECK(p.f_values[p.f_values.size() - 1] > 0.99);
    CHECK(p.f_values[p.f_values.size() - 1] < 1.0);
    CHECK(p.slope_at_zero > 0);
    CHECK(p.residual < 1e-8);
}

TEST_CASE("slope at the origin matches the seeding constant and an independent shooting solve") {
    const CoreProfile& p = default_core_profile();
    CHECK(std::abs(p.slope_at_zero - 0.583189) < 5e-4);
    const Shot s = shoot(10.0);
    CHECK(std::abs(p.slope_at_zero - s.slope) < 2e-5);
}

TEST_CASE("c1 agrees with the shooting oracle") {
    const CoreProfile& p = default_core_profile();
    const Shot s = shoot(10.0);
    CHECK(std::abs(p.c1 - s.c1) < 5e-4);
}

TEST_CASE("integrand vanishes at the origin") {
    const CoreProfile& p = default_core_profile();
    const double f0 = p.f_values[0];
    CHECK(f0 * f0 * (1 - f0 * f0) * p.r_nodes[0] == 0.0);
    CHECK(p.phase_integral[0] == 0.0);
}

TEST_CASE("far-field coefficient is stable in r_max") {
    const CoreProfile a = solve_core_amplitude(40, 4000);
    const CoreProfile b = solve_core_amplitude(80, 8000);
    auto tail = [](const CoreProfile& p) {
        const double r = p.r_max(), f = p.f_values[p.f_values.size() - 1];
        return r * r * (1 - f);
    };
    CHECK(std::abs(tail(a) - tail(b)) / tail(b) < 1e-2);
    CHECK(std::abs(b.far_field_coeff - tail(b)) / tail(b) < 1e-2);
}

TEST_CASE("c1 converges in r_max and node count") {
    const double c50 = compute_c1(solve_core_amplitude(50, 5000));
    const double c100 = compute_c1(solve_core_amplitude(100, 10000));
    CHECK(std::abs(c50 - c100) < 1e-3);
    const double n2 = compute_c1(solve_core_amplitude(80, 2000));
    const double n4 = compute_c1(solve_core_amplitude(80, 4000));
    const double n8 = compute_c1(solve_core_amplitude(80, 8000));
    CHECK(std::abs(n2 - n8) < 1e-4);
    CHECK(std::abs(n4 - n8) < 1e-4);
}

TEST_CASE("phase gradient correction") {
    const CoreProfile& p = default_core_profile();
    CHECK(std::abs(phase_gradient_correction(p, 1e-4)) < 1e-3);
    const double R = p.r_max();
    CHECK(std::abs(phase_gradient_correction(p, R) + (std::log(R) + p.c1) / R) < 1e-2);
    const double a = phase_gradient_correction(solve_core_amplitude(80, 2000), 5.0);
    const double b = phase_gradient_correction(solve_core_amplitude(80, 4000), 5.0);
    CHECK(a < 0);
    CHECK(std::abs(a - b) < 1e-6);
    const double r0 = std::exp(-p.c1);
    for (double r = r0 + 0.05; r < R; r += 0.5) REQUIRE(phase_gradient_correction(p, r) < 0);
    CHECK_THROWS_AS(phase_gradient_correction(p, R + 1), ValidationError);
    CHECK_THROWS_AS(phase_gradient_correction(p, 0.0), ValidationError);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(solve_core_amplitude(10, 4000), ValidationError);
    CHECK_THROWS_AS(solve_core_amplitude(80, 100), ValidationError);
    CHECK_THROWS_AS(compute_c1(solve_core_amplitude(30, 3000)), ValidationError);
}
