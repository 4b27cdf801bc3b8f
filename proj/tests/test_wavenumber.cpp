#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spiralwave/core_profile.hpp"
#include "spiralwave/wavenumber.hpp"

using namespace spiralwave;

namespace {

const double kGamma = 0.57721566490153286;

SpiralConfigurationParams make(double q, SpiralList s, RectDomain dom = {200.0, 200.0}) {
    SpiralConfigurationParams p;
    p.q = q;
    p.spirals = std::move(s);
    p.dom = dom;
    p.c1 = default_core_profile().c1;
    return p;
}

}  // namespace

TEST_CASE("single centred spiral solves the scalar root condition") {
    const auto p = make(0.45, {{Vec2(100, 100), 1}});
    const WavenumberSolution s = solve_canonical(p);
    REQUIRE(s.k > 0);
    CHECK(s.beta.size() == 1);
    CHECK(s.beta(0) == 1.0);
    CHECK(s.regime == Regime::canonical);
    const double shift = p.c1 - std::numbers::pi / (2 * p.q);
    const double m11 = 2 * std::numbers::pi * mh_neumann_reg(Vec2(100, 100), Vec2(100, 100), p.q * s.k, p.dom).value;
    CHECK(std::abs(m11 - shift) < 1e-10 * std::abs(shift));
    CHECK(s.residual < 1e-10);
    CHECK(s.sign_changes.size() >= 1);
}

TEST_CASE("free-space single spiral: closed-form wavenumber") {
    for (double q : {0.3, 0.45}) {
        const auto p = make(q, {{Vec2(5000, 5000), 1}}, RectDomain(1e4, 1e4));
        const double kappa = 2 * std::exp(-kGamma) * std::exp(p.c1 - std::numbers::pi / (2 * q));
        CHECK(std::abs(q * solve_canonical(p).k - kappa) < 1e-8 * kappa);
    }
}

TEST_CASE("beta matrix is symmetric with equal diagonals for a symmetric pair") {
    const auto p = make(0.3, {{Vec2(80, 100), 1}, {Vec2(120, 100), 1}});
    const Eigen::MatrixXd M = beta_matrix(p, 0.05);
    CHECK(std::abs(M(0, 1) - M(1, 0)) < 1e-12);
    CHECK(std::abs(M(0, 0) - M(1, 1)) < 1e-12);
    const WavenumberSolution s = solve_canonical(p);
    CHECK(std::abs(s.beta(1) / s.beta(0) - 1) < 1e-12);

    const auto r = make(0.3, {{Vec2(70, 90), 1}, {Vec2(120, 110), -1}, {Vec2(150, 40), 1}});
    const Eigen::MatrixXd R = beta_matrix(r, 0.04);
    CHECK((R - R.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two spirals: expanded determinant and beta ratio") {
    const auto p = make(0.3, {{Vec2(70, 90), 1}, {Vec2(120, 110), 1}});
    const WavenumberSolution s = solve_canonical(p);
    const Eigen::MatrixXd M = beta_matrix(p, s.k);
    const double scale = std::abs(M(0, 0) * M(1, 1)) + std::abs(M(0, 1) * M(1, 0));
    CHECK(std::abs(two_spiral_k_residual(p, s.k)) < 1e-8 * scale);
    CHECK(std::abs(two_spiral_k_residual(p, 0.7 * s.k)) > 1e-3 * scale);
    // Rows of M beta = 0 give two expressions for the ratio.
    const double ratio = s.beta(1) / s.beta(0);
    CHECK(std::abs(ratio + M(0, 0) / M(0, 1)) < 1e-10);
    CHECK(std::abs(ratio + M(1, 0) / M(1, 1)) < 1e-8);
    CHECK(std::abs(s.beta.cwiseAbs().maxCoeff() - 1) < 1e-15);
    CHECK(s.beta(0) > 0);
    const double kappa = p.q * s.k;
    CHECK(std::abs(mh_neumann_value(Vec2(70, 90), Vec2(120, 110), kappa, p.dom) -
                   mh_neumann_value(Vec2(120, 110), Vec2(70, 90), kappa, p.dom)) < 1e-12);
    CHECK_THROWS_AS(two_spiral_k_residual(make(0.3, {{Vec2(70, 90), 1}}), 0.05), ValidationError);
}

TEST_CASE("continuation from a nearby root matches the full scan") {
    const auto p = make(0.3, {{Vec2(70, 90), 1}, {Vec2(120, 110), 1}});
    const double k = solve_canonical(p).k;
    auto moved = p;
    moved.spirals[0].position += Vec2(0.5, -0.3);
    const WavenumberSolution a = solve_canonical_near(moved, k), b = solve_canonical(moved);
    CHECK(std::abs(a.k - b.k) < 1e-12 * b.k);
    CHECK((a.beta - b.beta).norm() < 1e-9);
}

TEST_CASE("near-field wavenumber") {
    CHECK(std::abs(near_field_k(1, 0.1, 0.01, 4e4) - 0.0280) < 1e-4);
    CHECK(std::abs(near_field_k(1, 0.1, 0.01, 4e4) -
                   std::sqrt(2 * std::numbers::pi * std::tan(0.1 * std::log(100.0)) / (0.1 * 4e4))) < 1e-15);
    const double a = near_field_k(2, 0.2, 0.02, 3e4), b = near_field_k(2, 0.2, 0.02, 6e4);
    CHECK(std::abs(a * a / (b * b) - 2) < 1e-13);
    const double q = 1e-7;
    CHECK(std::abs(near_field_k(1, q, 0.01, 4e4) / std::sqrt(2 * std::numbers::pi * std::log(100.0) / 4e4) - 1) < 1e-6);
    CHECK(near_field_k(0, 0.1, 0.01, 4e4) == 0.0);
    CHECK_THROWS_AS(near_field_k(1, 0.4, 0.01, 4e4), ValidationError);
    CHECK_THROWS_AS(near_field_k(1, 0.1, 1.5, 4e4), ValidationError);
    CHECK_THROWS_AS(near_field_k(1, 0.1, 0.01, 0), ValidationError);
}

TEST_CASE("uniform wavenumber") {
    // Approach to the canonical value as q log(1/eps) -> pi/2.
    const double eps = 0.01;
    const double q = (std::numbers::pi / 2 - 0.05) / std::log(1 / eps);
    const auto p = make(q, {{Vec2(100, 100), 1}});
    const double kc = solve_canonical(p).k;
    CHECK(std::abs(uniform_k(p, eps) - kc) < 1e-2 * kc);
    // The gap to the canonical value closes further nearer the pole.
    const double q2 = (std::numbers::pi / 2 - 0.01) / std::log(1 / eps);
    const auto p2 = make(q2, {{Vec2(100, 100), 1}});
    const double kc2 = solve_canonical(p2).k;
    CHECK(std::abs(uniform_k(p2, eps) - kc2) / kc2 < std::abs(uniform_k(p, eps) - kc) / kc);

    auto none = p;
    none.spirals.clear();
    CHECK(uniform_k(none, eps, 0.037) == 0.037);
    CHECK(uniform_k(none, eps) == 0.0);
    CHECK_THROWS_AS(uniform_k(p, 1e-5, kc), ValidationError);
    CHECK_THROWS_AS(uniform_k(p, eps, 0.0), NumericalError);
}

TEST_CASE("uniform wavenumber in the deep near field stays close to the closed form") {
    // Measured gap is a few percent on the 200 square, bounded away from zero as q -> 0.
    for (double q : {0.01, 0.05}) {
        const auto p = make(q, {{Vec2(100, 100), 1}});
        const double kn = near_field_k(1, q, 0.01, p.dom.area());
        CHECK(std::abs(uniform_k(p, 0.01) - kn) / kn < 0.05);
    }
}

TEST_CASE("charge conjugation and mirror invariance") {
    const auto p = make(0.3, {{Vec2(70, 90), 1}, {Vec2(120, 110), -1}, {Vec2(150, 40), 1}});
    auto flipped = p;
    for (auto& s : flipped.spirals) s.winding = -s.winding;
    const WavenumberSolution a = solve_canonical(p), b = solve_canonical(flipped);
    CHECK(a.k == b.k);
    CHECK((a.beta - b.beta).norm() == 0.0);

    auto mirrored = p;
    for (auto& s : mirrored.spirals) s.position.x() = p.dom.lx - s.position.x();
    const WavenumberSolution c = solve_canonical(mirrored);
    CHECK(std::abs(c.k - a.k) < 1e-12 * a.k);
    CHECK((c.beta - a.beta).norm() < 1e-9);
}

TEST_CASE("configuration validation") {
    CHECK_THROWS_AS(solve_canonical(make(0.3, {{Vec2(2, 100), 1}})), ValidationError);
    CHECK_THROWS_AS(solve_canonical(make(0.3, {{Vec2(250, 100), 1}})), ValidationError);
    CHECK_THROWS_AS(solve_canonical(make(0.3, {{Vec2(100, 100), 1}, {Vec2(101, 100), 1}})), ValidationError);
    CHECK_THROWS_AS(solve_canonical(make(0.3, {{Vec2(100, 100), 2}})), ValidationError);
    CHECK_THROWS_AS(solve_canonical(make(1.2, {{Vec2(100, 100), 1}})), ValidationError);
    CHECK_THROWS_AS(solve_canonical(make(0.3, {})), ValidationError);
    CHECK_THROWS_AS(beta_matrix(make(0.3, {{Vec2(100, 100), 1}}), 0.0), ValidationError);
    CanonicalScan narrow;
    narrow.k_lo = 1e-8;
    narrow.k_hi_times_q = 1e-6;
    CHECK_THROWS_AS(solve_canonical(make(0.3, {{Vec2(100, 100), 1}}), narrow), NumericalError);
}
