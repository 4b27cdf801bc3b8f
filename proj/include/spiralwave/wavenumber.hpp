#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "spiralwave/greens_rect.hpp"
#include "spiralwave/types.hpp"

namespace spiralwave {

struct SpiralConfigurationParams {
    SpiralList spirals;
    double q = 0.1;
    RectDomain dom{200.0, 200.0};
    double c1 = 0;
    ImageTruncation trunc{};

    // Interior, >= 3 from walls, pairwise > 2 apart, |winding| = 1, 0 < q < 1.
    void validate() const;
};

enum class Regime { canonical, near_field, uniform };
std::string to_string(Regime r);

struct WavenumberSolution {
    double k = 0;
    Eigen::VectorXd beta;
    Regime regime = Regime::canonical;
    double residual = 0;
    // Brackets [k_lo, k_hi] of every sign change of det M seen in the scan.
    std::vector<std::pair<double, double>> sign_changes;
};

struct CanonicalScan {
    double k_lo = 1e-8;
    double k_hi_times_q = 2.0;  // upper end is this value divided by q
    int points = 400;
};

// M_ll = 2 pi G'_n,reg(x_l;x_l) - (c1 - pi/(2q)),  M_lj = 2 pi G'_n(x_l;x_j), kappa = q k.
Eigen::MatrixXd beta_matrix(const SpiralConfigurationParams& cfg, double k);

// Smallest k > 0 with det M(k) = 0 whose null vector has all weights positive.
WavenumberSolution solve_canonical(const SpiralConfigurationParams& cfg, const CanonicalScan& scan = {});

// Root continuation from a nearby previous solution; falls back to the full
// scan if no sign change is found close to k_guess.
WavenumberSolution solve_canonical_near(const SpiralConfigurationParams& cfg, double k_guess,
                                        const CanonicalScan& scan = {});

// Expanded 2x2 determinant, an independent check on the matrix assembly.
double two_spiral_k_residual(const SpiralConfigurationParams& cfg, double k);

// k = sqrt(2 pi N tan(q log(1/eps)) / (q area)).
double near_field_k(int n_spirals, double q, double eps, double area);

// k^2 = k_can^2 + (2 pi N/(q area)) tan(q log 1/eps) - 2 pi N / (q area (pi/2 - q log 1/eps)).
double uniform_k(const SpiralConfigurationParams& cfg, double eps, double k_canonical);
double uniform_k(const SpiralConfigurationParams& cfg, double eps);

}  // namespace spiralwave
