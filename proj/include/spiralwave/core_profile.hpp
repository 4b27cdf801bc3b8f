#pragma once

#include <Eigen/Dense>

#include "spiralwave/types.hpp"

namespace spiralwave {

// Radial amplitude of an isolated unit-winding spiral core, solving
//   f'' + f'/r - f/r^2 + (1 - f^2) f = 0,  f(0) = 0,
// with the algebraic tail f ~ 1 - a/r^2 imposed as a mixed condition at r_max.
struct CoreProfile {
    Eigen::ArrayXd r_nodes;
    Eigen::ArrayXd f_values;
    // Running integral of s f^2 (1 - f^2) from 0 to each node.
    Eigen::ArrayXd phase_integral;
    double slope_at_zero = 0;
    double c1 = 0;
    double far_field_coeff = 0;  // fitted a in f ~ 1 - a/r^2
    double residual = 0;         // max-norm residual of the discrete ODE
    int newton_iterations = 0;

    double r_max() const { return r_nodes[r_nodes.size() - 1]; }
    double spacing() const { return r_nodes[1] - r_nodes[0]; }
};

inline constexpr double kCoreRadiusDefault = 80.0;
inline constexpr int kCoreNodesDefault = 8000;

CoreProfile solve_core_amplitude(double r_max = kCoreRadiusDefault, int n_nodes = kCoreNodesDefault);

// lim_{r->inf} [ int_0^r f^2 (1 - f^2) s ds - log r ], extrapolated from
// r_max and r_max/2 assuming an O(1/r^2) tail.
double compute_c1(const CoreProfile& profile);

// Truncated value int_0^r f^2(1-f^2) s ds - log r at an arbitrary radius.
double c1_partial(const CoreProfile& profile, double r);

// phi_02'(r) = -(1 / (r f^2)) int_0^r s f^2 (1 - f^2) ds.
double phase_gradient_correction(const CoreProfile& profile, double r);

// Amplitude at arbitrary r by cubic interpolation of the stored profile.
double core_amplitude_at(const CoreProfile& profile, double r);

// Profile solved once with default resolution and shared afterwards.
const CoreProfile& default_core_profile();

}  // namespace spiralwave
