#pragma once

#include <string>
#include <vector>

#include "spiralwave/motion.hpp"

namespace spiralwave {

struct OrbitOptions {
    // Seeds on the line y = Ly/2, as fractions of Lx.
    std::vector<double> seed_fractions{0.8, 0.7, 0.6, 0.55};
    double max_displacement = 0.1;  // per RK4 step
    double h_max = 500;             // cap on |h| in time units
    double tol = 1e-3;              // |P(x) - x| at convergence
    int max_crossings = 80;
    long max_steps_per_return = 400000;
    // Crossings closer than this to the centre mean the trajectory is
    // spiralling into the centre rather than onto a closed orbit.
    double centre_margin = 2.0;
};

struct OrbitRecord {
    bool found = false;
    double crossing_x = 0;
    double period = 0;
    double seed_x = 0;
    int crossings = 0;
    std::vector<Vec2> points;  // one revolution at convergence
    std::string reason;
};

// One backward return to y = Ly/2 on the right half, starting from (x0, Ly/2).
struct ReturnResult {
    bool ok = false;
    double x = 0;
    double elapsed = 0;
    std::string reason;
    std::vector<Vec2> path;
};

ReturnResult backward_return(LawEvaluator& law, double x0, const OrbitOptions& opts, bool keep_path = false);

// Closed orbit of a single +1 spiral, found as an attracting fixed point of
// the backward-time return map to y = Ly/2, accelerated with Steffensen steps.
OrbitRecord find_periodic_orbit(double q, const RectDomain& dom, Law law, const EpsilonPolicy& policy, double c1,
                                const OrbitOptions& opts = {});

// Largest distance from the 90-degree rotated orbit to the orbit polyline.
double rotation_asymmetry(const std::vector<Vec2>& orbit, const Vec2& centre);

}  // namespace spiralwave
