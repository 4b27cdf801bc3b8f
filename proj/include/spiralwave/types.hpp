#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace spiralwave {

using Vec2 = Eigen::Vector2d;

// Thrown for malformed input: bad config, out-of-range parameters, spirals
// outside the domain.  Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical procedure fails to converge or blows up.
// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct Rect {
    Scalar lx;
    Scalar ly;

    Rect(Scalar lx_, Scalar ly_) : lx(lx_), ly(ly_) {
        if (!(lx > 0) || !(ly > 0)) throw ValidationError("domain side lengths must be positive");
    }
    Scalar area() const { return lx * ly; }
    Eigen::Matrix<Scalar, 2, 1> center() const { return {lx / 2, ly / 2}; }
    // Distance to the nearest wall; negative outside.
    Scalar wall_distance(const Eigen::Matrix<Scalar, 2, 1>& p) const {
        using std::min;
        return min(min(p.x(), lx - p.x()), min(p.y(), ly - p.y()));
    }
    bool interior(const Eigen::Matrix<Scalar, 2, 1>& p) const { return wall_distance(p) > 0; }
};

using RectDomain = Rect<double>;

struct Spiral {
    Vec2 position;
    int winding = 1;
};

using SpiralList = std::vector<Spiral>;

inline std::vector<Vec2> positions_of(const SpiralList& s) {
    std::vector<Vec2> p;
    p.reserve(s.size());
    for (const auto& sp : s) p.push_back(sp.position);
    return p;
}

// Walls and neighbours closer than this (in core radii) are outside the
// validity of the asymptotic laws.
inline constexpr double kMinSeparation = 3.0;

}  // namespace spiralwave
