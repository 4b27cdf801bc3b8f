#pragma once

// Image-sum Green's functions on the Neumann rectangle [0,Lx] x [0,Ly].
//
// Modified Helmholtz (operator del^2 - kappa^2): the whole-plane kernel
// -K0(kappa r)/2pi replicated over four reflection families and the lattice
// (2 n Lx, 2 m Ly).  Neumann functions add all families, Dirichlet ones use
// the parity signs (+,-,-,+).
//
// Laplace: only gradients are available, through the row-summed closed forms
// Vx, Vy.  Gradients are taken with respect to the first argument.

#include <Eigen/Core>
#include <array>
#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "spiralwave/types.hpp"

namespace spiralwave {

struct ImageTruncation {
    int m_max = 30;
    double tol = 1e-15;

    ImageTruncation() = default;
    ImageTruncation(int m, double t) : m_max(m), tol(t) {
        if (m_max < 1) throw ValidationError("image truncation m_max must be >= 1");
        if (!(tol > 0)) throw ValidationError("image truncation tol must be positive");
    }
};

inline ImageTruncation laplace_truncation_default() { return {12, 1e-15}; }

enum class Boundary { neumann, dirichlet };

template <typename Scalar>
struct GreensEval {
    Scalar value = 0;
    Eigen::Matrix<Scalar, 2, 1> grad = Eigen::Matrix<Scalar, 2, 1>::Zero();
    int shells = 0;  // lattice shells actually summed
};

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> perp(const Eigen::Matrix<Scalar, 2, 1>& g) {
    return {-g.y(), g.x()};
}

namespace detail {

using bessel_policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

template <typename Scalar>
Scalar k0(Scalar z) {
    return boost::math::cyl_bessel_k(0, z, bessel_policy());
}
template <typename Scalar>
Scalar k1(Scalar z) {
    return boost::math::cyl_bessel_k(1, z, bessel_policy());
}

// Source positions of the four reflection families and their Dirichlet parity.
template <typename Scalar>
std::array<Eigen::Matrix<Scalar, 2, 1>, 4> reflections(const Eigen::Matrix<Scalar, 2, 1>& xi) {
    return {Eigen::Matrix<Scalar, 2, 1>(xi.x(), xi.y()), Eigen::Matrix<Scalar, 2, 1>(-xi.x(), xi.y()),
            Eigen::Matrix<Scalar, 2, 1>(xi.x(), -xi.y()), Eigen::Matrix<Scalar, 2, 1>(-xi.x(), -xi.y())};
}
inline constexpr std::array<int, 4> kDirichletParity = {1, -1, -1, 1};

template <typename Scalar>
int family_sign(Boundary bc, int f) {
    return bc == Boundary::neumann ? 1 : kDirichletParity[f];
}

// Accumulates sign * K0(kappa d) and sign * kappa K1(kappa d) d_vec / d over
// one lattice shell max(|n|,|m|) = s.  The principal image (s = 0 of family 0)
// is skipped when skip_origin is set.
template <typename Scalar>
void add_shell(const Eigen::Matrix<Scalar, 2, 1>& delta, Scalar kappa, const Rect<Scalar>& dom, int s, Scalar sign,
               bool skip_origin, Scalar& value, Eigen::Matrix<Scalar, 2, 1>& grad) {
    auto visit = [&](int n, int m) {
        if (skip_origin && n == 0 && m == 0) return;
        const Scalar dx = delta.x() + 2 * dom.lx * n;
        const Scalar dy = delta.y() + 2 * dom.ly * m;
        const Scalar d = std::hypot(dx, dy);
        const Scalar z = kappa * d;
        if (z > Scalar(700)) return;
        value += sign * k0(z);
        const Scalar w = sign * kappa * k1(z) / d;
        grad.x() += w * dx;
        grad.y() += w * dy;
    };
    if (s == 0) {
        visit(0, 0);
        return;
    }
    for (int n = -s; n <= s; ++n) {
        visit(n, -s);
        visit(n, s);
    }
    for (int m = -s + 1; m <= s - 1; ++m) {
        visit(-s, m);
        visit(s, m);
    }
}

template <typename Scalar>
void check_kappa(Scalar kappa) {
    if (!(kappa > 0) || !std::isfinite(static_cast<double>(kappa)))
        throw ValidationError("modified Helmholtz coefficient kappa must be positive and finite");
}

// Sum over all families and shells.  Returns the raw lattice sums
// S = sum sign K0 and grad S (w.r.t. the field point) before the -1/2pi factor.
template <typename Scalar>
GreensEval<Scalar> mh_lattice(const Eigen::Matrix<Scalar, 2, 1>& x, const Eigen::Matrix<Scalar, 2, 1>& xi, Scalar kappa,
                              const Rect<Scalar>& dom, Boundary bc, const ImageTruncation& trunc, bool skip_principal) {
    check_kappa(kappa);
    const auto src = reflections(xi);
    GreensEval<Scalar> out;
    for (int s = 0; s <= trunc.m_max; ++s) {
        Scalar v = 0;
        Eigen::Matrix<Scalar, 2, 1> g = Eigen::Matrix<Scalar, 2, 1>::Zero();
        for (int f = 0; f < 4; ++f) {
            const Eigen::Matrix<Scalar, 2, 1> delta = x - src[f];
            add_shell(delta, kappa, dom, s, Scalar(family_sign<Scalar>(bc, f)), skip_principal && f == 0, v, g);
        }
        out.value += v;
        out.grad += g;
        out.shells = s;
        using std::abs;
        if (s >= 2 && abs(v) < Scalar(trunc.tol) && g.cwiseAbs().maxCoeff() < Scalar(trunc.tol)) break;
    }
    return out;
}

template <typename Scalar>
void check_not_image(const Eigen::Matrix<Scalar, 2, 1>& x, const Eigen::Matrix<Scalar, 2, 1>& xi,
                     const Rect<Scalar>& dom, bool allow_principal) {
    const auto src = reflections(xi);
    for (int f = 0; f < 4; ++f) {
        Eigen::Matrix<Scalar, 2, 1> d = x - src[f];
        using std::abs;
        using std::remainder;
        const Scalar rx = remainder(d.x(), 2 * dom.lx);
        const Scalar ry = remainder(d.y(), 2 * dom.ly);
        const Scalar scale = dom.lx + dom.ly;
        const bool hit = abs(rx) < 1e-12 * scale && abs(ry) < 1e-12 * scale;
        if (!hit) continue;
        const bool principal = f == 0 && abs(d.x()) < 1e-12 * scale && abs(d.y()) < 1e-12 * scale;
        if (principal && allow_principal) continue;
        throw ValidationError("field point coincides with an image of the source");
    }
}

}  // namespace detail

// Full modified-Helmholtz Green's function and its gradient in the first argument.
template <typename Scalar>
GreensEval<Scalar> mh_green(const Eigen::Matrix<Scalar, 2, 1>& x, const Eigen::Matrix<Scalar, 2, 1>& xi, Scalar kappa,
                            const Rect<Scalar>& dom, Boundary bc, const ImageTruncation& trunc = {}) {
    detail::check_not_image(x, xi, dom, false);
    const Scalar c = -1 / boost::math::constants::two_pi<Scalar>();
    GreensEval<Scalar> s = detail::mh_lattice(x, xi, kappa, dom, bc, trunc, false);
    // d/dx K0(kappa d) = -kappa K1 (x - xi)/d, so grad G = +(1/2pi) sum kappa K1 d_vec/d
    return {c * s.value, -c * s.grad, s.shells};
}

// Regular part G - (1/2pi) log|x - xi|, valid at and near coincidence.
template <typename Scalar>
GreensEval<Scalar> mh_green_reg(const Eigen::Matrix<Scalar, 2, 1>& x, const Eigen::Matrix<Scalar, 2, 1>& xi,
                                Scalar kappa, const Rect<Scalar>& dom, Boundary bc, const ImageTruncation& trunc = {}) {
    detail::check_not_image(x, xi, dom, true);
    const Scalar two_pi = boost::math::constants::two_pi<Scalar>();
    GreensEval<Scalar> s = detail::mh_lattice(x, xi, kappa, dom, bc, trunc, true);
    GreensEval<Scalar> out{-s.value / two_pi, s.grad / two_pi, s.shells};
    const Eigen::Matrix<Scalar, 2, 1> d = x - xi;
    const Scalar r = d.norm();
    if (r == 0) {
        using std::log;
        out.value += (log(kappa / 2) + boost::math::constants::euler<Scalar>()) / two_pi;
    } else {
        using std::log;
        const Scalar z = kappa * r;
        out.value += (-detail::k0(z) - log(r)) / two_pi;
        out.grad += (kappa * detail::k1(z) / r - 1 / (r * r)) / two_pi * d;
    }
    return out;
}

template <typename Scalar>
Scalar mh_neumann_value(const Eigen::Matrix<Scalar, 2, 1>& x, const Eigen::Matrix<Scalar, 2, 1>& xi, Scalar kappa,
                        const Rect<Scalar>& dom, const ImageTruncation& trunc = {}) {
    return mh_green(x, xi, kappa, dom, Boundary::neumann, trunc).value;
}

template <typename Scalar>
GreensEval<Scalar> mh_neumann_reg(const Eigen::Matrix<Scalar, 2, 1>& x, const Eigen::Matrix<Scalar, 2, 1>& xi,
                                  Scalar kappa, const Rect<Scalar>& dom, const ImageTruncation& trunc = {}) {
    return mh_green_reg(x, xi, kappa, dom, Boundary::neumann, trunc);
}

template <typename Scalar>
GreensEval<Scalar> mh_dirichlet_grad(const Eigen::Matrix<Scalar, 2, 1>& x, const Eigen::Matrix<Scalar, 2, 1>& xi,
                                     Scalar kappa, const Rect<Scalar>& dom, const ImageTruncation& trunc = {}) {
    return mh_green(x, xi, kappa, dom, Boundary::dirichlet, trunc);
}

template <typename Scalar>
GreensEval<Scalar> mh_dirichlet_reg(const Eigen::Matrix<Scalar, 2, 1>& x, const Eigen::Matrix<Scalar, 2, 1>& xi,
                                    Scalar kappa, const Rect<Scalar>& dom, const ImageTruncation& trunc = {}) {
    return mh_green_reg(x, xi, kappa, dom, Boundary::dirichlet, trunc);
}

namespace detail {

// One period-summed row of the Laplace image gradient:
//   (1/2pi) sum_m  pi sin(pi a/L) / (2 L (cosh(pi (b + 2 P m)/L) - cos(pi a/L)))
// where a is the offset along the summed-out direction of period 2L and b the
// transverse offset with period 2P.
template <typename Scalar>
Scalar laplace_row_sum(Scalar a, Scalar b, Scalar L, Scalar P, const ImageTruncation& trunc) {
    using std::abs;
    using std::sin;
    using std::sinh;
    const Scalar pi = boost::math::constants::pi<Scalar>();
    const Scalar sa = sin(pi * a / L);
    const Scalar sh = sin(pi * a / (2 * L));
    // cosh(u) - cos(v) = 2 sinh^2(u/2) + 2 sin^2(v/2), free of cancellation near coincidence.
    auto term = [&](int m) {
        const Scalar arg = pi * (b + 2 * P * m) / L;
        if (abs(arg) > Scalar(700)) return Scalar(0);
        const Scalar s = sinh(arg / 2);
        return pi * sa / (4 * L * (s * s + sh * sh));
    };
    // Terms decay like exp(-2 pi P |m| / L); widen the cut for elongated domains.
    const int cap = std::max(trunc.m_max, static_cast<int>(std::ceil(40 * L / (2 * pi * P))) + 2);
    Scalar sum = term(0);
    for (int m = 1; m <= cap; ++m) {
        const Scalar t = term(m) + term(-m);
        sum += t;
        if (abs(t) < Scalar(trunc.tol) && m >= 2) break;
    }
    return sum / (2 * pi);
}

}  // namespace detail

// Vx(x; xi, eta): x-derivative of the log-kernel summed over the lattice of
// (xi, eta).  The seed may be a reflected source such as (-xi, eta).
template <typename Scalar>
Scalar laplace_vx(const Eigen::Matrix<Scalar, 2, 1>& x, const Eigen::Matrix<Scalar, 2, 1>& src, const Rect<Scalar>& dom,
                  const ImageTruncation& trunc = laplace_truncation_default()) {
    return detail::laplace_row_sum(x.x() - src.x(), x.y() - src.y(), dom.lx, dom.ly, trunc);
}

template <typename Scalar>
Scalar laplace_vy(const Eigen::Matrix<Scalar, 2, 1>& x, const Eigen::Matrix<Scalar, 2, 1>& src, const Rect<Scalar>& dom,
                  const ImageTruncation& trunc = laplace_truncation_default()) {
    return detail::laplace_row_sum(x.y() - src.y(), x.x() - src.x(), dom.ly, dom.lx, trunc);
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> laplace_grad(const Eigen::Matrix<Scalar, 2, 1>& x, const Eigen::Matrix<Scalar, 2, 1>& xi,
                                         const Rect<Scalar>& dom, Boundary bc,
                                         const ImageTruncation& trunc = laplace_truncation_default()) {
    detail::check_not_image(x, xi, dom, false);
    const auto src = detail::reflections(xi);
    Eigen::Matrix<Scalar, 2, 1> g = Eigen::Matrix<Scalar, 2, 1>::Zero();
    for (int f = 0; f < 4; ++f) {
        const Scalar s = Scalar(detail::family_sign<Scalar>(bc, f));
        g.x() += s * laplace_vx(x, src[f], dom, trunc);
        g.y() += s * laplace_vy(x, src[f], dom, trunc);
    }
    return g;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> laplace_neumann_grad(const Eigen::Matrix<Scalar, 2, 1>& x,
                                                 const Eigen::Matrix<Scalar, 2, 1>& xi, const Rect<Scalar>& dom,
                                                 const ImageTruncation& trunc = laplace_truncation_default()) {
    return laplace_grad(x, xi, dom, Boundary::neumann, trunc);
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> laplace_dirichlet_grad(const Eigen::Matrix<Scalar, 2, 1>& x,
                                                   const Eigen::Matrix<Scalar, 2, 1>& xi, const Rect<Scalar>& dom,
                                                   const ImageTruncation& trunc = laplace_truncation_default()) {
    return laplace_grad(x, xi, dom, Boundary::dirichlet, trunc);
}

// Gradient of the regular part at coincidence.  Translated copies of the
// source cancel in (n,m) / (-n,-m) pairs, leaving the three reflected families.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> laplace_reg_grad_at_self(const Eigen::Matrix<Scalar, 2, 1>& x, const Rect<Scalar>& dom,
                                                     Boundary bc,
                                                     const ImageTruncation& trunc = laplace_truncation_default()) {
    if (dom.wall_distance(x) <= Scalar(trunc.tol) * (dom.lx + dom.ly))
        throw ValidationError("self-gradient requested on or outside a wall");
    const auto src = detail::reflections(x);
    Eigen::Matrix<Scalar, 2, 1> g = Eigen::Matrix<Scalar, 2, 1>::Zero();
    for (int f = 1; f < 4; ++f) {
        const Scalar s = Scalar(detail::family_sign<Scalar>(bc, f));
        g.x() += s * laplace_vx(x, src[f], dom, trunc);
        g.y() += s * laplace_vy(x, src[f], dom, trunc);
    }
    return g;
}

}  // namespace spiralwave
