#include "spiralwave/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace spiralwave {

ReturnResult backward_return(LawEvaluator& law, double x0, const OrbitOptions& opts, bool keep_path) {
    const RectDomain& dom = law.model().dom;
    const double y_line = dom.ly / 2;
    ReturnResult res;
    SpiralList s{{Vec2(x0, y_line), 1}};
    if (keep_path) res.path.push_back(s[0].position);
    double elapsed = 0;
    for (long step = 0; step < opts.max_steps_per_return; ++step) {
        LawEvaluator::Frozen fr;
        try {
            fr = law.refresh(s);
        } catch (const std::exception& e) {
            res.reason = std::string("law evaluation failed: ") + e.what();
            return res;
        }
        const double speed = law.velocity(s, fr)[0].norm();
        if (!(speed > 0)) {
            res.reason = "stationary point";
            return res;
        }
        const double h = std::min(opts.h_max, opts.max_displacement / speed);
        SpiralList next;
        try {
            next = rk4_step(law, s, fr, -h);
        } catch (const ValidationError& e) {
            res.reason = "left the domain";
            return res;
        }
        const double y0 = s[0].position.y() - y_line, y1 = next[0].position.y() - y_line;
        if (step > 0 && y0 != 0 && (y0 < 0) != (y1 < 0)) {
            // Land on the line: secant on the step length from the last state.
            double a = 0, fa = y0, b = h, fb = y1;
            SpiralList hit = next;
            double c = b;
            for (int it = 0; it < 3; ++it) {
                c = a - fa * (b - a) / (fb - fa);
                hit = rk4_step(law, s, fr, -c);
                const double fc = hit[0].position.y() - y_line;
                if ((fc < 0) == (fa < 0)) {
                    a = c;
                    fa = fc;
                } else {
                    b = c;
                    fb = fc;
                }
                if (std::abs(fc) < 1e-12) break;
            }
            if (hit[0].position.x() > dom.lx / 2) {
                res.ok = true;
                res.x = hit[0].position.x();
                res.elapsed = elapsed + c;
                if (keep_path) res.path.push_back(hit[0].position);
                return res;
            }
        }
        s = std::move(next);
        elapsed += h;
        if (keep_path) res.path.push_back(s[0].position);
        if (auto c = check_contact(s, dom)) {
            res.reason = "reached a wall";
            return res;
        }
    }
    res.reason = "no return within the step budget";
    return res;
}

OrbitRecord find_periodic_orbit(double q, const RectDomain& dom, Law law, const EpsilonPolicy& policy, double c1,
                                const OrbitOptions& opts) {
    MotionModel model;
    model.q = q;
    model.dom = dom;
    model.c1 = c1;
    model.law = law;
    model.policy = policy;
    const double centre = dom.lx / 2;
    const double x_max = dom.lx - kMinSeparation;
    std::ostringstream why;

    for (double frac : opts.seed_fractions) {
        const double seed = frac * dom.lx;
        if (seed <= centre + opts.centre_margin || seed >= x_max) continue;
        LawEvaluator ev(model);
        OrbitRecord rec;
        rec.seed_x = seed;
        double x = seed;
        bool failed = false;
        auto step_map = [&](double from) -> ReturnResult {
            ReturnResult r = backward_return(ev, from, opts);
            ++rec.crossings;
            if (r.ok && r.x - centre < opts.centre_margin) {
                r.ok = false;
                r.reason = "spirals into the centre";
            }
            return r;
        };
        while (rec.crossings < opts.max_crossings && !failed) {
            const ReturnResult r1 = step_map(x);
            if (!r1.ok) {
                why << "seed " << seed << ": " << r1.reason << "; ";
                failed = true;
                break;
            }
            if (std::abs(r1.x - x) < opts.tol) {
                rec.found = true;
                rec.crossing_x = r1.x;
                rec.period = r1.elapsed;
                break;
            }
            const ReturnResult r2 = step_map(r1.x);
            if (!r2.ok) {
                why << "seed " << seed << ": " << r2.reason << "; ";
                failed = true;
                break;
            }
            if (std::abs(r2.x - r1.x) < opts.tol) {
                rec.found = true;
                rec.crossing_x = r2.x;
                rec.period = r2.elapsed;
                break;
            }
            // Steffensen update on the return map, kept only when it stays in range.
            const double denom = r2.x - 2 * r1.x + x;
            double next = r2.x;
            if (denom != 0) {
                const double aitken = x - (r1.x - x) * (r1.x - x) / denom;
                if (aitken > centre + opts.centre_margin && aitken < x_max) next = aitken;
            }
            x = next;
        }
        if (rec.found) {
            const ReturnResult lap = backward_return(ev, rec.crossing_x, opts, true);
            rec.points = lap.path;
            return rec;
        }
        if (!failed) why << "seed " << seed << ": no convergence within " << opts.max_crossings << " crossings; ";
    }
    OrbitRecord none;
    none.reason = why.str();
    return none;
}

double rotation_asymmetry(const std::vector<Vec2>& orbit, const Vec2& centre) {
    if (orbit.size() < 3) return std::numeric_limits<double>::infinity();
    auto seg_dist = [](const Vec2& p, const Vec2& a, const Vec2& b) {
        const Vec2 ab = b - a;
        const double L2 = ab.squaredNorm();
        const double t = L2 > 0 ? std::clamp((p - a).dot(ab) / L2, 0.0, 1.0) : 0.0;
        return (a + t * ab - p).norm();
    };
    double worst = 0;
    for (const Vec2& p : orbit) {
        const Vec2 d = p - centre;
        const Vec2 r = centre + Vec2(-d.y(), d.x());
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < orbit.size(); ++i) best = std::min(best, seg_dist(r, orbit[i], orbit[i + 1]));
        best = std::min(best, seg_dist(r, orbit.back(), orbit.front()));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace spiralwave
