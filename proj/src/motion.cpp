#include "spiralwave/motion.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace spiralwave {

std::string to_string(EpsilonPolicy::Kind k) {
    switch (k) {
        case EpsilonPolicy::Kind::constant:
            return "constant";
        case EpsilonPolicy::Kind::single_spiral_walls:
            return "single_spiral_walls";
        case EpsilonPolicy::Kind::symmetric_pair:
            return "symmetric_pair";
    }
    return "?";
}

EpsilonPolicy::Kind parse_epsilon_kind(const std::string& s) {
    if (s == "constant") return EpsilonPolicy::Kind::constant;
    if (s == "single_spiral_walls") return EpsilonPolicy::Kind::single_spiral_walls;
    if (s == "symmetric_pair") return EpsilonPolicy::Kind::symmetric_pair;
    throw ValidationError("unknown eps policy '" + s + "'");
}

std::string to_string(Law law) {
    switch (law) {
        case Law::canonical:
            return "canonical";
        case Law::near_field:
            return "near_field";
        case Law::uniform:
            return "uniform";
        case Law::b_corrected:
            return "b_corrected";
    }
    return "?";
}

Law parse_law(const std::string& s) {
    if (s == "canonical") return Law::canonical;
    if (s == "near_field" || s == "near") return Law::near_field;
    if (s == "uniform") return Law::uniform;
    if (s == "b_corrected") return Law::b_corrected;
    throw ValidationError("unknown law '" + s + "'");
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::t_max:
            return "t_max";
        case Termination::wall_contact:
            return "wall_contact";
        case Termination::collision:
            return "collision";
        case Termination::k_solve_failure:
            return "k_solve_failure";
    }
    return "?";
}

double eval_epsilon(const SpiralState& state, const RectDomain& dom, const EpsilonPolicy& policy) {
    double eps = 0;
    if (policy.kind == EpsilonPolicy::Kind::constant) {
        eps = policy.constant_value;
    } else {
        if (state.spirals.empty()) throw ValidationError("position-dependent eps needs at least one spiral");
        const Vec2& p = state.spirals.front().position;
        if (!dom.interior(p)) throw ValidationError("eps policy evaluated for a spiral on or outside a wall");
        const double dx0 = p.x(), dx1 = dom.lx - p.x(), dy0 = p.y(), dy1 = dom.ly - p.y();
        double s = 1 / (dx0 * dx0) + 1 / (dx1 * dx1) + 1 / (dy0 * dy0) + 1 / (dy1 * dy1);
        if (policy.kind == EpsilonPolicy::Kind::symmetric_pair) {
            const double hx = dom.lx / 2 - p.x(), hy = dom.ly / 2 - p.y();
            const double d2 = hx * hx + hy * hy;
            if (d2 == 0) throw ValidationError("symmetric-pair eps undefined with a spiral at the domain centre");
            s += 1 / d2;
        }
        eps = std::sqrt(s);
    }
    if (!(eps > 0 && eps < 1)) {
        std::ostringstream os;
        os << "eps = " << eps << " outside (0,1)";
        throw ValidationError(os.str());
    }
    return eps;
}

namespace {

constexpr double kPi = std::numbers::pi;

void check_near_regime(double q, double eps) {
    const double theta = q * std::log(1 / eps);
    if (!(theta > 0 && theta < kPi / 2)) throw ValidationError("near-field law needs 0 < q log(1/eps) < pi/2");
}

// cot(q log eps); negative because log eps < 0.
double cot_q_log_eps(double q, double eps) { return 1 / std::tan(q * std::log(eps)); }

}  // namespace

Velocities velocity_canonical(const SpiralConfigurationParams& cfg, double k, const Eigen::VectorXd& beta) {
    const auto n = cfg.spirals.size();
    if (static_cast<std::size_t>(beta.size()) != n) throw ValidationError("beta has the wrong length");
    const double kappa = cfg.q * k;
    Velocities v(n, Vec2::Zero());
    for (std::size_t l = 0; l < n; ++l) {
        const auto& sl = cfg.spirals[l];
        const double scale = 4 * kPi * cfg.q * sl.winding;
        Vec2 pair_sum = Vec2::Zero();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == l) continue;
            pair_sum +=
                beta[j] *
                mh_green(sl.position, cfg.spirals[j].position, kappa, cfg.dom, Boundary::neumann, cfg.trunc).grad;
        }
        const Vec2 self = mh_neumann_reg(sl.position, sl.position, kappa, cfg.dom, cfg.trunc).grad;
        v[l] = scale / beta[l] * perp(pair_sum) + scale * perp(self);
    }
    return v;
}

Velocities velocity_near_field(const SpiralList& spirals, double q, double eps, const RectDomain& dom,
                               const ImageTruncation& trunc) {
    check_near_regime(q, eps);
    const double cot = cot_q_log_eps(q, eps);
    const auto n = spirals.size();
    Velocities v(n, Vec2::Zero());
    for (std::size_t l = 0; l < n; ++l) {
        const auto& sl = spirals[l];
        const double nl = sl.winding;
        Vec2 vel = 4 * kPi * q * nl * perp(laplace_reg_grad_at_self(sl.position, dom, Boundary::neumann, trunc)) -
                   4 * kPi * q * cot * laplace_reg_grad_at_self(sl.position, dom, Boundary::dirichlet, trunc);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == l) continue;
            const auto& sj = spirals[j];
            vel += 4 * kPi * q * nl * perp(laplace_neumann_grad(sl.position, sj.position, dom, trunc));
            vel -= 4 * kPi * q * nl * sj.winding * cot * laplace_dirichlet_grad(sl.position, sj.position, dom, trunc);
        }
        v[l] = vel;
    }
    return v;
}

Velocities velocity_uniform(const SpiralConfigurationParams& cfg, double eps, double k, const Eigen::VectorXd& beta) {
    if (!(eps > 0 && eps < 1)) throw ValidationError("eps must lie in (0,1)");
    if (std::abs(std::sin(cfg.q * std::log(eps))) < 1e-12) throw ValidationError("cot(q log eps) is undefined");
    Velocities v = velocity_canonical(cfg, k, beta);
    const double cot = cot_q_log_eps(cfg.q, eps);
    const double kappa = cfg.q * k;
    const auto n = cfg.spirals.size();
    for (std::size_t l = 0; l < n; ++l) {
        const auto& sl = cfg.spirals[l];
        Vec2 dir = mh_dirichlet_reg(sl.position, sl.position, kappa, cfg.dom, cfg.trunc).grad;
        Vec2 pair_sum = Vec2::Zero();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == l) continue;
            pair_sum += cfg.spirals[j].winding *
                        mh_dirichlet_grad(sl.position, cfg.spirals[j].position, kappa, cfg.dom, cfg.trunc).grad;
        }
        v[l] -= 4 * kPi * cfg.q * cot * (dir + pair_sum / sl.winding);
    }
    return v;
}

Velocities velocity_uniform(const SpiralConfigurationParams& cfg, double eps) {
    const WavenumberSolution sol = solve_canonical(cfg);
    return velocity_uniform(cfg, eps, sol.k, sol.beta);
}

Velocities velocity_near_field_bcorrected(const SpiralList& spirals, double q, double eps, const RectDomain& dom,
                                          double btilde, const ImageTruncation& trunc) {
    if (!(btilde >= 0)) throw ValidationError("btilde must be non-negative");
    Velocities v = velocity_near_field(spirals, q, eps, dom, trunc);
    for (std::size_t l = 0; l < spirals.size(); ++l) {
        const double theta = q * spirals[l].winding * std::log(eps);
        const double c = std::cos(theta), s = std::sin(theta);
        // The near-field velocity is cot(theta) W with W the scaled perpendicular
        // gradient of the regular outer phase; -perp(W) is the matching gradient.
        const Vec2 w = std::tan(theta) * v[l];
        const Vec2 grad = -perp(w);
        v[l] = c / (btilde * btilde * c * c + s * s) * (btilde * c * grad + s * w);
    }
    return v;
}

LawEvaluator::Frozen LawEvaluator::refresh(const SpiralList& spirals) {
    Frozen fr;
    fr.eps = eval_epsilon({spirals, 0}, model_.dom, model_.policy);
    if (model_.law == Law::canonical || model_.law == Law::uniform) {
        const SpiralConfigurationParams cfg = model_.config(spirals);
        const WavenumberSolution sol = k_prev_ > 0 ? solve_canonical_near(cfg, k_prev_) : solve_canonical(cfg);
        k_prev_ = sol.k;
        fr.k = sol.k;
        fr.beta = sol.beta;
    }
    return fr;
}

Velocities LawEvaluator::velocity(const SpiralList& spirals, const Frozen& fr) const {
    switch (model_.law) {
        case Law::canonical:
            return velocity_canonical(model_.config(spirals), fr.k, fr.beta);
        case Law::uniform:
            return velocity_uniform(model_.config(spirals), fr.eps, fr.k, fr.beta);
        case Law::near_field:
            return velocity_near_field(spirals, model_.q, fr.eps, model_.dom);
        case Law::b_corrected:
            return velocity_near_field_bcorrected(spirals, model_.q, fr.eps, model_.dom, model_.btilde);
    }
    return {};
}

std::optional<Termination> check_contact(const SpiralList& spirals, const RectDomain& dom) {
    for (std::size_t i = 0; i < spirals.size(); ++i) {
        if (!spirals[i].position.allFinite() || dom.wall_distance(spirals[i].position) < kMinSeparation)
            return Termination::wall_contact;
        for (std::size_t j = 0; j < i; ++j)
            if ((spirals[i].position - spirals[j].position).norm() < kMinSeparation) return Termination::collision;
    }
    return std::nullopt;
}

SpiralList rk4_step(LawEvaluator& law, const SpiralList& spirals, const LawEvaluator::Frozen& frozen, double h) {
    const auto n = spirals.size();
    auto shifted = [&](const Velocities& k, double a) {
        SpiralList s = spirals;
        for (std::size_t i = 0; i < n; ++i) s[i].position += a * k[i];
        return s;
    };
    const Velocities k1 = law.velocity(spirals, frozen);
    const Velocities k2 = law.velocity(shifted(k1, h / 2));
    const Velocities k3 = law.velocity(shifted(k2, h / 2));
    const Velocities k4 = law.velocity(shifted(k3, h));
    SpiralList out = spirals;
    for (std::size_t i = 0; i < n; ++i) out[i].position += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

namespace {

TrajectoryRecord integrate_fixed(const SpiralState& state0, const MotionModel& model, double t_end,
                                 const StepControl& ctrl, double h) {
    TrajectoryRecord rec;
    rec.step = h;
    const double dir = t_end >= state0.t ? 1.0 : -1.0;
    LawEvaluator law(model);
    SpiralList s = state0.spirals;
    double t = state0.t;
    long step_index = 0;
    auto record = [&](const LawEvaluator::Frozen& fr) {
        rec.times.push_back(t);
        rec.positions.push_back(positions_of(s));
        rec.k_series.push_back(fr.k);
        rec.eps_series.push_back(fr.eps);
    };
    auto remaining = [&] { return dir * (t_end - t); };
    while (true) {
        LawEvaluator::Frozen fr;
        try {
            fr = law.refresh(s);
        } catch (const std::exception& e) {
            rec.termination = Termination::k_solve_failure;
            rec.message = e.what();
            break;
        }
        const bool done = remaining() <= 1e-12 * std::max(1.0, std::abs(t_end));
        if (done || step_index % ctrl.record_stride == 0) record(fr);
        if (done) {
            rec.termination = Termination::t_max;
            break;
        }
        double step = std::min(h, remaining());
        try {
            if (ctrl.max_displacement > 0) {
                double vmax = 0;
                for (const Vec2& v : law.velocity(s, fr)) vmax = std::max(vmax, v.norm());
                if (vmax > 0) step = std::min(step, ctrl.max_displacement / vmax);
            }
            s = rk4_step(law, s, fr, dir * step);
        } catch (const ValidationError& e) {
            rec.termination = Termination::wall_contact;
            rec.message = e.what();
            break;
        } catch (const NumericalError& e) {
            rec.termination = Termination::k_solve_failure;
            rec.message = e.what();
            break;
        }
        t += dir * step;
        ++step_index;
        if (auto c = check_contact(s, model.dom)) {
            if (rec.times.empty() || rec.times.back() != t) {
                rec.times.push_back(t);
                rec.positions.push_back(positions_of(s));
                rec.k_series.push_back(fr.k);
                rec.eps_series.push_back(fr.eps);
            }
            rec.termination = *c;
            break;
        }
    }
    return rec;
}

double final_gap(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    if (a.positions.empty() || b.positions.empty()) return INFINITY;
    if (a.termination != b.termination || std::abs(a.times.back() - b.times.back()) > 1e-9) return INFINITY;
    double gap = 0;
    for (std::size_t i = 0; i < a.positions.back().size(); ++i)
        gap = std::max(gap, (a.positions.back()[i] - b.positions.back()[i]).norm());
    return gap;
}

}  // namespace

TrajectoryRecord integrate(const SpiralState& state0, const MotionModel& model, double t_end, const StepControl& ctrl) {
    model.config(state0.spirals).validate();
    if (t_end == state0.t) throw ValidationError("integration span is empty");
    if (!(ctrl.h > 0)) throw ValidationError("step size must be positive");
    if (ctrl.record_stride < 1) throw ValidationError("record stride must be >= 1");
    double h = ctrl.h;
    TrajectoryRecord coarse = integrate_fixed(state0, model, t_end, ctrl, h);
    if (!ctrl.refine) return coarse;
    const double tol = ctrl.refine_tol * std::max(1.0, std::abs(t_end - state0.t) / 100);
    for (int i = 1; i <= ctrl.max_halvings; ++i) {
        h /= 2;
        StepControl finer = ctrl;
        finer.record_stride = ctrl.record_stride * (1 << i);
        TrajectoryRecord fine = integrate_fixed(state0, model, t_end, finer, h);
        fine.halvings = i;
        if (final_gap(coarse, fine) < tol) return fine;
        coarse = std::move(fine);
    }
    coarse.message += (coarse.message.empty() ? "" : "; ") + std::string("step refinement did not reach tolerance");
    return coarse;
}

}  // namespace spiralwave
