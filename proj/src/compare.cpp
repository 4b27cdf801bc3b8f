#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spiralwave/harness.hpp"

namespace spiralwave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const Vec2 kNaNVec(kNaN, kNaN);

// Linear interpolation of a vector-valued series at t; NaN outside [t0, tn].
Vec2 interp(const std::vector<double>& ts, const std::vector<Vec2>& ys, double t) {
    if (ts.empty() || t < ts.front() - 1e-9 || t > ts.back() + 1e-9) return kNaNVec;
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it == ts.end()) return ys.back();
    const auto i = static_cast<std::size_t>(it - ts.begin());
    if (*it == t || i == 0) return ys[i];
    const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return (1 - w) * ys[i - 1] + w * ys[i];
}

double mean_spacing(const std::vector<double>& ts) {
    if (ts.size() < 2) return std::numeric_limits<double>::infinity();
    return (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
}

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

// Asymptotic record as ascending-time series per spiral.
struct Series {
    std::vector<double> t;
    std::vector<std::vector<Vec2>> pos;  // [spiral][sample]
};

Series ascending(const TrajectoryRecord& back, const TrajectoryRecord* fwd, std::size_t n) {
    Series s;
    s.pos.resize(n);
    for (std::size_t i = back.times.size(); i-- > 0;) {
        s.t.push_back(back.times[i]);
        for (std::size_t l = 0; l < n; ++l) s.pos[l].push_back(back.positions[i][l]);
    }
    if (fwd)
        for (std::size_t i = 0; i < fwd->times.size(); ++i) {
            if (!s.t.empty() && fwd->times[i] <= s.t.back()) continue;
            s.t.push_back(fwd->times[i]);
            for (std::size_t l = 0; l < n; ++l) s.pos[l].push_back(fwd->positions[i][l]);
        }
    return s;
}

}  // namespace

double anchor_level(const Vec2& p, const RectDomain& dom) {
    const double r = 0.45 * (dom.lx + dom.ly) / 2;
    return std::pow(p.x() - dom.lx / 2, 4) + std::pow(p.y() - dom.ly / 2, 4) - std::pow(r, 4);
}

ComparisonReport compare_with_simulation(const ExperimentConfig& cfg, const SimulationResult& sim) {
    if (sim.snapshots.empty()) throw ValidationError("simulation produced no snapshots");
    const std::size_t n = cfg.spirals.size();
    ComparisonReport rep;
    rep.transient_cutoff = cfg.transient;
    rep.events = sim.tracks.events;

    // Track that starts at the first snapshot nearest to each seeded spiral.
    const double t_first = sim.snapshots.front().t;
    std::vector<const Track*> tracks(n, nullptr);
    for (std::size_t l = 0; l < n; ++l) {
        double best = 3.0;
        for (const Track& tr : sim.tracks.tracks) {
            if (tr.times.front() != t_first || tr.winding != cfg.spirals[l].winding) continue;
            const double d = (tr.positions.front() - cfg.spirals[l].position).norm();
            if (d < best) {
                best = d;
                tracks[l] = &tr;
            }
        }
        if (!tracks[l]) {
            std::ostringstream os;
            os << "seeded spiral " << l << " was not detected at t = " << t_first;
            throw NumericalError(os.str());
        }
    }
    double t_last = tracks[0]->times.back();
    for (const Track* tr : tracks) t_last = std::min(t_last, tr->times.back());
    for (double t : tracks[0]->times)
        if (t <= t_last) rep.numerical_times.push_back(t);
    rep.numerical_tracks.assign(n, {});
    for (std::size_t l = 0; l < n; ++l)
        for (double t : rep.numerical_times)
            rep.numerical_tracks[l].push_back(interp(tracks[l]->times, tracks[l]->positions, t));
    const auto& nt = rep.numerical_times;
    if (nt.size() < 2) throw NumericalError("numerical track too short to compare");

    // Anchor on the first crossing of the closed curve by the first spiral.
    const MotionModel model = cfg.motion_model();
    StepControl ctrl;
    ctrl.h = cfg.step;
    ctrl.refine = cfg.refine;
    std::optional<std::size_t> cross;
    for (std::size_t i = 1; i < nt.size() && !cross; ++i) {
        const double a = anchor_level(rep.numerical_tracks[0][i - 1], cfg.dom);
        const double b = anchor_level(rep.numerical_tracks[0][i], cfg.dom);
        if ((a < 0) != (b < 0)) cross = i;
    }
    SpiralList anchor = cfg.spirals;
    Series asym;
    if (cross) {
        const std::size_t i = *cross;
        const double a = anchor_level(rep.numerical_tracks[0][i - 1], cfg.dom);
        const double b = anchor_level(rep.numerical_tracks[0][i], cfg.dom);
        const double w = a / (a - b);
        rep.anchor_kind = "backward";
        rep.anchor_t = nt[i - 1] + w * (nt[i] - nt[i - 1]);
        for (std::size_t l = 0; l < n; ++l)
            anchor[l].position = (1 - w) * rep.numerical_tracks[l][i - 1] + w * rep.numerical_tracks[l][i];
        const TrajectoryRecord back = integrate({anchor, rep.anchor_t}, model, nt.front(), ctrl);
        rep.asymptotic = back;
        if (nt.back() > rep.anchor_t) {
            const TrajectoryRecord fwd = integrate({anchor, rep.anchor_t}, model, nt.back(), ctrl);
            asym = ascending(back, &fwd, n);
            rep.asymptotic.message += fwd.message.empty() ? "" : ("; forward: " + fwd.message);
        } else {
            asym = ascending(back, nullptr, n);
        }
    } else {
        auto it = std::lower_bound(nt.begin(), nt.end(), cfg.transient);
        if (it == nt.end() || std::next(it) == nt.end())
            throw NumericalError("numerical track ends before the transient cutoff");
        const auto i = static_cast<std::size_t>(it - nt.begin());
        rep.anchor_kind = "forward";
        rep.anchor_t = nt[i];
        for (std::size_t l = 0; l < n; ++l) anchor[l].position = rep.numerical_tracks[l][i];
        rep.asymptotic = integrate({anchor, rep.anchor_t}, model, nt.back(), ctrl);
        TrajectoryRecord none;
        asym = ascending(none, &rep.asymptotic, n);
    }
    for (std::size_t l = 0; l < n; ++l) rep.anchor_positions.push_back(anchor[l].position);

    // Smoothed numerical velocity on the track's own samples.
    std::vector<VelocitySeries> vel(n);
    for (std::size_t l = 0; l < n; ++l) {
        try {
            vel[l] = estimate_velocity(nt, rep.numerical_tracks[l], cfg.velocity_window);
        } catch (const ValidationError&) {
        }
    }

    // Sample on the sparser series over the common time range.
    const bool numerical_sparser = mean_spacing(nt) >= mean_spacing(asym.t);
    const std::vector<double>& base = numerical_sparser ? nt : asym.t;
    const double lo = std::max(nt.front(), asym.t.empty() ? kNaN : asym.t.front());
    const double hi = std::min(nt.back(), asym.t.empty() ? kNaN : asym.t.back());
    rep.resampling = numerical_sparser ? "asymptotic series linearly interpolated onto the numerical snapshot times"
                                       : "numerical series linearly interpolated onto the asymptotic step times";
    LawEvaluator law(model);
    for (double t : base) {
        if (!(t >= lo - 1e-9 && t <= hi + 1e-9)) continue;
        ComparisonSample smp;
        smp.t = t;
        SpiralList at = cfg.spirals;
        for (std::size_t l = 0; l < n; ++l) {
            smp.numerical.push_back(interp(nt, rep.numerical_tracks[l], t));
            smp.asymptotic.push_back(interp(asym.t, asym.pos[l], t));
            smp.numerical_velocity.push_back(interp(vel[l].times, vel[l].velocity, t));
            at[l].position = smp.numerical.back();
        }
        try {
            smp.law_velocity = law.velocity(at);
        } catch (const std::exception&) {
            smp.law_velocity.assign(n, kNaNVec);
        }
        rep.samples.push_back(std::move(smp));
    }

    double dev2 = 0, speed2 = 0, div2 = 0;
    long n_vel = 0, n_div = 0;
    for (const auto& s : rep.samples) {
        for (std::size_t l = 0; l < n; ++l) {
            if (finite(s.asymptotic[l])) {
                const double d = (s.asymptotic[l] - s.numerical[l]).norm();
                div2 += d * d;
                rep.max_divergence = std::max(rep.max_divergence, d);
                ++n_div;
            }
            if (s.t > cfg.transient && finite(s.numerical_velocity[l]) && finite(s.law_velocity[l])) {
                dev2 += (s.numerical_velocity[l] - s.law_velocity[l]).squaredNorm();
                speed2 += s.numerical_velocity[l].squaredNorm();
                ++n_vel;
            }
        }
    }
    rep.rms_divergence = n_div ? std::sqrt(div2 / n_div) : kNaN;
    rep.rms_velocity_deviation = n_vel ? std::sqrt(dev2 / n_vel) : kNaN;
    rep.rms_numerical_speed = n_vel ? std::sqrt(speed2 / n_vel) : kNaN;
    rep.relative_velocity_deviation = n_vel ? rep.rms_velocity_deviation / rep.rms_numerical_speed : kNaN;

    const Vec2 centre = cfg.dom.center();
    if (n == 2) {
        const double dx = cfg.sim ? cfg.sim->dx : 1.0;
        for (std::size_t i = 0; i < nt.size(); ++i)
            rep.symmetry_violation =
                std::max(rep.symmetry_violation,
                         (rep.numerical_tracks[0][i] + rep.numerical_tracks[1][i] - 2 * centre).norm() / dx);
    }

    // Half turn of the first spiral about the centre, measured on the numerical track.
    if (!rep.samples.empty()) {
        auto angle = [&](const Vec2& p) { return std::atan2(p.y() - centre.y(), p.x() - centre.x()); };
        double num = 0, asy = 0;
        double prev_n = angle(rep.samples.front().numerical[0]), prev_a = angle(rep.samples.front().asymptotic[0]);
        for (const auto& s : rep.samples) {
            if (!finite(s.asymptotic[0])) break;
            const double an = angle(s.numerical[0]), aa = angle(s.asymptotic[0]);
            num += std::remainder(an - prev_n, 2 * std::numbers::pi);
            asy += std::remainder(aa - prev_a, 2 * std::numbers::pi);
            prev_n = an;
            prev_a = aa;
            if (std::abs(num) >= std::numbers::pi) {
                rep.half_turn_t = s.t;
                rep.rotation_sense_numerical = num > 0 ? 1 : -1;
                rep.rotation_sense_asymptotic = asy > 0 ? 1 : (asy < 0 ? -1 : 0);
                rep.half_turn_angle_gap_deg =
                    std::abs(std::remainder(an - aa, 2 * std::numbers::pi)) * 180 / std::numbers::pi;
                break;
            }
        }
    }
    return rep;
}

ComparisonReport run_compare(const ExperimentConfig& cfg, const SimulationHooks& hooks) {
    if (!cfg.sim) throw ValidationError("comparison requires sim params");
    if (cfg.spirals.empty()) throw ValidationError("comparison requires at least one spiral");
    cfg.validate();
    SimParams params = *cfg.sim;
    params.q = cfg.q;
    params.c1 = cfg.resolved_c1();
    const SimulationResult sim = run_simulation(cfg.spirals, cfg.dom, params, hooks);
    return compare_with_simulation(cfg, sim);
}

}  // namespace spiralwave
