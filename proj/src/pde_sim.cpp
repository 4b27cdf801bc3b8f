#include "spiralwave/pde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "spiralwave/core_profile.hpp"
#include "spiralwave/greens_rect.hpp"

namespace spiralwave {

namespace {
constexpr double kPi = std::numbers::pi;
}

FieldGrid::FieldGrid(const RectDomain& dom, double dx_) : dx(dx_) {
    if (!(dx > 0)) throw ValidationError("grid spacing must be positive");
    const double fx = dom.lx / dx, fy = dom.ly / dx;
    nx = static_cast<int>(std::lround(fx));
    ny = static_cast<int>(std::lround(fy));
    if (std::abs(fx - nx) > 1e-9 * fx || std::abs(fy - ny) > 1e-9 * fy)
        throw ValidationError("domain sides must be integer multiples of dx");
    if (nx < 4 || ny < 4) throw ValidationError("grid needs at least 4 nodes per side");
    re = FieldArray::Zero(ny, nx);
    im = FieldArray::Zero(ny, nx);
}

std::string to_string(PhaseSeed s) {
    switch (s) {
        case PhaseSeed::automatic:
            return "auto";
        case PhaseSeed::near_field:
            return "near_field";
        case PhaseSeed::near_field_lattice:
            return "near_field_lattice";
        case PhaseSeed::canonical:
            return "canonical";
    }
    return "?";
}

PhaseSeed parse_phase_seed(const std::string& s) {
    if (s == "auto") return PhaseSeed::automatic;
    if (s == "near_field") return PhaseSeed::near_field;
    if (s == "near_field_lattice") return PhaseSeed::near_field_lattice;
    if (s == "canonical") return PhaseSeed::canonical;
    throw ValidationError("unknown phase seed '" + s + "'");
}

void SimParams::validate() const {
    if (!(q >= 0 && q < 1)) throw ValidationError("q must lie in [0,1)");
    if (!(dx > 0)) throw ValidationError("dx must be positive");
    if (dt < 0) throw ValidationError("dt must be non-negative");
    if (timestep() > dx * dx / 20 * (1 + 1e-12)) throw ValidationError("dt exceeds the stable limit dx^2/20");
    if (!(t_end > 0)) throw ValidationError("t_end must be positive");
    if (snapshot_steps < 1) throw ValidationError("snapshot_steps must be >= 1");
    if (!(seed_eps > 0 && seed_eps < 1)) throw ValidationError("seed_eps must lie in (0,1)");
    if (!(detect_threshold > 0 && detect_threshold < 1)) throw ValidationError("detect threshold must lie in (0,1)");
}

PhaseSeed resolve_phase_seed(PhaseSeed requested, double q, std::size_t n_spirals) {
    if (requested != PhaseSeed::automatic) return requested;
    // Single spirals switch between 0.3 and 0.35, pairs between 0.2 and 0.25.
    const double switch_q = n_spirals <= 1 ? 0.325 : 0.225;
    return q < switch_q ? PhaseSeed::near_field : PhaseSeed::canonical;
}

double laplace_neumann_value(const Vec2& x, const Vec2& xi, const RectDomain& dom) {
    const double Lx = dom.lx, Ly = dom.ly;
    const double a = kPi * x.x() / Lx, b = kPi * xi.x() / Lx;
    const double y = x.y(), eta = xi.y();
    const double d = std::abs(y - eta), s = y + eta;
    // Mean-free mode of the cosine expansion.
    double g = (-(y * y + eta * eta) / (2 * Ly) + std::max(y, eta)) / Lx;
    // Slowly converging exponentials of every mode, summed in closed form.
    auto log_pair = [&](double t) {
        const double e = std::exp(-kPi * t / Lx);
        const double l1 = std::max(1 - 2 * e * std::cos(a - b) + e * e, 1e-300);
        const double l2 = std::max(1 - 2 * e * std::cos(a + b) + e * e, 1e-300);
        return (std::log(l1) + std::log(l2)) / (4 * kPi);
    };
    g += log_pair(d) + log_pair(s) + log_pair(2 * Ly - s);
    // Remaining part of each mode decays at least like exp(-p pi Ly / Lx).
    for (int p = 1; p < 100000; ++p) {
        const double mu = p * kPi / Lx;
        const double r = std::exp(-2 * mu * Ly);
        const double e_far = std::exp(-mu * (2 * Ly - d));
        const double all = std::exp(-mu * d) + std::exp(-mu * s) + std::exp(-mu * (2 * Ly - s)) + e_far;
        const double rem = -(e_far + all * r / (1 - r)) / (2 * mu);
        const double term = 2 / Lx * std::cos(p * a) * std::cos(p * b) * rem;
        g += term;
        if (std::abs(rem) < 1e-18) break;
    }
    return g;
}

namespace {

double wrap(double a) { return std::remainder(a, 2 * kPi); }

}  // namespace

FieldArray seed_phase(const SpiralList& spirals, const RectDomain& dom, const SimParams& params) {
    FieldGrid grid(dom, params.dx);
    FieldArray phase = FieldArray::Zero(grid.ny, grid.nx);
    const PhaseSeed mode = resolve_phase_seed(params.phase_seed, params.q, spirals.size());

    if (mode == PhaseSeed::canonical) {
        if (!(params.q > 0)) throw ValidationError("canonical phase seed needs q > 0");
        SpiralConfigurationParams cfg;
        cfg.spirals = spirals;
        cfg.q = params.q;
        cfg.dom = dom;
        cfg.c1 = params.c1 != 0 ? params.c1 : default_core_profile().c1;
        const WavenumberSolution sol = solve_canonical(cfg);
        const double kappa = params.q * sol.k;
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const Vec2 p = grid.node(i, j);
                double h0 = 0, angle = 0;
                for (std::size_t s = 0; s < spirals.size(); ++s) {
                    Vec2 src = spirals[s].position;
                    if ((p - src).norm() < 1e-9) src.x() += 1e-9;
                    h0 -= 2 * kPi * sol.beta[static_cast<Eigen::Index>(s)] *
                          mh_neumann_value(p, src, kappa, dom, cfg.trunc);
                    angle += spirals[s].winding * std::atan2(p.y() - src.y(), p.x() - src.x());
                }
                if (!(h0 > 0)) {
                    std::ostringstream os;
                    os << "canonical phase seed has h0 = " << h0 << " <= 0 at (" << p.x() << "," << p.y()
                       << "); the canonical regime does not apply";
                    throw NumericalError(os.str());
                }
                phase(j, i) = angle + std::log(h0) / params.q;
            }
    } else {
        const double theta = params.q * std::log(1 / params.seed_eps);
        if (theta >= kPi / 2) throw ValidationError("near-field phase seed needs q log(1/eps) < pi/2");
        const double c2 = -std::tan(theta);
        const int lattice = 4;
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const Vec2 p = grid.node(i, j);
                double v = 0;
                for (const auto& sp : spirals) {
                    const auto fam = detail::reflections<double>(sp.position);
                    for (int f = 0; f < 4; ++f) {
                        const int parity = detail::kDirichletParity[f];
                        for (int n = -lattice; n <= lattice; ++n)
                            for (int m = -lattice; m <= lattice; ++m) {
                                const double dx = p.x() - fam[f].x() + 2 * dom.lx * n;
                                const double dy = p.y() - fam[f].y() + 2 * dom.ly * m;
                                v += parity * sp.winding * std::atan2(dy, dx);
                                if (mode == PhaseSeed::near_field_lattice)
                                    v += c2 * 0.5 * std::log(std::max(dx * dx + dy * dy, 1e-300));
                            }
                    }
                    if (mode == PhaseSeed::near_field) v += c2 * 2 * kPi * laplace_neumann_value(p, sp.position, dom);
                }
                phase(j, i) = v;
            }
        phase -= phase.mean();
    }
    return phase;
}

FieldGrid seed_field(const SpiralList& spirals, const RectDomain& dom, const SimParams& params) {
    params.validate();
    for (const auto& s : spirals)
        if (!dom.interior(s.position)) throw ValidationError("seeded spiral outside the domain");
    FieldGrid grid(dom, params.dx);
    const FieldArray phase = seed_phase(spirals, dom, params);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const Vec2 p = grid.node(i, j);
            double mod = 1;
            for (const auto& s : spirals) mod *= std::tanh(kCoreSlope * (p - s.position).norm());
            grid.re(j, i) = mod * std::cos(phase(j, i));
            grid.im(j, i) = mod * std::sin(phase(j, i));
        }
    return grid;
}

FieldArray laplacian9(const FieldArray& u, double dx) {
    const auto ny = static_cast<int>(u.rows()), nx = static_cast<int>(u.cols());
    FieldArray out(ny, nx);
    const double inv = 1 / (dx * dx);
    for (int j = 0; j < ny; ++j) {
        const int jm = std::max(j - 1, 0), jp = std::min(j + 1, ny - 1);
        for (int i = 0; i < nx; ++i) {
            const int im = std::max(i - 1, 0), ip = std::min(i + 1, nx - 1);
            const double edge = u(jm, i) + u(jp, i) + u(j, im) + u(j, ip);
            const double diag = u(jm, im) + u(jm, ip) + u(jp, im) + u(jp, ip);
            out(j, i) = (2.0 / 3.0 * edge + 1.0 / 6.0 * diag - 10.0 / 3.0 * u(j, i)) * inv;
        }
    }
    return out;
}

namespace {

// Updates one row: c = current row, n/s = neighbour rows (already mirrored).
inline void update_row(const double* __restrict rn, const double* __restrict rc, const double* __restrict rs,
                       const double* __restrict in, const double* __restrict ic, const double* __restrict is,
                       double* __restrict ro, double* __restrict io, int nx, double inv, double dt, double q) {
    auto cell = [&](int i, int im, int ip) {
        const double le = 2.0 / 3.0 * (rn[i] + rs[i] + rc[im] + rc[ip]) +
                          1.0 / 6.0 * (rn[im] + rn[ip] + rs[im] + rs[ip]) - 10.0 / 3.0 * rc[i];
        const double li = 2.0 / 3.0 * (in[i] + is[i] + ic[im] + ic[ip]) +
                          1.0 / 6.0 * (in[im] + in[ip] + is[im] + is[ip]) - 10.0 / 3.0 * ic[i];
        const double a = rc[i], b = ic[i];
        const double g = 1 - (a * a + b * b);
        ro[i] = a + dt * (g * (a - q * b) + le * inv);
        io[i] = b + dt * (g * (b + q * a) + li * inv);
    };
    cell(0, 0, 1);
    for (int i = 1; i < nx - 1; ++i) cell(i, i - 1, i + 1);
    cell(nx - 1, nx - 2, nx - 1);
}

void step_into(const FieldGrid& g, FieldArray& re_out, FieldArray& im_out, double dt, double q) {
    const int nx = g.nx, ny = g.ny;
    const double inv = 1 / (g.dx * g.dx);
    for (int j = 0; j < ny; ++j) {
        const int jm = std::max(j - 1, 0), jp = std::min(j + 1, ny - 1);
        update_row(g.re.row(jp).data(), g.re.row(j).data(), g.re.row(jm).data(), g.im.row(jp).data(),
                   g.im.row(j).data(), g.im.row(jm).data(), re_out.row(j).data(), im_out.row(j).data(), nx, inv, dt, q);
    }
}

}  // namespace

void step(FieldGrid& grid, const SimParams& params) {
    FieldArray re(grid.ny, grid.nx), im(grid.ny, grid.nx);
    step_into(grid, re, im, params.timestep(), params.q);
    grid.re.swap(re);
    grid.im.swap(im);
    grid.t += params.timestep();
}

std::vector<SpiralObservation> detect_spirals(const FieldGrid& grid, double threshold) {
    std::vector<SpiralObservation> out;
    const FieldArray mod2 = grid.re.square() + grid.im.square();
    const double thr2 = threshold * threshold;
    // Least-squares quadratic on the 3x3 patch, offsets u,v in {-1,0,1}:
    // f = c0 + c1 u + c2 v + c3 u^2 + c4 u v + c5 v^2.
    for (int j = 1; j < grid.ny - 1; ++j)
        for (int i = 1; i < grid.nx - 1; ++i) {
            const double c = mod2(j, i);
            if (!(c < thr2)) continue;
            bool minimum = true;
            for (int dj = -1; dj <= 1 && minimum; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const double o = mod2(j + dj, i + di);
                    // Ties broken towards the lower-left so each plateau yields one minimum.
                    if (o < c || (o == c && (dj < 0 || (dj == 0 && di < 0)))) {
                        minimum = false;
                        break;
                    }
                }
            if (!minimum) continue;
            double su = 0, sv = 0, suu = 0, suv = 0, svv = 0, s0 = 0;
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const double f = mod2(j + dj, i + di);
                    s0 += f;
                    su += di * f;
                    sv += dj * f;
                    suu += di * di * f;
                    svv += dj * dj * f;
                    suv += di * dj * f;
                }
            // Closed-form normal equations for the symmetric 3x3 design.
            const double c1 = su / 6, c2 = sv / 6, c4 = suv / 4;
            const double c3 = suu / 2 - s0 / 3, c5 = svv / 2 - s0 / 3;
            SpiralObservation obs;
            obs.min_modulus = std::sqrt(c);
            const double det = 4 * c3 * c5 - c4 * c4;
            Vec2 off(0, 0);
            if (det > 0 && c3 > 0) {
                off.x() = (-2 * c5 * c1 + c4 * c2) / det;
                off.y() = (-2 * c3 * c2 + c4 * c1) / det;
                off = off.cwiseMax(-0.5).cwiseMin(0.5);
                // Winding from the ring of eight neighbours (four cells around the node).
                static constexpr int ring[8][2] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                                                   {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
                double circ = 0;
                for (int k = 0; k < 8; ++k) {
                    const auto& a = ring[k];
                    const auto& b = ring[(k + 1) % 8];
                    const double pa = std::atan2(grid.im(j + a[1], i + a[0]), grid.re(j + a[1], i + a[0]));
                    const double pb = std::atan2(grid.im(j + b[1], i + b[0]), grid.re(j + b[1], i + b[0]));
                    circ += wrap(pb - pa);
                }
                obs.winding = static_cast<int>(std::lround(circ / (2 * kPi)));
            }
            obs.position = grid.node(i, j) + grid.dx * off;
            out.push_back(obs);
        }
    return out;
}

TrackSet track(const std::vector<Snapshot>& snapshots, double max_jump, double ambiguity_radius) {
    TrackSet set;
    std::vector<std::size_t> active;
    for (std::size_t s = 0; s < snapshots.size(); ++s) {
        const auto& snap = snapshots[s];
        std::vector<const SpiralObservation*> obs;
        for (const auto& o : snap.spirals)
            if (o.winding != 0) obs.push_back(&o);
        std::vector<bool> used(obs.size(), false);
        std::vector<std::size_t> still_active;
        // Candidate pairs sorted by distance, greedy assignment.
        struct Cand {
            double d;
            std::size_t track, obs;
        };
        std::vector<Cand> cands;
        for (std::size_t a : active)
            for (std::size_t o = 0; o < obs.size(); ++o) {
                const Track& tr = set.tracks[a];
                if (obs[o]->winding != tr.winding) continue;
                const double d = (obs[o]->position - tr.positions.back()).norm();
                if (d <= max_jump) cands.push_back({d, a, o});
            }
        std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.d < y.d; });
        std::vector<bool> matched(set.tracks.size(), false);
        for (const Cand& c : cands) {
            if (matched[c.track] || used[c.obs]) continue;
            // A second free candidate almost as close makes the match ambiguous.
            bool ambiguous = false;
            for (const Cand& other : cands)
                if (other.track == c.track && other.obs != c.obs && !used[other.obs] &&
                    (obs[other.obs]->position - obs[c.obs]->position).norm() < ambiguity_radius)
                    ambiguous = true;
            if (ambiguous) {
                set.events.push_back({snap.t, set.tracks[c.track].id, "ambiguous"});
                matched[c.track] = true;
                continue;
            }
            Track& tr = set.tracks[c.track];
            tr.times.push_back(snap.t);
            tr.positions.push_back(obs[c.obs]->position);
            tr.min_modulus.push_back(obs[c.obs]->min_modulus);
            matched[c.track] = true;
            used[c.obs] = true;
        }
        for (std::size_t a : active) {
            if (matched[a]) {
                still_active.push_back(a);
            } else {
                set.tracks[a].ended = true;
                set.events.push_back({snap.t, set.tracks[a].id, "death"});
            }
        }
        for (std::size_t o = 0; o < obs.size(); ++o) {
            if (used[o]) continue;
            Track tr;
            tr.id = static_cast<int>(set.tracks.size());
            tr.winding = obs[o]->winding;
            tr.times.push_back(snap.t);
            tr.positions.push_back(obs[o]->position);
            tr.min_modulus.push_back(obs[o]->min_modulus);
            if (s > 0) set.events.push_back({snap.t, tr.id, "birth"});
            still_active.push_back(set.tracks.size());
            set.tracks.push_back(std::move(tr));
        }
        active = std::move(still_active);
    }
    return set;
}

VelocitySeries estimate_velocity(const std::vector<double>& times, const std::vector<Vec2>& positions, int window) {
    if (times.size() != positions.size()) throw ValidationError("times and positions differ in length");
    if (window < 3) throw ValidationError("smoothing window must be >= 3");
    const int n = static_cast<int>(times.size());
    if (n <= window + 2) throw ValidationError("track too short for the smoothing window");
    std::vector<Vec2> raw(n, Vec2::Zero());
    for (int i = 1; i < n - 1; ++i) raw[i] = (positions[i + 1] - positions[i - 1]) / (times[i + 1] - times[i - 1]);
    const int half = window / 2;
    VelocitySeries out;
    for (int i = 1 + half; i + half <= n - 2 - (window % 2 == 0 ? 1 : 0); ++i) {
        Vec2 acc = Vec2::Zero();
        for (int k = i - half; k < i - half + window; ++k) acc += raw[k];
        out.times.push_back(window % 2 == 0 ? 0.5 * (times[i] + times[i + 1]) : times[i]);
        out.velocity.push_back(acc / window);
    }
    return out;
}

double measure_rotation_rate(const std::vector<double>& times, const std::vector<std::complex<double>>& samples) {
    if (times.size() != samples.size() || times.size() < 2) throw ValidationError("need at least two phase samples");
    const std::size_t n = times.size();
    std::vector<double> ph(n);
    ph[0] = std::arg(samples[0]);
    for (std::size_t i = 1; i < n; ++i) ph[i] = ph[i - 1] + wrap(std::arg(samples[i]) - std::arg(samples[i - 1]));
    double mt = 0, mp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += times[i];
        mp += ph[i];
    }
    mt /= n;
    mp /= n;
    double stt = 0, stp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        stt += (times[i] - mt) * (times[i] - mt);
        stp += (times[i] - mt) * (ph[i] - mp);
    }
    if (!(stt > 0)) throw ValidationError("phase samples span no time");
    return stp / stt;
}

double measure_rotation_rate(const std::vector<double>& times, const std::vector<std::complex<double>>& samples,
                             const Vec2& probe, const std::vector<Vec2>& cores, const RectDomain& dom,
                             double min_periods) {
    if (dom.wall_distance(probe) < 20) throw ValidationError("probe closer than 20 to a wall");
    for (const Vec2& c : cores)
        if ((c - probe).norm() < 20) throw ValidationError("probe closer than 20 to a spiral core");
    const double omega = measure_rotation_rate(times, samples);
    if (min_periods > 0) {
        const double span = times.back() - times.front();
        if (std::abs(omega) * span < 2 * kPi * min_periods) {
            std::ostringstream os;
            os << "insufficient span: " << std::abs(omega) * span / (2 * kPi) << " periods recorded, " << min_periods
               << " required";
            throw ValidationError(os.str());
        }
    }
    return omega;
}

std::complex<double> sample_field(const FieldGrid& grid, const Vec2& p) {
    const double fx = std::clamp(p.x() / grid.dx - 0.5, 0.0, grid.nx - 1.0);
    const double fy = std::clamp(p.y() / grid.dx - 0.5, 0.0, grid.ny - 1.0);
    const int i = std::min(static_cast<int>(fx), grid.nx - 2), j = std::min(static_cast<int>(fy), grid.ny - 2);
    const double u = fx - i, v = fy - j;
    auto at = [&](int a, int b) { return grid.at(a, b); };
    return (1 - u) * (1 - v) * at(i, j) + u * (1 - v) * at(i + 1, j) + (1 - u) * v * at(i, j + 1) +
           u * v * at(i + 1, j + 1);
}

SimulationResult run_simulation(const SpiralList& spirals, const RectDomain& dom, const SimParams& params,
                                const SimulationHooks& hooks) {
    params.validate();
    SimulationResult res;
    FieldGrid grid = seed_field(spirals, dom, params);
    FieldArray re(grid.ny, grid.nx), im(grid.ny, grid.nx);
    const double dt = params.timestep();
    const long n_steps = std::lround(std::ceil(params.t_end / dt - 1e-9));
    int snap_index = 0;
    auto snapshot = [&](long step_index) {
        if (!grid.re.allFinite() || !grid.im.allFinite()) {
            std::ostringstream os;
            os << "field became non-finite by step " << step_index << " (t = " << grid.t << ")";
            throw NumericalError(os.str());
        }
        res.snapshots.push_back({grid.t, detect_spirals(grid, params.detect_threshold)});
        if (hooks.probe) {
            res.probe_times.push_back(grid.t);
            res.probe_values.push_back(sample_field(grid, *hooks.probe));
        }
        if (hooks.on_snapshot) hooks.on_snapshot(grid, snap_index);
        ++snap_index;
    };
    snapshot(0);
    for (long s = 1; s <= n_steps; ++s) {
        step_into(grid, re, im, dt, params.q);
        grid.re.swap(re);
        grid.im.swap(im);
        grid.t = s * dt;
        if (s % params.snapshot_steps == 0 || s == n_steps) snapshot(s);
    }
    const double max_jump = 5 * params.dx * std::max(1, params.snapshot_steps / 200);
    res.tracks = track(res.snapshots, std::max(max_jump, 5 * params.dx), params.dx);
    res.final_grid = std::move(grid);
    return res;
}

namespace {

template <typename T>
void put(std::ostream& os, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    os.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    char buf[sizeof(T)];
    if (!is.read(buf, sizeof(T))) throw ValidationError("truncated field dump");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

}  // namespace

void write_field(std::ostream& os, const FieldGrid& grid) {
    os.write("CGLF", 4);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(grid.nx));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(grid.ny));
    put<double>(os, grid.dx);
    put<double>(os, grid.t);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            put<double>(os, grid.re(j, i));
            put<double>(os, grid.im(j, i));
        }
}

FieldGrid read_field(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "CGLF", 4) != 0) throw ValidationError("not a CGLF field dump");
    const auto version = get<std::uint32_t>(is);
    if (version != 1) throw ValidationError("unsupported CGLF version");
    FieldGrid g;
    g.nx = static_cast<int>(get<std::uint32_t>(is));
    g.ny = static_cast<int>(get<std::uint32_t>(is));
    g.dx = get<double>(is);
    g.t = get<double>(is);
    g.re.resize(g.ny, g.nx);
    g.im.resize(g.ny, g.nx);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            g.re(j, i) = get<double>(is);
            g.im(j, i) = get<double>(is);
        }
    return g;
}

}  // namespace spiralwave
