#include <cmath>
#include <fstream>
#include <numbers>

#include "spiralwave/core_profile.hpp"
#include "spiralwave/harness.hpp"

namespace spiralwave {

namespace {

namespace fs = std::filesystem;

class Csv {
public:
    Csv(const fs::path& dir, const std::string& name, const std::string& header, Manifest& m)
        : out_(dir / name, std::ios::binary) {
        if (!out_) throw ValidationError("cannot write '" + (dir / name).string() + "'");
        out_ << header << "\n";
        m.outputs.push_back(name);
    }
    template <typename... T>
    void row(const T&... cols) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cols), first = false), ...);
        out_ << "\n";
    }

private:
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    std::ofstream out_;
};

void need_spirals(const ExperimentConfig& cfg, const std::string& cmd) {
    if (cfg.spirals.empty()) throw ValidationError(cmd + " requires at least one spiral");
}

SimParams sim_params(const ExperimentConfig& cfg) {
    if (!cfg.sim) throw ValidationError("this command requires a [sim] section");
    SimParams p = *cfg.sim;
    p.q = cfg.q;
    p.c1 = cfg.resolved_c1();
    return p;
}

void add_plots(const ExperimentConfig& cfg, Manifest& m, const fs::path& dir, const std::string& stem,
               const std::vector<TrajectoryPlot>& traj, const std::vector<SeriesPlot>& series) {
    if (!cfg.write_svg) return;
    for (auto& name : emit_plots(traj, series, dir, stem)) m.outputs.push_back(name);
}

void cmd_core(const ExperimentConfig&, const fs::path& dir, Manifest& m) {
    const CoreProfile& p = default_core_profile();
    Csv csv(dir, "core_profile.csv", "r,f,dphi02", m);
    for (Eigen::Index i = 0; i < p.r_nodes.size(); i += 10)
        csv.row(p.r_nodes[i], p.f_values[i], i == 0 ? 0.0 : phase_gradient_correction(p, p.r_nodes[i]));
    m.results["c1"] = format_number(p.c1);
    m.results["slope_at_zero"] = format_number(p.slope_at_zero);
    m.results["far_field_coeff"] = format_number(p.far_field_coeff);
    m.results["residual"] = format_number(p.residual);
    m.results["newton_iterations"] = std::to_string(p.newton_iterations);
}

void cmd_greens(const ExperimentConfig& cfg, const fs::path& dir, Manifest& m) {
    need_spirals(cfg, "greens");
    SpiralConfigurationParams sc{cfg.spirals, cfg.q, cfg.dom, cfg.resolved_c1(), {}};
    const double kappa = cfg.q * solve_canonical(sc).k;
    m.results["kappa"] = format_number(kappa);
    Csv csv(dir, "greens.csv",
            "l,j,kappa,mh_neumann,mh_neumann_gx,mh_neumann_gy,mh_dirichlet_gx,mh_dirichlet_gy,laplace_neumann_gx,"
            "laplace_neumann_gy,laplace_dirichlet_gx,laplace_dirichlet_gy",
            m);
    for (std::size_t l = 0; l < cfg.spirals.size(); ++l)
        for (std::size_t j = 0; j < cfg.spirals.size(); ++j) {
            const Vec2 x = cfg.spirals[l].position, xi = cfg.spirals[j].position;
            GreensEval<double> gn, gd;
            Vec2 ln, ld;
            if (l == j) {
                gn = mh_neumann_reg(x, xi, kappa, cfg.dom);
                gd = mh_dirichlet_reg(x, xi, kappa, cfg.dom);
                ln = laplace_reg_grad_at_self(x, cfg.dom, Boundary::neumann);
                ld = laplace_reg_grad_at_self(x, cfg.dom, Boundary::dirichlet);
            } else {
                gn = mh_green(x, xi, kappa, cfg.dom, Boundary::neumann);
                gd = mh_dirichlet_grad(x, xi, kappa, cfg.dom);
                ln = laplace_neumann_grad(x, xi, cfg.dom);
                ld = laplace_dirichlet_grad(x, xi, cfg.dom);
            }
            csv.row(l, j, kappa, gn.value, gn.grad.x(), gn.grad.y(), gd.grad.x(), gd.grad.y(), ln.x(), ln.y(), ld.x(),
                    ld.y());
        }
    // Field of the first spiral's Green's functions on a 41 x 41 cell-centred grid.
    Csv grid(dir, "greens_grid.csv", "x,y,mh_neumann,mh_neumann_gx,mh_neumann_gy,laplace_neumann_gx,laplace_neumann_gy",
             m);
    const Vec2 src = cfg.spirals[0].position;
    const int n = 41;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 x((i + 0.5) * cfg.dom.lx / n, (j + 0.5) * cfg.dom.ly / n);
            if ((x - src).norm() < 1e-6 * (cfg.dom.lx + cfg.dom.ly)) {
                grid.row(x.x(), x.y(), NAN, NAN, NAN, NAN, NAN);
                continue;
            }
            const GreensEval<double> g = mh_green(x, src, kappa, cfg.dom, Boundary::neumann);
            const Vec2 lg = laplace_neumann_grad(x, src, cfg.dom);
            grid.row(x.x(), x.y(), g.value, g.grad.x(), g.grad.y(), lg.x(), lg.y());
        }
}

void cmd_k(const ExperimentConfig& cfg, const fs::path& dir, Manifest& m) {
    need_spirals(cfg, "k");
    SpiralConfigurationParams sc{cfg.spirals, cfg.q, cfg.dom, cfg.resolved_c1(), {}};
    const double eps = eval_epsilon({cfg.spirals, 0}, cfg.dom, cfg.eps_policy);
    const double theta = cfg.q * std::log(1 / eps);
    const WavenumberSolution can = solve_canonical(sc);
    const int n = static_cast<int>(cfg.spirals.size());
    const bool nf_ok = theta < std::numbers::pi / 2;
    const double k_near = nf_ok ? near_field_k(n, cfg.q, eps, cfg.dom.area()) : NAN;
    const double k_uni = nf_ok ? uniform_k(sc, eps, can.k) : NAN;
    Csv csv(dir, "k.csv", "eps,q_log_inv_eps,k_canonical,k_near_field,k_uniform,canonical_residual", m);
    csv.row(eps, theta, can.k, k_near, k_uni, can.residual);
    Csv beta(dir, "beta.csv", "spiral,beta", m);
    for (Eigen::Index i = 0; i < can.beta.size(); ++i) beta.row(static_cast<long>(i), can.beta[i]);
    m.results["k_canonical"] = format_number(can.k);
    m.results["k_near_field"] = format_number(k_near);
    m.results["k_uniform"] = format_number(k_uni);
}

void cmd_trajectory(const ExperimentConfig& cfg, const fs::path& dir, Manifest& m) {
    if (cfg.spirals.empty() && cfg.starts.empty())
        throw ValidationError("trajectory requires spirals or starting points");
    std::vector<std::pair<std::string, SpiralList>> runs;
    if (!cfg.spirals.empty()) runs.emplace_back("trajectory.csv", cfg.spirals);
    const int winding = cfg.spirals.empty() ? 1 : cfg.spirals[0].winding;
    for (std::size_t i = 0; i < cfg.starts.size(); ++i)
        runs.emplace_back("trajectory_start" + std::to_string(i) + ".csv", SpiralList{{cfg.starts[i], winding}});
    const MotionModel model = cfg.motion_model();
    StepControl ctrl;
    ctrl.h = cfg.step;
    ctrl.refine = cfg.refine;
    TrajectoryPlot plot{"asymptotic trajectories, q = " + format_number(cfg.q), cfg.dom, {}};
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& [name, spirals] = runs[r];
        const TrajectoryRecord rec = integrate({spirals, 0}, model, cfg.t_end, ctrl);
        std::string header = "t";
        for (std::size_t l = 1; l <= spirals.size(); ++l)
            header += ",x_" + std::to_string(l) + ",y_" + std::to_string(l);
        std::ofstream out(dir / name, std::ios::binary);
        out << header << ",k,eps\n";
        for (std::size_t i = 0; i < rec.times.size(); ++i) {
            out << format_number(rec.times[i]);
            for (const Vec2& p : rec.positions[i]) out << "," << format_number(p.x()) << "," << format_number(p.y());
            out << "," << format_number(rec.k_series[i]) << "," << format_number(rec.eps_series[i]) << "\n";
        }
        m.outputs.push_back(name);
        const std::string key = name.substr(0, name.size() - 4);
        m.results[key + "_termination"] = to_string(rec.termination);
        m.results[key + "_step"] = format_number(rec.step);
        if (!rec.message.empty()) m.results[key + "_message"] = rec.message;
        for (std::size_t l = 0; l < spirals.size(); ++l) {
            PlotLine line;
            for (const auto& ps : rec.positions) line.points.push_back(ps[l]);
            plot.lines.push_back(std::move(line));
        }
    }
    add_plots(cfg, m, dir, "trajectory", {plot}, {});
}

void cmd_orbit(const ExperimentConfig& cfg, const fs::path& dir, Manifest& m) {
    const OrbitRecord rec = find_periodic_orbit(cfg.q, cfg.dom, cfg.law, cfg.eps_policy, cfg.resolved_c1());
    m.results["orbit_found"] = rec.found ? "yes" : "no";
    m.results["crossing_x"] = format_number(rec.crossing_x);
    m.results["period"] = format_number(rec.period);
    m.results["crossings"] = std::to_string(rec.crossings);
    if (!rec.reason.empty()) m.results["reason"] = rec.reason;
    Csv csv(dir, "orbit.csv", "x,y", m);
    for (const Vec2& p : rec.points) csv.row(p.x(), p.y());
    if (rec.found)
        add_plots(cfg, m, dir, "orbit",
                  {{"periodic orbit, q = " + format_number(cfg.q), cfg.dom, {{rec.points, false, "orbit"}}}}, {});
}

void write_tracks(const TrackSet& ts, const fs::path& dir, Manifest& m, int window) {
    Csv csv(dir, "tracks.csv", "t,id,x,y,winding,min_modulus", m);
    for (const Track& tr : ts.tracks)
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            csv.row(tr.times[i], tr.id, tr.positions[i].x(), tr.positions[i].y(), tr.winding, tr.min_modulus[i]);
    Csv ev(dir, "events.csv", "t,track,kind", m);
    for (const TrackEvent& e : ts.events) ev.row(e.t, e.id, e.kind);
    Csv vel(dir, "velocity.csv", "track,t,vx,vy", m);
    for (const Track& tr : ts.tracks) {
        if (static_cast<int>(tr.times.size()) <= window + 2) continue;
        const VelocitySeries v = estimate_velocity(tr.times, tr.positions, window);
        for (std::size_t i = 0; i < v.times.size(); ++i)
            vel.row(tr.id, v.times[i], v.velocity[i].x(), v.velocity[i].y());
    }
}

void cmd_simulate(const ExperimentConfig& cfg, const fs::path& dir, Manifest& m) {
    need_spirals(cfg, "simulate");
    const SimParams p = sim_params(cfg);
    SimulationHooks hooks;
    hooks.probe = cfg.probe;
    if (cfg.field_dump_stride > 0)
        hooks.on_snapshot = [&](const FieldGrid& g, int index) {
            if (index % cfg.field_dump_stride) return;
            char name[64];
            std::snprintf(name, sizeof name, "field_%06d.cglf", index);
            std::ofstream out(dir / name, std::ios::binary);
            write_field(out, g);
            m.outputs.push_back(name);
        };
    const SimulationResult res = run_simulation(cfg.spirals, cfg.dom, p, hooks);
    {
        std::ofstream out(dir / "field_final.cglf", std::ios::binary);
        write_field(out, res.final_grid);
        m.outputs.push_back("field_final.cglf");
    }
    write_tracks(res.tracks, dir, m, cfg.velocity_window);
    m.results["phase_seed"] = to_string(resolve_phase_seed(p.phase_seed, p.q, cfg.spirals.size()));
    m.results["tracks"] = std::to_string(res.tracks.tracks.size());
    if (cfg.probe) {
        Csv csv(dir, "probe.csv", "t,re,im", m);
        for (std::size_t i = 0; i < res.probe_times.size(); ++i)
            csv.row(res.probe_times[i], res.probe_values[i].real(), res.probe_values[i].imag());
        if (res.probe_times.size() >= 2)
            m.results["rotation_rate"] = format_number(measure_rotation_rate(res.probe_times, res.probe_values));
    }
    TrajectoryPlot plot{"tracked spirals, q = " + format_number(cfg.q), cfg.dom, {}};
    for (const Track& tr : res.tracks.tracks) plot.lines.push_back({tr.positions, true, ""});
    if (!plot.lines.empty()) add_plots(cfg, m, dir, "simulate", {plot}, {});
}

void cmd_compare(const ExperimentConfig& cfg, const fs::path& dir, Manifest& m) {
    need_spirals(cfg, "compare");
    const ComparisonReport rep = run_compare(cfg);
    Csv csv(dir, "comparison.csv", "t,spiral,num_x,num_y,asym_x,asym_y,num_vx,num_vy,law_vx,law_vy", m);
    for (const auto& s : rep.samples)
        for (std::size_t l = 0; l < s.numerical.size(); ++l)
            csv.row(s.t, l, s.numerical[l].x(), s.numerical[l].y(), s.asymptotic[l].x(), s.asymptotic[l].y(),
                    s.numerical_velocity[l].x(), s.numerical_velocity[l].y(), s.law_velocity[l].x(),
                    s.law_velocity[l].y());
    Csv ev(dir, "events.csv", "t,track,kind", m);
    for (const TrackEvent& e : rep.events) ev.row(e.t, e.id, e.kind);
    auto& r = m.results;
    r["anchor_kind"] = rep.anchor_kind;
    r["anchor_t"] = format_number(rep.anchor_t);
    r["transient_cutoff"] = format_number(rep.transient_cutoff);
    r["resampling"] = rep.resampling;
    r["rms_velocity_deviation"] = format_number(rep.rms_velocity_deviation);
    r["rms_numerical_speed"] = format_number(rep.rms_numerical_speed);
    r["relative_velocity_deviation"] = format_number(rep.relative_velocity_deviation);
    r["rms_divergence"] = format_number(rep.rms_divergence);
    r["max_divergence"] = format_number(rep.max_divergence);
    r["asymptotic_termination"] = to_string(rep.asymptotic.termination);
    if (cfg.spirals.size() == 2) r["symmetry_violation_cells"] = format_number(rep.symmetry_violation);
    if (rep.half_turn_t >= 0) {
        r["half_turn_t"] = format_number(rep.half_turn_t);
        r["half_turn_angle_gap_deg"] = format_number(rep.half_turn_angle_gap_deg);
        r["rotation_sense_numerical"] = std::to_string(rep.rotation_sense_numerical);
        r["rotation_sense_asymptotic"] = std::to_string(rep.rotation_sense_asymptotic);
    }

    const std::size_t n = cfg.spirals.size();
    TrajectoryPlot traj{"numerical (dashed) and asymptotic (solid), q = " + format_number(cfg.q), cfg.dom, {}};
    SeriesPlot speed{"speed, q = " + format_number(cfg.q), "t", "|v|", {}};
    for (std::size_t l = 0; l < n; ++l) {
        PlotLine num{rep.numerical_tracks[l], true, "numerical " + std::to_string(l)};
        PlotLine asy{{}, false, "asymptotic " + std::to_string(l)};
        PlotLine vn{{}, true, "numerical " + std::to_string(l)}, vl{{}, false, "law " + std::to_string(l)};
        for (const auto& s : rep.samples) {
            asy.points.push_back(s.asymptotic[l]);
            vn.points.emplace_back(s.t, s.numerical_velocity[l].norm());
            vl.points.emplace_back(s.t, s.law_velocity[l].norm());
        }
        traj.lines.push_back(std::move(num));
        traj.lines.push_back(std::move(asy));
        speed.lines.push_back(std::move(vn));
        speed.lines.push_back(std::move(vl));
    }
    add_plots(cfg, m, dir, "compare", {traj}, {speed});
}

void cmd_scan(const ExperimentConfig& cfg, const fs::path& dir, Manifest& m) {
    const ScanResult scan = run_bifurcation_scan(cfg.scan_q, cfg);
    {
        std::ofstream out(dir / "scan.csv", std::ios::binary);
        write_scan_csv(out, scan);
        m.outputs.push_back("scan.csv");
    }
    m.results["monotone_growth"] = scan.monotone_growth ? "yes" : "no";
    for (std::size_t i = 0; i < scan.notes.size(); ++i) m.results["note" + std::to_string(i)] = scan.notes[i];
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"core",  "greens",   "k",       "trajectory",
                                                   "orbit", "simulate", "compare", "scan"};
    return names;
}

void run_command(const std::string& command, const ExperimentConfig& cfg, const fs::path& dir) {
    cfg.validate();
    fs::create_directories(dir);
    Manifest m;
    m.command = command;
    m.config_text = serialize_config(cfg);
    m.config_hash = content_hash(m.config_text);
    m.versions = module_versions();
    m.c1 = cfg.resolved_c1();
    if (command == "core")
        cmd_core(cfg, dir, m);
    else if (command == "greens")
        cmd_greens(cfg, dir, m);
    else if (command == "k")
        cmd_k(cfg, dir, m);
    else if (command == "trajectory")
        cmd_trajectory(cfg, dir, m);
    else if (command == "orbit")
        cmd_orbit(cfg, dir, m);
    else if (command == "simulate")
        cmd_simulate(cfg, dir, m);
    else if (command == "compare")
        cmd_compare(cfg, dir, m);
    else if (command == "scan")
        cmd_scan(cfg, dir, m);
    else
        throw ValidationError("unknown command '" + command + "'");
    write_manifest(dir, m);
}

}  // namespace spiralwave
