#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spiralwave/motion.hpp"
#include "spiralwave/orbit.hpp"
#include "spiralwave/pde_sim.hpp"

namespace spiralwave {

struct ExperimentConfig {
    RectDomain dom{200.0, 200.0};
    double q = 0.1;
    SpiralList spirals;
    Law law = Law::uniform;
    EpsilonPolicy eps_policy{};
    double btilde = 0;
    // 0 means: use c1 from the core solver.
    double c1 = 0;

    // Asymptotic integration.
    double t_end = 1000;
    double step = 0.5;
    bool refine = true;
    // Extra single-spiral starting points integrated independently and drawn
    // in one panel by the trajectory command.
    std::vector<Vec2> starts;

    std::optional<SimParams> sim;
    std::optional<Vec2> probe;

    double transient = 50;
    int velocity_window = 21;

    std::vector<double> scan_q;

    bool write_svg = true;
    int field_dump_stride = 0;  // every n-th snapshot as a CGLF dump; 0 = final only

    void validate() const;
    double resolved_c1() const;
    MotionModel motion_model() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Shortest text that reads back as the same double.
std::string format_number(double v);

struct ComparisonSample {
    double t = 0;
    std::vector<Vec2> numerical;
    std::vector<Vec2> asymptotic;
    std::vector<Vec2> numerical_velocity;  // smoothed, NaN outside the smoothing window
    std::vector<Vec2> law_velocity;        // asymptotic law evaluated at the numerical positions
};

struct ComparisonReport {
    std::vector<ComparisonSample> samples;
    std::string anchor_kind;  // "backward" from the curve crossing, or "forward"
    double anchor_t = 0;
    std::vector<Vec2> anchor_positions;
    double transient_cutoff = 0;
    std::string resampling;
    // Velocity deviation relative to numerical speed, both RMS over t > cutoff.
    double rms_velocity_deviation = 0;
    double rms_numerical_speed = 0;
    double relative_velocity_deviation = 0;
    // RMS and max distance between the two trajectories over common samples.
    double rms_divergence = 0;
    double max_divergence = 0;
    // Pairs only: max |x1 + x2 - (Lx, Ly)| of the numerical tracks, in cells.
    double symmetry_violation = 0;
    // Angle of the first spiral about the centre at the numerical half turn.
    int rotation_sense_numerical = 0;
    int rotation_sense_asymptotic = 0;
    double half_turn_t = -1;
    double half_turn_angle_gap_deg = -1;
    std::vector<std::vector<Vec2>> numerical_tracks;
    std::vector<double> numerical_times;
    TrajectoryRecord asymptotic;
    std::vector<TrackEvent> events;
};

// Anchor curve (x - Lx/2)^4 + (y - Ly/2)^4 = (0.45 (Lx + Ly)/2)^4, as a signed level.
double anchor_level(const Vec2& p, const RectDomain& dom);

ComparisonReport run_compare(const ExperimentConfig& cfg, const SimulationHooks& hooks = {});
// Comparison against an existing PDE result; used by run_compare and tests.
ComparisonReport compare_with_simulation(const ExperimentConfig& cfg, const SimulationResult& sim);

struct ScanRow {
    double q = 0;
    bool orbit_found = false;
    double crossing_x = 0;
    double period = 0;
    std::string reason;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    // True when crossing_x increases with q over the rows that found an orbit.
    bool monotone_growth = true;
    std::vector<std::string> notes;
};

ScanResult run_bifurcation_scan(const std::vector<double>& q_list, const ExperimentConfig& cfg,
                                const OrbitOptions& opts = {});
void write_scan_csv(std::ostream& os, const ScanResult& scan);

struct PlotLine {
    std::vector<Vec2> points;
    bool dashed = false;
    std::string label;
};

struct TrajectoryPlot {
    std::string title;
    RectDomain dom{200.0, 200.0};
    std::vector<PlotLine> lines;
};

struct SeriesPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotLine> lines;  // points are (x, y) pairs of the series
};

std::string trajectory_svg(const TrajectoryPlot& plot);
std::string series_svg(const SeriesPlot& plot);

// Writes one SVG per plot into dir; returns the file names.
std::vector<std::string> emit_plots(const std::vector<TrajectoryPlot>& trajectories,
                                    const std::vector<SeriesPlot>& series, const std::filesystem::path& dir,
                                    const std::string& stem);

struct Manifest {
    std::string command;
    std::string config_text;
    std::string config_hash;
    double c1 = 0;
    std::map<std::string, std::string> versions;
    std::map<std::string, std::string> results;
    std::vector<std::string> outputs;
};

// 64-bit FNV-1a of the text, as 16 hex digits.
std::string content_hash(const std::string& text);
std::map<std::string, std::string> module_versions();
void write_manifest(const std::filesystem::path& dir, const Manifest& m);

// Runs one CLI subcommand, writing outputs and the manifest into dir.
void run_command(const std::string& command, const ExperimentConfig& cfg, const std::filesystem::path& dir);
const std::vector<std::string>& command_names();

}  // namespace spiralwave
