#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spiralwave/types.hpp"
#include "spiralwave/wavenumber.hpp"

namespace spiralwave {

using FieldArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Complex field on a cell-centred grid: node (i, j) sits at ((i+1/2) dx, (j+1/2) dx).
// Arrays are indexed (row j, column i).
struct FieldGrid {
    int nx = 0;
    int ny = 0;
    double dx = 0;
    double t = 0;
    FieldArray re;
    FieldArray im;

    FieldGrid() = default;
    FieldGrid(const RectDomain& dom, double dx_);

    Vec2 node(int i, int j) const { return {(i + 0.5) * dx, (j + 0.5) * dx}; }
    std::complex<double> at(int i, int j) const { return {re(j, i), im(j, i)}; }
    FieldArray modulus() const { return (re.square() + im.square()).sqrt(); }
    RectDomain domain() const { return {nx * dx, ny * dx}; }
};

enum class PhaseSeed {
    automatic,           // near-field below the q thresholds, canonical above
    near_field,          // exact Laplace Neumann function for the log part
    near_field_lattice,  // log part from a truncated image lattice
    canonical,
};
std::string to_string(PhaseSeed s);
PhaseSeed parse_phase_seed(const std::string& s);

struct SimParams {
    double q = 0.1;
    double dx = 0.5;
    double dt = 0;  // 0 selects dx^2/20
    double t_end = 100;
    int snapshot_steps = 200;
    PhaseSeed phase_seed = PhaseSeed::automatic;
    double seed_eps = 0.01;
    double detect_threshold = 0.4;
    double c1 = 0;  // used by the canonical seed

    double timestep() const { return dt > 0 ? dt : dx * dx / 20; }
    void validate() const;
};

inline constexpr double kCoreSlope = 0.583189;

// Which phase seed the switching rule selects for this q and spiral count.
PhaseSeed resolve_phase_seed(PhaseSeed requested, double q, std::size_t n_spirals);

FieldGrid seed_field(const SpiralList& spirals, const RectDomain& dom, const SimParams& params);

// Initial phase alone, exposed for diagnostics.
FieldArray seed_phase(const SpiralList& spirals, const RectDomain& dom, const SimParams& params);

// Laplace Neumann Green's function (zero-mean source), up to an additive constant.
double laplace_neumann_value(const Vec2& x, const Vec2& xi, const RectDomain& dom);

// One explicit Euler step with the 9-point Laplacian and mirrored ghost nodes.
void step(FieldGrid& grid, const SimParams& params);

// Nine-point Laplacian of a real array with mirror boundaries.
FieldArray laplacian9(const FieldArray& u, double dx);

struct SpiralObservation {
    Vec2 position;
    int winding = 0;
    double min_modulus = 0;
};

std::vector<SpiralObservation> detect_spirals(const FieldGrid& grid, double threshold = 0.4);

struct Snapshot {
    double t = 0;
    std::vector<SpiralObservation> spirals;
};

struct Track {
    int id = 0;
    int winding = 0;
    std::vector<double> times;
    std::vector<Vec2> positions;
    std::vector<double> min_modulus;
    bool ended = false;
};

struct TrackEvent {
    double t = 0;
    int id = 0;
    std::string kind;  // "birth", "death", "ambiguous"
};

struct TrackSet {
    std::vector<Track> tracks;
    std::vector<TrackEvent> events;
};

TrackSet track(const std::vector<Snapshot>& snapshots, double max_jump, double ambiguity_radius);

struct VelocitySeries {
    std::vector<double> times;
    std::vector<Vec2> velocity;
};

VelocitySeries estimate_velocity(const std::vector<double>& times, const std::vector<Vec2>& positions, int window = 21);

// Least-squares slope of the unwrapped phase of the samples.
double measure_rotation_rate(const std::vector<double>& times, const std::vector<std::complex<double>>& samples);

// Same, with the probe-placement and span preconditions checked.  min_periods
// = 0 disables the span check.
double measure_rotation_rate(const std::vector<double>& times, const std::vector<std::complex<double>>& samples,
                             const Vec2& probe, const std::vector<Vec2>& cores, const RectDomain& dom,
                             double min_periods = 3);

// Bilinear sample of the field.
std::complex<double> sample_field(const FieldGrid& grid, const Vec2& p);

struct SimulationResult {
    std::vector<Snapshot> snapshots;
    TrackSet tracks;
    std::vector<double> probe_times;
    std::vector<std::complex<double>> probe_values;
    FieldGrid final_grid;
};

struct SimulationHooks {
    std::optional<Vec2> probe;
    // Called with every snapshot grid; used for field dumps.
    std::function<void(const FieldGrid&, int)> on_snapshot;
};

SimulationResult run_simulation(const SpiralList& spirals, const RectDomain& dom, const SimParams& params,
                                const SimulationHooks& hooks = {});

// Binary dump: "CGLF", u32 version, u32 nx, u32 ny, f64 dx, f64 t, then
// row-major interleaved (re, im) f64 pairs.
void write_field(std::ostream& os, const FieldGrid& grid);
FieldGrid read_field(std::istream& is);

}  // namespace spiralwave
