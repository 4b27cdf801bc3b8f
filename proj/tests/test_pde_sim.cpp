#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "spiralwave/pde_sim.hpp"

using namespace spiralwave;

namespace {

constexpr double kPi = std::numbers::pi;

SimParams params(double q, double t_end = 10) {
    SimParams p;
    p.q = q;
    p.dx = 0.5;
    p.t_end = t_end;
    return p;
}

// Euler step of the same scheme on a doubly periodic grid.
void periodic_step(FieldArray& re, FieldArray& im, double dx, double dt, double q) {
    const auto ny = static_cast<int>(re.rows()), nx = static_cast<int>(re.cols());
    FieldArray ro(ny, nx), io(ny, nx);
    auto lap = [&](const FieldArray& u, int j, int i) {
        const int jm = (j + ny - 1) % ny, jp = (j + 1) % ny, im_ = (i + nx - 1) % nx, ip = (i + 1) % nx;
        return (2.0 / 3.0 * (u(jm, i) + u(jp, i) + u(j, im_) + u(j, ip)) +
                1.0 / 6.0 * (u(jm, im_) + u(jm, ip) + u(jp, im_) + u(jp, ip)) - 10.0 / 3.0 * u(j, i)) /
               (dx * dx);
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double a = re(j, i), b = im(j, i), g = 1 - a * a - b * b;
            ro(j, i) = a + dt * (g * (a - q * b) + lap(re, j, i));
            io(j, i) = b + dt * (g * (b + q * a) + lap(im, j, i));
        }
    re.swap(ro);
    im.swap(io);
}

// Phase circulation around the 2x2 block of cells whose lower-left node is (i, j).
int cell_winding(const FieldArray& phase, int i, int j) {
    const double p[4] = {phase(j, i), phase(j, i + 1), phase(j + 1, i + 1), phase(j + 1, i)};
    double c = 0;
    for (int k = 0; k < 4; ++k) c += std::remainder(p[(k + 1) % 4] - p[k], 2 * kPi);
    return static_cast<int>(std::lround(c / (2 * kPi)));
}

// Circulation around the ring of eight nodes surrounding node (i, j).
int ring_winding(const FieldArray& phase, int i, int j) {
    return cell_winding(phase, i - 1, j - 1) + cell_winding(phase, i, j - 1) + cell_winding(phase, i, j) +
           cell_winding(phase, i - 1, j);
}

std::vector<double> iota_times(int n, double dt) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = i * dt;
    return t;
}

}  // namespace

TEST_CASE("uniform state is a fixed point") {
    FieldGrid g(RectDomain(20, 20), 0.5);
    g.re.setOnes();
    g.im.setZero();
    const SimParams p = params(0.3);
    for (int s = 0; s < 1000; ++s) step(g, p);
    CHECK((g.re - 1).abs().maxCoeff() < 1e-12);
    CHECK(g.im.abs().maxCoeff() < 1e-12);
    CHECK(std::abs(g.t - 1000 * p.timestep()) < 1e-9);
}

TEST_CASE("nine-point Laplacian is exact on quadratics at interior nodes") {
    FieldGrid g(RectDomain(10, 8), 0.25);
    FieldArray u(g.ny, g.nx), v(g.ny, g.nx);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 p = g.node(i, j);
            u(j, i) = p.squaredNorm();
            v(j, i) = 3 * p.x() * p.y() - 2 * p.x() + 0.5 * p.y() * p.y();
        }
    const FieldArray lu = laplacian9(u, g.dx), lv = laplacian9(v, g.dx);
    CHECK((lu.block(1, 1, g.ny - 2, g.nx - 2) - 4).abs().maxCoeff() < 1e-10);
    CHECK((lv.block(1, 1, g.ny - 2, g.nx - 2) - 1).abs().maxCoeff() < 1e-10);
    // Mirror ghosts: a field even about every wall has zero Laplacian flux in total.
    FieldArray c(g.ny, g.nx);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            c(j, i) = std::cos(kPi * g.node(i, j).x() / 10) * std::cos(kPi * g.node(i, j).y() / 8);
    CHECK(std::abs(laplacian9(c, g.dx).sum()) < 1e-9);
}

TEST_CASE("plane wave rotates at q k^2") {
    const int nx = 64, ny = 4;
    const double dx = 0.5, q = 0.3, dt = dx * dx / 20;
    const double k = 2 * kPi * 3 / (nx * dx);
    // Wavenumber seen by the stencil.
    const double kd2 = 2 * (1 - std::cos(k * dx)) / (dx * dx);
    const double f = std::sqrt(1 - kd2);
    FieldArray re(ny, nx), im(ny, nx);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            re(j, i) = f * std::cos(k * i * dx);
            im(j, i) = f * std::sin(k * i * dx);
        }
    std::vector<double> times;
    std::vector<std::complex<double>> samples;
    const int steps = 4000;
    for (int s = 0; s <= steps; ++s) {
        if (s % 100 == 0) {
            times.push_back(s * dt);
            samples.emplace_back(re(1, 5), im(1, 5));
        }
        if (s < steps) periodic_step(re, im, dx, dt, q);
    }
    const double omega = measure_rotation_rate(times, samples);
    CHECK(std::abs(omega - q * kd2) < 1e-3 * q * kd2);
    CHECK(std::abs(omega - q * k * k) < 2e-2 * q * k * k);
}

TEST_CASE("seeded field: modulus, winding and phase seed selection") {
    const RectDomain dom(100, 100);
    SimParams p = params(0.1);
    const SpiralList pair = {{Vec2(30.25, 50.25), 1}, {Vec2(70.25, 50.25), -1}};
    const FieldGrid g = seed_field(pair, dom, p);
    const FieldArray m = g.modulus();
    CHECK(m(100, 60) < 1e-12);
    CHECK(m(100, 140) < 1e-12);
    CHECK(m(100, 100) > 0.99);
    CHECK(m.maxCoeff() <= 1.0);
    const FieldArray ph = seed_phase(pair, dom, p);
    CHECK(ring_winding(ph, 60, 100) == 1);
    CHECK(ring_winding(ph, 140, 100) == -1);
    CHECK(ring_winding(ph, 100, 100) == 0);
    CHECK(std::abs(ph.mean()) < 1e-9);

    CHECK(resolve_phase_seed(PhaseSeed::automatic, 0.3, 1) == PhaseSeed::near_field);
    CHECK(resolve_phase_seed(PhaseSeed::automatic, 0.35, 1) == PhaseSeed::canonical);
    CHECK(resolve_phase_seed(PhaseSeed::automatic, 0.2, 2) == PhaseSeed::near_field);
    CHECK(resolve_phase_seed(PhaseSeed::automatic, 0.25, 2) == PhaseSeed::canonical);
    CHECK(resolve_phase_seed(PhaseSeed::near_field_lattice, 0.45, 1) == PhaseSeed::near_field_lattice);
    CHECK(parse_phase_seed(to_string(PhaseSeed::canonical)) == PhaseSeed::canonical);
    CHECK_THROWS_AS(parse_phase_seed("spectral"), ValidationError);
}

TEST_CASE("canonical seed at q = 0.45 is finite on the whole grid") {
    const RectDomain dom(200, 200);
    SimParams p = params(0.45);
    p.dx = 1;
    const FieldArray ph = seed_phase({{Vec2(100.5, 100.5), 1}}, dom, p);
    CHECK(ph.allFinite());
    CHECK(ring_winding(ph, 100, 100) == 1);
    CHECK(ring_winding(ph, 150, 100) == 0);
}

TEST_CASE("near-field seed variants agree up to a smooth field") {
    const RectDomain dom(60, 40);
    SimParams p = params(0.1);
    const SpiralList s = {{Vec2(20.1, 20.3), 1}};
    const FieldArray a = seed_phase(s, dom, p);
    p.phase_seed = PhaseSeed::near_field_lattice;
    const FieldArray b = seed_phase(s, dom, p);
    const FieldArray d = a - b;
    // Wrap, then check the difference has no windings and small cell-to-cell jumps.
    double jump = 0;
    for (int j = 0; j + 1 < d.rows(); ++j)
        for (int i = 0; i + 1 < d.cols(); ++i) {
            jump = std::max(jump, std::abs(std::remainder(d(j, i + 1) - d(j, i), 2 * kPi)));
            jump = std::max(jump, std::abs(std::remainder(d(j + 1, i) - d(j, i), 2 * kPi)));
        }
    CHECK(jump < 0.05);
    p.q = 0.45;
    p.phase_seed = PhaseSeed::near_field;
    CHECK_THROWS_AS(seed_phase(s, dom, p), ValidationError);
}

TEST_CASE("Laplace Neumann value is consistent with the image gradient") {
    const RectDomain dom(200, 120);
    const Vec2 xi(60, 45);
    const double h = 1e-4;
    for (const Vec2& x : {Vec2(130, 80), Vec2(20, 100), Vec2(61, 44)}) {
        const double gx =
            (laplace_neumann_value(x + Vec2(h, 0), xi, dom) - laplace_neumann_value(x - Vec2(h, 0), xi, dom)) / (2 * h);
        const double gy =
            (laplace_neumann_value(x + Vec2(0, h), xi, dom) - laplace_neumann_value(x - Vec2(0, h), xi, dom)) / (2 * h);
        const Vec2 g = laplace_neumann_grad(x, xi, dom);
        CHECK(std::abs(gx - g.x()) < 1e-7);
        CHECK(std::abs(gy - g.y()) < 1e-7);
    }
    CHECK(std::abs(laplace_neumann_value(Vec2(130, 80), xi, dom) - laplace_neumann_value(xi, Vec2(130, 80), dom)) <
          1e-12);
    // Zero normal derivative on a wall.
    const Vec2 w(0, 70);
    CHECK(std::abs(laplace_neumann_value(w + Vec2(h, 0), xi, dom) - laplace_neumann_value(w, xi, dom)) / h < 1e-5);
}

TEST_CASE("detection round trip") {
    const RectDomain dom(200, 200);
    SimParams p = params(0.1);
    const FieldGrid g = seed_field({{Vec2(150.25, 100.0), 1}}, dom, p);
    const auto obs = detect_spirals(g);
    REQUIRE(obs.size() == 1);
    CHECK((obs[0].position - Vec2(150.25, 100.0)).norm() < 0.1);
    CHECK(obs[0].winding == 1);
    CHECK(obs[0].min_modulus < 0.4);

    const FieldGrid h = seed_field({{Vec2(60.3, 80.1), -1}}, dom, p);
    const auto o2 = detect_spirals(h);
    REQUIRE(o2.size() == 1);
    CHECK(o2[0].winding == -1);
    CHECK((o2[0].position - Vec2(60.3, 80.1)).norm() < 0.1);

    FieldGrid u(RectDomain(20, 20), 0.5);
    u.re.setOnes();
    u.im.setZero();
    CHECK(detect_spirals(u).empty());
}

TEST_CASE("tracking") {
    CHECK(track({}, 2.5, 0.5).tracks.empty());

    std::vector<Snapshot> snaps;
    for (int s = 0; s < 5; ++s) {
        Snapshot sn;
        sn.t = s;
        sn.spirals.push_back({Vec2(10 + 0.3 * s, 10), 1, 0.1});
        sn.spirals.push_back({Vec2(30 - 0.3 * s, 10), -1, 0.1});
        if (s == 2) sn.spirals.push_back({Vec2(50, 50), 1, 0.2});
        snaps.push_back(sn);
    }
    const TrackSet ts = track(snaps, 2.5, 0.5);
    REQUIRE(ts.tracks.size() == 3);
    CHECK(ts.tracks[0].positions.size() == 5);
    CHECK(ts.tracks[0].winding == 1);
    CHECK(ts.tracks[1].winding == -1);
    CHECK(ts.tracks[1].positions.back().x() == doctest::Approx(28.8));
    CHECK(ts.tracks[2].ended);
    int births = 0, deaths = 0;
    for (const auto& e : ts.events) {
        births += e.kind == "birth";
        deaths += e.kind == "death";
    }
    CHECK(births == 1);
    CHECK(deaths == 1);

    // Two equally good candidates: flagged, not guessed.
    std::vector<Snapshot> amb(2);
    amb[0].spirals.push_back({Vec2(10, 10), 1, 0.1});
    amb[1].t = 1;
    amb[1].spirals.push_back({Vec2(10.3, 10), 1, 0.1});
    amb[1].spirals.push_back({Vec2(10, 10.3), 1, 0.1});
    const TrackSet ta = track(amb, 2.5, 1.0);
    bool flagged = false;
    for (const auto& e : ta.events) flagged |= e.kind == "ambiguous" && e.id == 0;
    CHECK(flagged);
    CHECK(ta.tracks[0].positions.size() == 1);
}

TEST_CASE("velocity estimation") {
    const int n = 200;
    const double dt = 0.5;
    const auto t = iota_times(n, dt);
    std::vector<Vec2> lin(n), still(n, Vec2(3, 4)), sine(n);
    const double w = 0.07, amp = 2;
    for (int i = 0; i < n; ++i) {
        lin[i] = Vec2(1 + 0.25 * t[i], -2 - 0.5 * t[i]);
        sine[i] = Vec2(amp * std::sin(w * t[i]), 0);
    }
    const VelocitySeries vl = estimate_velocity(t, lin);
    REQUIRE(!vl.velocity.empty());
    for (const Vec2& v : vl.velocity) CHECK((v - Vec2(0.25, -0.5)).norm() < 1e-12);
    for (const Vec2& v : estimate_velocity(t, still).velocity) CHECK(v.norm() == 0.0);

    // Central difference and moving average are both linear filters with known gains.
    for (int window : {21, 9}) {
        const VelocitySeries vs = estimate_velocity(t, sine, window);
        const double f = w * dt / (2 * kPi);
        const double cd = std::sin(w * dt) / (w * dt);
        const double ma = std::sin(kPi * f * window) / (window * std::sin(kPi * f));
        for (std::size_t i = 0; i < vs.times.size(); ++i)
            CHECK(std::abs(vs.velocity[i].x() - amp * w * cd * ma * std::cos(w * vs.times[i])) < 1e-6);
    }
    CHECK_THROWS_AS(estimate_velocity(iota_times(20, 1), std::vector<Vec2>(20, Vec2::Zero())), ValidationError);
    CHECK_THROWS_AS(estimate_velocity(t, lin, 2), ValidationError);
}

TEST_CASE("rotation rate") {
    const auto t = iota_times(500, 0.3);
    std::vector<std::complex<double>> z(t.size());
    const double omega0 = 0.137;
    for (std::size_t i = 0; i < t.size(); ++i) z[i] = 0.8 * std::polar(1.0, omega0 * t[i] + 0.4);
    CHECK(std::abs(measure_rotation_rate(t, z) - omega0) < 1e-10);

    const RectDomain dom(200, 200);
    const std::vector<Vec2> cores = {Vec2(100, 100)};
    CHECK(std::abs(measure_rotation_rate(t, z, Vec2(150, 100), cores, dom) - omega0) < 1e-10);
    CHECK_THROWS_AS(measure_rotation_rate(t, z, Vec2(110, 100), cores, dom), ValidationError);
    CHECK_THROWS_AS(measure_rotation_rate(t, z, Vec2(10, 100), cores, dom), ValidationError);
    const std::vector<double> short_t(t.begin(), t.begin() + 50);
    const std::vector<std::complex<double>> short_z(z.begin(), z.begin() + 50);
    CHECK_THROWS_AS(measure_rotation_rate(short_t, short_z, Vec2(150, 100), cores, dom), ValidationError);
    CHECK_NOTHROW(measure_rotation_rate(short_t, short_z, Vec2(150, 100), cores, dom, 0));
}

TEST_CASE("q = 0 has no global rotation") {
    SimParams p = params(0.0, 40);
    SimulationHooks hooks;
    hooks.probe = Vec2(40, 25);
    const SimulationResult r = run_simulation({{Vec2(25.25, 25.25), 1}}, RectDomain(50, 50), p, hooks);
    const std::vector<double> t(r.probe_times.begin() + r.probe_times.size() / 2, r.probe_times.end());
    const std::vector<std::complex<double>> z(r.probe_values.begin() + r.probe_values.size() / 2, r.probe_values.end());
    // Only slow phase relaxation remains; q = 0.1 rotates at about 1e-3 here.
    CHECK(std::abs(measure_rotation_rate(t, z)) < 1e-4);
}

TEST_CASE("centred spiral stays put") {
    SimParams p = params(0.1, 10000 * 0.0125);
    const SimulationResult r = run_simulation({{Vec2(50.25, 50.25), 1}}, RectDomain(100.5, 100.5), p);
    REQUIRE(r.tracks.tracks.size() == 1);
    const Track& tr = r.tracks.tracks[0];
    CHECK(tr.positions.size() == r.snapshots.size());
    for (const Vec2& x : tr.positions) CHECK((x - Vec2(50.25, 50.25)).norm() < 0.05);
    CHECK(r.final_grid.modulus().maxCoeff() <= 1.05);
}

TEST_CASE("symmetric pair stays mirror symmetric") {
    SimParams p = params(0.2, 100);
    const RectDomain dom(100, 60);
    const SimulationResult r = run_simulation({{Vec2(35.25, 30.25), 1}, {Vec2(64.75, 29.75), 1}}, dom, p);
    REQUIRE(r.tracks.tracks.size() == 2);
    const Track &a = r.tracks.tracks[0], &b = r.tracks.tracks[1];
    REQUIRE(a.positions.size() == b.positions.size());
    for (std::size_t i = 0; i < a.positions.size(); ++i)
        CHECK((a.positions[i] + b.positions[i] - Vec2(100, 60)).norm() < 0.2 * p.dx);
    // Total winding is conserved.
    for (const auto& s : r.snapshots) {
        int w = 0;
        for (const auto& o : s.spirals) w += o.winding;
        CHECK(w == 2);
    }
}

TEST_CASE("field dump round trip") {
    SimParams p = params(0.2);
    FieldGrid g = seed_field({{Vec2(10.1, 7.3), 1}}, RectDomain(20, 15), p);
    g.t = 12.5;
    std::stringstream ss;
    write_field(ss, g);
    CHECK(ss.str().size() == 4 + 3 * 4 + 2 * 8 + 16 * static_cast<std::size_t>(g.nx * g.ny));
    CHECK(ss.str().substr(0, 4) == "CGLF");
    const FieldGrid h = read_field(ss);
    CHECK(h.nx == g.nx);
    CHECK(h.ny == g.ny);
    CHECK(h.dx == g.dx);
    CHECK(h.t == 12.5);
    CHECK((h.re - g.re).abs().maxCoeff() == 0.0);
    CHECK((h.im - g.im).abs().maxCoeff() == 0.0);

    std::stringstream bad("CGLX0000");
    CHECK_THROWS_AS(read_field(bad), ValidationError);
    std::stringstream cut(ss.str().substr(0, 40));
    CHECK_THROWS_AS(read_field(cut), ValidationError);
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(FieldGrid(RectDomain(10, 10), 0.3), ValidationError);
    CHECK_THROWS_AS(FieldGrid(RectDomain(1, 1), 0.5), ValidationError);
    SimParams p = params(0.1);
    p.dt = p.dx * p.dx / 10;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = params(0.1);
    p.detect_threshold = 1.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = params(1.5);
    CHECK_THROWS_AS(p.validate(), ValidationError);
    CHECK_THROWS_AS(seed_field({{Vec2(-1, 5), 1}}, RectDomain(20, 20), params(0.1)), ValidationError);
}
