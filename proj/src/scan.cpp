#include <future>
#include <ostream>
#include <sstream>

#include "spiralwave/harness.hpp"

namespace spiralwave {

ScanResult run_bifurcation_scan(const std::vector<double>& q_list, const ExperimentConfig& cfg,
                                const OrbitOptions& opts) {
    for (double q : q_list)
        if (!(q > 0 && q <= 0.5)) throw ValidationError("scan q values must lie in (0, 0.5]");
    const double c1 = cfg.resolved_c1();
    std::vector<std::future<ScanRow>> jobs;
    for (double q : q_list)
        jobs.push_back(std::async(std::launch::async, [=, &cfg, &opts] {
            ScanRow row;
            row.q = q;
            try {
                const OrbitRecord rec = find_periodic_orbit(q, cfg.dom, cfg.law, cfg.eps_policy, c1, opts);
                row.orbit_found = rec.found;
                row.crossing_x = rec.crossing_x;
                row.period = rec.period;
                row.reason = rec.reason;
            } catch (const std::exception& e) {
                row.reason = e.what();
            }
            return row;
        }));
    ScanResult out;
    for (auto& j : jobs) out.rows.push_back(j.get());

    const ScanRow* prev = nullptr;
    for (const ScanRow& r : out.rows) {
        if (!r.orbit_found) {
            out.notes.push_back("q=" + format_number(r.q) + ": no orbit (" + r.reason + ")");
            continue;
        }
        if (prev && (r.q > prev->q) != (r.crossing_x > prev->crossing_x)) {
            out.monotone_growth = false;
            out.notes.push_back("orbit size not increasing between q=" + format_number(prev->q) +
                                " and q=" + format_number(r.q));
        }
        prev = &r;
    }
    return out;
}

void write_scan_csv(std::ostream& os, const ScanResult& scan) {
    os << "q,orbit_found,crossing_x,period\n";
    for (const ScanRow& r : scan.rows)
        os << format_number(r.q) << "," << (r.orbit_found ? "yes" : "no") << ","
           << (r.orbit_found ? format_number(r.crossing_x) : "") << ","
           << (r.orbit_found ? format_number(r.period) : "") << "\n";
}

}  // namespace spiralwave
