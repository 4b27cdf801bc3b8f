#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "spiralwave/core_profile.hpp"
#include "spiralwave/harness.hpp"

namespace spiralwave {

namespace pt = boost::property_tree;

std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

double parse_number(const std::string& text, const std::string& key) {
    std::string s = text;
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    double v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ValidationError("'" + key + "': not a finite number: '" + text + "'");
    return v;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        if (tok == ",") continue;
        if (tok.back() == ',') tok.pop_back();
        out.push_back(parse_number(tok, key));
    }
    return out;
}

bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ValidationError("'" + key + "': expected true or false, got '" + s + "'");
}

int parse_int(const std::string& s, const std::string& key) {
    const double v = parse_number(s, key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ValidationError("'" + key + "': expected an integer");
    return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (cur.find_first_not_of(" \t") != std::string::npos) out.push_back(cur);
    return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"domain", {"lx", "ly"}},
        {"model", {"q", "law", "eps_policy", "eps_value", "btilde", "c1"}},
        {"spirals", {}},
        {"trajectory", {"t_end", "step", "refine", "starts"}},
        {"sim", {"dx", "dt", "t_end", "snapshot_steps", "phase_seed", "seed_eps", "detect_threshold", "probe"}},
        {"compare", {"transient", "velocity_window"}},
        {"scan", {"q"}},
        {"outputs", {"svg", "field_dump_stride"}},
    };
    return keys;
}

}  // namespace

ExperimentConfig parse_config(std::istream& is) {
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) throw ValidationError("config: unknown section [" + section + "]");
        if (body.empty() && !body.data().empty())
            throw ValidationError("config: key '" + section + "' outside a section");
        for (const auto& [key, _] : body) {
            if (section == "spirals") {
                if (key.size() < 2 || key[0] != 's') throw ValidationError("config: spiral keys are s0, s1, ...");
                continue;
            }
            if (!it->second.count(key)) throw ValidationError("config: unknown key '" + key + "' in [" + section + "]");
        }
    }
    auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
        const auto sec = tree.get_child_optional(pt::ptree::path_type(section, '/'));
        if (!sec) return std::nullopt;
        const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '/'));
        if (!v) return std::nullopt;
        return *v;
    };
    auto num = [&](const std::string& section, const std::string& key, double& dst) {
        if (auto v = get(section, key)) dst = parse_number(*v, section + "." + key);
    };

    ExperimentConfig c;
    double lx = 200, ly = 200;
    num("domain", "lx", lx);
    num("domain", "ly", ly);
    c.dom = RectDomain(lx, ly);

    num("model", "q", c.q);
    if (auto v = get("model", "law")) c.law = parse_law(*v);
    if (auto v = get("model", "eps_policy")) c.eps_policy.kind = parse_epsilon_kind(*v);
    c.eps_policy.constant_value = EpsilonPolicy::constant_for(c.dom).constant_value;
    num("model", "eps_value", c.eps_policy.constant_value);
    num("model", "btilde", c.btilde);
    num("model", "c1", c.c1);

    if (const auto sec = tree.get_child_optional("spirals")) {
        std::map<int, Spiral> by_index;
        for (const auto& [key, node] : *sec) {
            const int idx = parse_int(key.substr(1), "spirals." + key);
            const auto v = parse_numbers(node.data(), "spirals." + key);
            if (v.size() != 3 || v[2] != std::floor(v[2]))
                throw ValidationError("spirals." + key + ": expected 'x y winding'");
            if (!by_index.emplace(idx, Spiral{Vec2(v[0], v[1]), static_cast<int>(v[2])}).second)
                throw ValidationError("spirals." + key + ": duplicate index");
        }
        int expect = 0;
        for (const auto& [idx, s] : by_index) {
            if (idx != expect++) throw ValidationError("spirals: indices must run 0, 1, 2, ...");
            c.spirals.push_back(s);
        }
    }

    num("trajectory", "t_end", c.t_end);
    num("trajectory", "step", c.step);
    if (auto v = get("trajectory", "refine")) c.refine = parse_bool(*v, "trajectory.refine");
    if (auto v = get("trajectory", "starts")) {
        for (const auto& item : split(*v, ';')) {
            const auto p = parse_numbers(item, "trajectory.starts");
            if (p.size() != 2) throw ValidationError("trajectory.starts: expected 'x y; x y; ...'");
            c.starts.emplace_back(p[0], p[1]);
        }
    }

    if (tree.get_child_optional("sim")) {
        SimParams s;
        s.q = c.q;
        s.c1 = c.c1;
        num("sim", "dx", s.dx);
        num("sim", "dt", s.dt);
        num("sim", "t_end", s.t_end);
        if (auto v = get("sim", "snapshot_steps")) s.snapshot_steps = parse_int(*v, "sim.snapshot_steps");
        if (auto v = get("sim", "phase_seed")) s.phase_seed = parse_phase_seed(*v);
        num("sim", "seed_eps", s.seed_eps);
        num("sim", "detect_threshold", s.detect_threshold);
        if (auto v = get("sim", "probe")) {
            const auto p = parse_numbers(*v, "sim.probe");
            if (p.size() != 2) throw ValidationError("sim.probe: expected 'x y'");
            c.probe = Vec2(p[0], p[1]);
        }
        c.sim = s;
    }

    num("compare", "transient", c.transient);
    if (auto v = get("compare", "velocity_window")) c.velocity_window = parse_int(*v, "compare.velocity_window");
    if (auto v = get("scan", "q")) c.scan_q = parse_numbers(*v, "scan.q");
    if (auto v = get("outputs", "svg")) c.write_svg = parse_bool(*v, "outputs.svg");
    if (auto v = get("outputs", "field_dump_stride")) c.field_dump_stride = parse_int(*v, "outputs.field_dump_stride");

    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
    return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    auto n = format_number;
    os << "[domain]\nlx = " << n(c.dom.lx) << "\nly = " << n(c.dom.ly) << "\n\n";
    os << "[model]\nq = " << n(c.q) << "\nlaw = " << to_string(c.law)
       << "\neps_policy = " << to_string(c.eps_policy.kind) << "\neps_value = " << n(c.eps_policy.constant_value)
       << "\nbtilde = " << n(c.btilde) << "\nc1 = " << n(c.c1) << "\n\n";
    os << "[spirals]\n";
    for (std::size_t i = 0; i < c.spirals.size(); ++i)
        os << "s" << i << " = " << n(c.spirals[i].position.x()) << " " << n(c.spirals[i].position.y()) << " "
           << c.spirals[i].winding << "\n";
    os << "\n[trajectory]\nt_end = " << n(c.t_end) << "\nstep = " << n(c.step)
       << "\nrefine = " << (c.refine ? "true" : "false") << "\n";
    if (!c.starts.empty()) {
        os << "starts = ";
        for (std::size_t i = 0; i < c.starts.size(); ++i)
            os << (i ? "; " : "") << n(c.starts[i].x()) << " " << n(c.starts[i].y());
        os << "\n";
    }
    if (c.sim) {
        const SimParams& s = *c.sim;
        os << "\n[sim]\ndx = " << n(s.dx) << "\ndt = " << n(s.dt) << "\nt_end = " << n(s.t_end)
           << "\nsnapshot_steps = " << s.snapshot_steps << "\nphase_seed = " << to_string(s.phase_seed)
           << "\nseed_eps = " << n(s.seed_eps) << "\ndetect_threshold = " << n(s.detect_threshold) << "\n";
        if (c.probe) os << "probe = " << n(c.probe->x()) << " " << n(c.probe->y()) << "\n";
    }
    os << "\n[compare]\ntransient = " << n(c.transient) << "\nvelocity_window = " << c.velocity_window << "\n";
    if (!c.scan_q.empty()) {
        os << "\n[scan]\nq =";
        for (double q : c.scan_q) os << " " << n(q);
        os << "\n";
    }
    os << "\n[outputs]\nsvg = " << (c.write_svg ? "true" : "false") << "\nfield_dump_stride = " << c.field_dump_stride
       << "\n";
    return os.str();
}

void ExperimentConfig::validate() const {
    if (!(q > 0 && q < 1)) throw ValidationError("q must lie in (0,1)");
    if (!(eps_policy.constant_value > 0 && eps_policy.constant_value < 1))
        throw ValidationError("eps_value must lie in (0,1)");
    if (btilde < 0) throw ValidationError("btilde must be non-negative");
    if (!spirals.empty()) SpiralConfigurationParams{spirals, q, dom, c1, {}}.validate();
    if ((law == Law::near_field || law == Law::b_corrected) && eps_policy.kind == EpsilonPolicy::Kind::constant &&
        q * std::log(1 / eps_policy.constant_value) >= std::numbers::pi / 2)
        throw ValidationError("q log(1/eps) must stay below pi/2 for the near-field laws");
    if (eps_policy.kind == EpsilonPolicy::Kind::symmetric_pair && !spirals.empty() && spirals.size() != 2)
        throw ValidationError("symmetric_pair eps policy needs exactly two spirals");
    for (const Vec2& p : starts)
        if (dom.wall_distance(p) < kMinSeparation) throw ValidationError("trajectory start too close to a wall");
    if (!(t_end > 0)) throw ValidationError("trajectory t_end must be positive");
    if (!(step > 0)) throw ValidationError("trajectory step must be positive");
    if (sim) {
        sim->validate();
        if (sim->q != q || sim->c1 != c1) throw ValidationError("sim q and c1 must match the model section");
        FieldGrid grid_check(dom, sim->dx);
    }
    if (probe && !dom.interior(*probe)) throw ValidationError("probe outside the domain");
    if (transient < 0) throw ValidationError("transient cutoff must be non-negative");
    if (velocity_window < 3) throw ValidationError("velocity_window must be >= 3");
    for (double sq : scan_q)
        if (!(sq > 0 && sq <= 0.5)) throw ValidationError("scan q values must lie in (0, 0.5]");
    if (field_dump_stride < 0) throw ValidationError("field_dump_stride must be non-negative");
}

double ExperimentConfig::resolved_c1() const { return c1 != 0 ? c1 : default_core_profile().c1; }

MotionModel ExperimentConfig::motion_model() const {
    MotionModel m;
    m.q = q;
    m.dom = dom;
    m.c1 = resolved_c1();
    m.law = law;
    m.policy = eps_policy;
    m.btilde = btilde;
    return m;
}

namespace {

bool same_sim(const SimParams& a, const SimParams& b) {
    return a.q == b.q && a.dx == b.dx && a.dt == b.dt && a.t_end == b.t_end && a.snapshot_steps == b.snapshot_steps &&
           a.phase_seed == b.phase_seed && a.seed_eps == b.seed_eps && a.detect_threshold == b.detect_threshold &&
           a.c1 == b.c1;
}

}  // namespace

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    if (a.spirals.size() != b.spirals.size()) return false;
    for (std::size_t i = 0; i < a.spirals.size(); ++i)
        if (a.spirals[i].position != b.spirals[i].position || a.spirals[i].winding != b.spirals[i].winding)
            return false;
    if (a.sim.has_value() != b.sim.has_value() || (a.sim && !same_sim(*a.sim, *b.sim))) return false;
    return a.dom.lx == b.dom.lx && a.dom.ly == b.dom.ly && a.q == b.q && a.law == b.law &&
           a.eps_policy.kind == b.eps_policy.kind && a.eps_policy.constant_value == b.eps_policy.constant_value &&
           a.btilde == b.btilde && a.c1 == b.c1 && a.t_end == b.t_end && a.step == b.step && a.refine == b.refine &&
           a.starts == b.starts && a.probe == b.probe && a.transient == b.transient &&
           a.velocity_window == b.velocity_window && a.scan_q == b.scan_q && a.write_svg == b.write_svg &&
           a.field_dump_stride == b.field_dump_stride;
}

}  // namespace spiralwave
