#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "spiralwave/harness.hpp"

namespace spiralwave {

std::string content_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::map<std::string, std::string> module_versions() {
    return {{"core_profile", "1.0"}, {"greens_rect", "1.0"}, {"wavenumber", "1.0"},
            {"motion", "1.0"},       {"pde_sim", "1.0"},     {"harness", "1.0"}};
}

void write_manifest(const std::filesystem::path& dir, const Manifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["config_hash"] = m.config_hash;
    j["c1"] = format_number(m.c1);
    j["versions"] = m.versions;
    j["results"] = m.results;
    j["outputs"] = m.outputs;
    j["config"] = m.config_text;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << j.dump(2) << "\n";
}

}  // namespace spiralwave
