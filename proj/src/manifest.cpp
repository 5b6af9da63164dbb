#include "gisl/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "gisl/data.hpp"

namespace gisl {

std::string file_hash(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::uint64_t h = 1469598103934665603ULL;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

nlohmann::json to_json(const RunManifest& m) {
    auto files = [](const std::vector<std::filesystem::path>& ps) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : ps) {
            nlohmann::json e = {{"path", p.string()}};
            std::error_code ec;
            if (std::filesystem::is_regular_file(p, ec)) e["fnv1a64"] = file_hash(p);
            arr.push_back(e);
        }
        return arr;
    };
    return {{"format", "gisl-run-manifest"},
            {"tool", "gisl"},
            {"version", kToolVersion},
            {"command", m.command},
            {"seed", m.seed},
            {"config", m.config},
            {"inputs", files(m.inputs)},
            {"outputs", files(m.outputs)}};
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
    write_file_atomic(path, to_json(m).dump(2) + "\n");
}

}  // namespace gisl
