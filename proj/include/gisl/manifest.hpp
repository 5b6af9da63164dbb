#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace gisl {

inline constexpr const char* kToolVersion = "0.1.0";

std::string file_hash(const std::filesystem::path& p);  // FNV-1a 64, hex

struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> outputs;
};

nlohmann::json to_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::filesystem::path& path);

}  // namespace gisl
