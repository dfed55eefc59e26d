#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace rooflinekit {

// Reproducibility sidecar written next to every subcommand output: the
// resolved configuration, content hashes of all inputs, and every seed used.
struct RunManifest {
    std::string subcommand;
    nlohmann::json config = nlohmann::json::object();
    std::map<std::string, std::string> input_hashes; // label -> sha256
    std::map<std::string, std::uint64_t> seeds;
    std::string tool_version;
    std::string timestamp;

    void add_input(const std::string& label, const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;
};

RunManifest make_manifest(const std::string& subcommand);

} // namespace rooflinekit
