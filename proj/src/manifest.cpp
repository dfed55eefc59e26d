#include "rooflinekit/manifest.hpp"

#include <ctime>

#include "rooflinekit/hashing.hpp"
#include "rooflinekit/json_util.hpp"
#include "rooflinekit/version.hpp"

namespace rooflinekit {

void RunManifest::add_input(const std::string& label, const std::filesystem::path& path) {
    input_hashes[label] = sha256_tree(path);
}

void RunManifest::write(const std::filesystem::path& path) const {
    json doc{{"schema_version", 1},
             {"subcommand", subcommand},
             {"tool_version", tool_version},
             {"timestamp", timestamp},
             {"config", config},
             {"inputs", input_hashes},
             {"seeds", seeds}};
    write_text_file(path, doc.dump(2) + "\n");
}

RunManifest make_manifest(const std::string& subcommand) {
    RunManifest manifest;
    manifest.subcommand = subcommand;
    manifest.tool_version = kVersion;
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    manifest.timestamp = buf;
    return manifest;
}

} // namespace rooflinekit
