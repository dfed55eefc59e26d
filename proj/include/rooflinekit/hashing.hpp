#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace rooflinekit {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// SHA-256 of a file's contents. Throws IoError if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

// Combined hash over a directory tree: sorted relative paths + content hashes.
std::string sha256_tree(const std::filesystem::path& root);

} // namespace rooflinekit
