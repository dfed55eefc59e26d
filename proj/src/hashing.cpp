#include "rooflinekit/hashing.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include "rooflinekit/errors.hpp"

namespace rooflinekit {

namespace {

std::string to_hex(const unsigned char* digest, unsigned len) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

} // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("sha256 digest failed");
    return to_hex(digest, len);
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return sha256_hex(buf.str());
}

std::string sha256_tree(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::exists(root)) throw IoError("no such path: " + root.string());
    if (fs::is_regular_file(root)) return sha256_file(root);

    std::vector<std::string> rels;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            rels.push_back(fs::relative(entry.path(), root).generic_string());
    std::sort(rels.begin(), rels.end());

    std::string acc;
    for (const auto& rel : rels) {
        acc += rel;
        acc += '\0';
        acc += sha256_file(root / rel);
        acc += '\n';
    }
    return sha256_hex(acc);
}

} // namespace rooflinekit
