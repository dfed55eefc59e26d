#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rooflinekit/roofline.hpp"

namespace rooflinekit {

enum class Split { train, validation, unassigned };

const char* to_string(Split split);
Split split_from_string(const std::string& text);

// One classification sample: whole-program source bundle plus label and the
// launch metadata the prompts need.
struct DatasetSample {
    std::string program_id;
    Language language = Language::CUDA;
    std::string kernel_name;
    std::string source_text;
    std::size_t token_count = 0;
    Boundedness label = Boundedness::Bandwidth;
    Split split = Split::unassigned;
    Dim3 grid;
    Dim3 block;
    std::string launch_args;
};

std::vector<std::string> default_source_allowlist();

struct BuildConfig {
    int token_cutoff = 8000;
    std::uint64_t seed = 0;
    double split_fraction = 0.8;
    std::string tokenizer_id = "approx-chars4";
    std::vector<std::string> allowlist = default_source_allowlist();

    void validate() const;
};

// Concatenate every allowlisted file under program_dir in lexicographic path
// order, each preceded by a one-line "// File: <relpath>" header.
std::string scrape_sources(const std::filesystem::path& program_dir,
                           const std::vector<std::string>& extension_allowlist);

// Keep samples with token_count <= cutoff.
std::vector<DatasetSample> prune_by_tokens(std::vector<DatasetSample> samples, int cutoff);

// Down-sample every (language, class) bucket to the smallest bucket size via
// seeded sampling without replacement; result sorted by (language, class,
// program_id). Throws BalanceError naming any empty bucket.
std::vector<DatasetSample> balance(std::vector<DatasetSample> samples, std::uint64_t seed);

// Per-bucket split: floor(fraction * n) train, rest validation, after a seeded
// shuffle inside each bucket.
std::vector<DatasetSample> split(std::vector<DatasetSample> samples, double fraction,
                                 std::uint64_t seed);

inline constexpr int kDatasetSchemaVersion = 1;

struct Dataset {
    BuildConfig config;
    bool tokenizer_approximate = false;
    HardwareSpec hardware; // copied from the labeled profiles the samples came from
    std::vector<DatasetSample> samples;
};

void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);

} // namespace rooflinekit
