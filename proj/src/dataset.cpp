#include "rooflinekit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "rooflinekit/errors.hpp"
#include "rooflinekit/json_util.hpp"
#include "rooflinekit/rng.hpp"

namespace rooflinekit {

namespace {

using Bucket = std::pair<Language, Boundedness>;

std::string bucket_name(const Bucket& b) {
    return std::string(to_string(b.first)) + "/" + to_string(b.second);
}

std::map<Bucket, std::vector<DatasetSample>> group_by_bucket(std::vector<DatasetSample> samples) {
    std::map<Bucket, std::vector<DatasetSample>> buckets;
    for (DatasetSample& s : samples) buckets[{s.language, s.label}].push_back(std::move(s));
    return buckets;
}

void sort_canonical(std::vector<DatasetSample>& samples) {
    std::sort(samples.begin(), samples.end(), [](const DatasetSample& a, const DatasetSample& b) {
        return std::make_tuple(static_cast<int>(a.language), static_cast<int>(a.label),
                               a.program_id) <
               std::make_tuple(static_cast<int>(b.language), static_cast<int>(b.label),
                               b.program_id);
    });
}

json sample_to_json(const DatasetSample& s) {
    return json{{"program_id", s.program_id},
                {"language", to_string(s.language)},
                {"kernel_name", s.kernel_name},
                {"source_text", s.source_text},
                {"token_count", s.token_count},
                {"label", to_string(s.label)},
                {"split", to_string(s.split)},
                {"grid", to_json(s.grid)},
                {"block", to_json(s.block)},
                {"args", s.launch_args}};
}

DatasetSample sample_from_json(const json& value) {
    DatasetSample s;
    try {
        s.program_id = value.at("program_id").get<std::string>();
        s.language = language_from_string(value.at("language").get<std::string>());
        s.kernel_name = value.at("kernel_name").get<std::string>();
        s.source_text = value.at("source_text").get<std::string>();
        s.token_count = value.at("token_count").get<std::size_t>();
        s.label = boundedness_from_string(value.at("label").get<std::string>());
        s.split = split_from_string(value.at("split").get<std::string>());
        s.grid = dim3_from_json(value.at("grid"));
        s.block = dim3_from_json(value.at("block"));
        s.launch_args = value.at("args").get<std::string>();
    } catch (const json::exception& e) {
        throw LoadError(std::string("bad dataset sample: ") + e.what());
    } catch (const std::domain_error& e) {
        throw LoadError(std::string("bad dataset sample: ") + e.what());
    }
    return s;
}

} // namespace

const char* to_string(Split split) {
    switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::unassigned: return "unassigned";
    }
    return "?";
}

Split split_from_string(const std::string& text) {
    if (text == "train") return Split::train;
    if (text == "validation") return Split::validation;
    if (text == "unassigned") return Split::unassigned;
    throw std::domain_error("unknown split: " + text);
}

std::vector<std::string> default_source_allowlist() {
    return {".c", ".cc", ".cpp", ".cxx", ".cu", ".cuh", ".h", ".hh", ".hpp", ".inl"};
}

void BuildConfig::validate() const {
    if (token_cutoff <= 0) throw SchemaError("build config: token_cutoff must be > 0");
    if (!(split_fraction > 0.0 && split_fraction < 1.0))
        throw SchemaError("build config: split_fraction must be in (0, 1)");
    if (allowlist.empty()) throw SchemaError("build config: empty extension allowlist");
}

std::string scrape_sources(const std::filesystem::path& program_dir,
                           const std::vector<std::string>& extension_allowlist) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(program_dir)) throw IoError("not a directory: " + program_dir.string());

    std::vector<std::string> rels;
    for (const auto& entry : fs::recursive_directory_iterator(program_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        if (std::find(extension_allowlist.begin(), extension_allowlist.end(), ext) !=
            extension_allowlist.end())
            rels.push_back(fs::relative(entry.path(), program_dir).generic_string());
    }
    if (rels.empty())
        throw PipelineError("no source files matching the allowlist under " +
                            program_dir.string());
    std::sort(rels.begin(), rels.end());

    std::string out;
    for (const std::string& rel : rels) {
        out += "// File: " + rel + "\n";
        out += read_text_file(program_dir / rel);
        if (!out.empty() && out.back() != '\n') out += '\n';
    }
    return out;
}

std::vector<DatasetSample> prune_by_tokens(std::vector<DatasetSample> samples, int cutoff) {
    samples.erase(std::remove_if(samples.begin(), samples.end(),
                                 [cutoff](const DatasetSample& s) {
                                     return s.token_count > static_cast<std::size_t>(cutoff);
                                 }),
                  samples.end());
    return samples;
}

std::vector<DatasetSample> balance(std::vector<DatasetSample> samples, std::uint64_t seed) {
    auto buckets = group_by_bucket(std::move(samples));

    for (Language lang : {Language::CUDA, Language::OMP})
        for (Boundedness label : {Boundedness::Compute, Boundedness::Bandwidth})
            if (!buckets.count({lang, label}) || buckets[{lang, label}].empty())
                throw BalanceError("empty language/class bucket: " +
                                   bucket_name({lang, label}));

    std::size_t smallest = SIZE_MAX;
    for (const auto& [bucket, members] : buckets) smallest = std::min(smallest, members.size());

    Rng rng(seed);
    std::vector<DatasetSample> out;
    // Iterate buckets in map order (CUDA before OMP, Compute before Bandwidth)
    // so the RNG draw sequence is stable.
    for (auto& [bucket, members] : buckets) {
        std::sort(members.begin(), members.end(),
                  [](const DatasetSample& a, const DatasetSample& b) {
                      return a.program_id < b.program_id;
                  });
        std::vector<std::size_t> order(members.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        order.resize(smallest);
        std::sort(order.begin(), order.end());
        for (std::size_t idx : order) out.push_back(std::move(members[idx]));
    }
    sort_canonical(out);
    return out;
}

std::vector<DatasetSample> split(std::vector<DatasetSample> samples, double fraction,
                                 std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::domain_error("split fraction must be in (0, 1)");

    auto buckets = group_by_bucket(std::move(samples));
    Rng rng(seed);
    std::vector<DatasetSample> out;
    for (auto& [bucket, members] : buckets) {
        std::sort(members.begin(), members.end(),
                  [](const DatasetSample& a, const DatasetSample& b) {
                      return a.program_id < b.program_id;
                  });
        rng.shuffle(members);
        auto n_train = static_cast<std::size_t>(
            std::floor(fraction * static_cast<double>(members.size()) + 1e-9));
        for (std::size_t i = 0; i < members.size(); ++i) {
            members[i].split = i < n_train ? Split::train : Split::validation;
            out.push_back(std::move(members[i]));
        }
    }
    sort_canonical(out);
    return out;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
    json samples = json::array();
    for (const DatasetSample& s : dataset.samples) samples.push_back(sample_to_json(s));
    json doc{{"schema_version", kDatasetSchemaVersion},
             {"config",
              {{"token_cutoff", dataset.config.token_cutoff},
               {"seed", dataset.config.seed},
               {"split_fraction", dataset.config.split_fraction},
               {"tokenizer_id", dataset.config.tokenizer_id},
               {"tokenizer_approximate", dataset.tokenizer_approximate},
               {"allowlist", dataset.config.allowlist}}},
             {"hardware", to_json(dataset.hardware)},
             {"samples", samples}};
    write_text_file(path, doc.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& path) {
    json doc = read_json_file(path);
    if (!doc.is_object() || !doc.contains("schema_version"))
        throw LoadError("dataset file " + path.string() + ": missing schema_version");
    if (doc.at("schema_version").get<int>() != kDatasetSchemaVersion)
        throw LoadError("dataset file " + path.string() + ": unsupported schema version");

    Dataset dataset;
    try {
        const json& config = doc.at("config");
        dataset.config.token_cutoff = config.at("token_cutoff").get<int>();
        dataset.config.seed = config.at("seed").get<std::uint64_t>();
        dataset.config.split_fraction = config.at("split_fraction").get<double>();
        dataset.config.tokenizer_id = config.at("tokenizer_id").get<std::string>();
        dataset.tokenizer_approximate = config.at("tokenizer_approximate").get<bool>();
        dataset.config.allowlist = config.at("allowlist").get<std::vector<std::string>>();
        dataset.hardware = hardware_spec_from_json(doc.at("hardware"));
        for (const json& sample : doc.at("samples")) dataset.samples.push_back(sample_from_json(sample));
    } catch (const json::exception& e) {
        throw LoadError("dataset file " + path.string() + ": " + e.what());
    }
    return dataset;
}

} // namespace rooflinekit
