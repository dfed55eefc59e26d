#include "rooflinekit/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <tuple>

#include "rooflinekit/errors.hpp"
#include "rooflinekit/json_util.hpp"

namespace rooflinekit {

namespace {

const char* kRequiredColumns[] = {"program_id", "kernel_name", "kernel_order", "invocation",
                                  "language",   "grid_x",      "grid_y",       "grid_z",
                                  "block_x",    "block_y",     "block_z",      "args",
                                  "metric",     "value"};

// Splits one delimiter-separated line; double quotes guard embedded
// delimiters, "" inside a quoted field is a literal quote.
std::vector<std::string> split_fields(const std::string& line, char delimiter, long line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"' && current.empty()) {
            in_quotes = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", line_no);
    fields.push_back(std::move(current));
    return fields;
}

int parse_int(const std::string& text, const char* what, long line_no) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("bad integer for ") + what + ": '" + text + "'", line_no);
    }
}

double parse_double(const std::string& text, const char* what, long line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("bad number for ") + what + ": '" + text + "'", line_no);
    }
}

MetricRole role_from_string(const std::string& text) {
    if (text == "sp_ops") return MetricRole::sp_ops;
    if (text == "dp_ops") return MetricRole::dp_ops;
    if (text == "int_ops") return MetricRole::int_ops;
    if (text == "read_traffic") return MetricRole::read_traffic;
    if (text == "write_traffic") return MetricRole::write_traffic;
    if (text == "time") return MetricRole::time;
    throw SchemaError("unknown metric role: " + text);
}

} // namespace

const char* to_string(MetricRole role) {
    switch (role) {
    case MetricRole::sp_ops: return "sp_ops";
    case MetricRole::dp_ops: return "dp_ops";
    case MetricRole::int_ops: return "int_ops";
    case MetricRole::read_traffic: return "read_traffic";
    case MetricRole::write_traffic: return "write_traffic";
    case MetricRole::time: return "time";
    }
    return "?";
}

IngestConfig IngestConfig::from_file(const std::filesystem::path& path) {
    json doc = read_json_file(path);
    IngestConfig config;
    try {
        if (doc.contains("delimiter")) {
            std::string d = doc.at("delimiter").get<std::string>();
            if (d.size() != 1) throw SchemaError("delimiter must be a single character");
            config.delimiter = d[0];
        }
        if (doc.contains("bytes_per_transaction"))
            config.bytes_per_transaction = doc.at("bytes_per_transaction").get<double>();
        for (const auto& [name, spec] : doc.at("metrics").items()) {
            MetricMapping mapping;
            mapping.role = role_from_string(spec.at("role").get<std::string>());
            if (spec.contains("unit")) {
                std::string unit = spec.at("unit").get<std::string>();
                if (unit == "transactions") mapping.unit = TrafficUnit::transactions;
                else if (unit == "bytes") mapping.unit = TrafficUnit::bytes;
                else throw SchemaError("unknown traffic unit: " + unit);
            }
            if (spec.contains("scale")) mapping.time_scale = spec.at("scale").get<double>();
            config.metrics[name] = mapping;
        }
    } catch (const json::exception& e) {
        throw SchemaError("bad ingest config " + path.string() + ": " + e.what());
    }
    config.validate();
    return config;
}

void IngestConfig::validate() const {
    if (!(bytes_per_transaction > 0.0))
        throw SchemaError("ingest config: bytes_per_transaction must be > 0");
    for (MetricRole role : {MetricRole::sp_ops, MetricRole::dp_ops, MetricRole::int_ops,
                            MetricRole::read_traffic, MetricRole::write_traffic, MetricRole::time}) {
        bool covered = std::any_of(metrics.begin(), metrics.end(),
                                   [role](const auto& kv) { return kv.second.role == role; });
        if (!covered)
            throw SchemaError(std::string("ingest config: no metric mapped to role ") +
                              to_string(role));
    }
}

std::vector<ProfileRow> parse_profile_export(const std::filesystem::path& path,
                                             const IngestConfig& config, ParseStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open profile export " + path.string());

    std::string line;
    long line_no = 0;

    if (!std::getline(in, line)) throw SchemaError("empty profile export: " + path.string());
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_fields(line, config.delimiter, line_no);
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
    for (const char* name : kRequiredColumns)
        if (!column.count(name))
            throw SchemaError("profile export " + path.string() + ": missing column '" + name + "'");

    std::vector<ProfileRow> rows;
    std::set<std::tuple<std::string, std::string, int, std::string>> seen;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields = split_fields(line, config.delimiter, line_no);
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        auto field = [&](const char* name) -> const std::string& {
            return fields[column.at(name)];
        };

        ProfileRow row;
        row.program_id = field("program_id");
        row.kernel_name = field("kernel_name");
        row.kernel_order = parse_int(field("kernel_order"), "kernel_order", line_no);
        row.invocation_index = parse_int(field("invocation"), "invocation", line_no);
        if (row.invocation_index < 0) throw ParseError("negative invocation index", line_no);
        try {
            row.language = language_from_string(field("language"));
        } catch (const std::domain_error& e) {
            throw ParseError(e.what(), line_no);
        }
        row.grid = Dim3{parse_int(field("grid_x"), "grid_x", line_no),
                        parse_int(field("grid_y"), "grid_y", line_no),
                        parse_int(field("grid_z"), "grid_z", line_no)};
        row.block = Dim3{parse_int(field("block_x"), "block_x", line_no),
                         parse_int(field("block_y"), "block_y", line_no),
                         parse_int(field("block_z"), "block_z", line_no)};
        row.args = field("args");
        row.metric_name = field("metric");
        row.metric_value = parse_double(field("value"), "value", line_no);

        if (!config.metrics.count(row.metric_name)) {
            if (stats) {
                ++stats->ignored_metric_rows;
                stats->ignored_metric_names.insert(row.metric_name);
            }
            continue;
        }
        auto key = std::make_tuple(row.program_id, row.kernel_name, row.invocation_index,
                                   row.metric_name);
        if (!seen.insert(key).second)
            throw ParseError("duplicate metric row for (" + row.program_id + ", " +
                                 row.kernel_name + ", " + std::to_string(row.invocation_index) +
                                 ", " + row.metric_name + ")",
                             line_no);
        rows.push_back(std::move(row));
        if (stats) ++stats->rows_parsed;
    }
    return rows;
}

std::map<std::string, std::string> select_first_kernel(const std::vector<ProfileRow>& rows,
                                                       std::vector<std::string>* warnings) {
    if (rows.empty()) throw SchemaError("select_first_kernel: no rows");

    // program -> kernel -> smallest kernel_order among invocation-0 rows
    std::map<std::string, std::map<std::string, int>> orders;
    std::set<std::string> all_programs;
    for (const ProfileRow& row : rows) {
        all_programs.insert(row.program_id);
        if (row.invocation_index != 0) continue;
        auto& per_kernel = orders[row.program_id];
        auto it = per_kernel.find(row.kernel_name);
        if (it == per_kernel.end() || row.kernel_order < it->second)
            per_kernel[row.kernel_name] = row.kernel_order;
    }

    std::map<std::string, std::string> first;
    for (const std::string& program : all_programs) {
        auto it = orders.find(program);
        if (it == orders.end() || it->second.empty()) {
            if (warnings)
                warnings->push_back("program '" + program +
                                    "' has no first-invocation kernel rows; excluded");
            continue;
        }
        const auto& per_kernel = it->second;
        auto best = per_kernel.begin();
        for (auto k = per_kernel.begin(); k != per_kernel.end(); ++k)
            if (k->second < best->second) best = k;
        first[program] = best->first;
    }
    return first;
}

KernelProfile to_kernel_profile(const std::vector<ProfileRow>& kernel_rows,
                                const IngestConfig& config) {
    std::map<MetricRole, double> totals;
    std::optional<ProfileRow> meta;

    for (const ProfileRow& row : kernel_rows) {
        if (row.invocation_index != 0) continue;
        if (!meta) meta = row;
        auto it = config.metrics.find(row.metric_name);
        if (it == config.metrics.end()) continue;
        const MetricMapping& mapping = it->second;
        double value = row.metric_value;
        switch (mapping.role) {
        case MetricRole::read_traffic:
        case MetricRole::write_traffic:
            if (mapping.unit == TrafficUnit::transactions) value *= config.bytes_per_transaction;
            break;
        case MetricRole::time:
            value *= mapping.time_scale;
            break;
        default:
            break;
        }
        totals[mapping.role] += value;
    }

    if (!meta) throw IncompleteProfileError("kernel has no first-invocation rows");

    auto require = [&](MetricRole role) -> double {
        auto it = totals.find(role);
        if (it == totals.end())
            throw IncompleteProfileError("kernel '" + meta->kernel_name + "' of program '" +
                                         meta->program_id + "': missing metric for role " +
                                         to_string(role));
        return it->second;
    };

    KernelProfile profile;
    profile.program_id = meta->program_id;
    profile.kernel_name = meta->kernel_name;
    profile.language = meta->language;
    profile.grid = meta->grid;
    profile.block = meta->block;
    profile.launch_args = meta->args;
    profile.op_counts[OpKind::SP] = require(MetricRole::sp_ops);
    profile.op_counts[OpKind::DP] = require(MetricRole::dp_ops);
    profile.op_counts[OpKind::INT] = require(MetricRole::int_ops);
    profile.bytes_read = require(MetricRole::read_traffic);
    profile.bytes_written = require(MetricRole::write_traffic);
    profile.exec_time_s = require(MetricRole::time);

    try {
        profile.validate();
    } catch (const std::domain_error& e) {
        throw SchemaError("invalid profile for kernel '" + profile.kernel_name + "' of program '" +
                          profile.program_id + "': " + e.what());
    }
    return profile;
}

std::map<std::string, LabeledProgram> label_programs(
    const std::map<std::string, KernelProfile>& profiles, const HardwareSpec& spec) {
    std::map<std::string, LabeledProgram> out;
    for (const auto& [program, profile] : profiles)
        out[program] = LabeledProgram{profile, label_kernel(profile, spec)};
    return out;
}

IngestResult ingest_directory(const std::filesystem::path& dir, const IngestConfig& config,
                              const HardwareSpec& spec) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no profile exports in " + dir.string());

    IngestResult result;
    std::map<std::string, std::vector<ProfileRow>> rows_by_program;

    for (const fs::path& file : files) {
        std::vector<ProfileRow> rows;
        try {
            rows = parse_profile_export(file, config, &result.stats);
        } catch (const ParseError& e) {
            throw ParseError(file.string() + ": " + e.what());
        }
        std::map<std::string, std::vector<ProfileRow>> in_file;
        for (ProfileRow& row : rows) in_file[row.program_id].push_back(std::move(row));
        for (auto& [program, program_rows] : in_file) {
            if (rows_by_program.count(program))
                result.warnings.push_back("program '" + program + "' appears in multiple exports; " +
                                          file.filename().string() + " wins");
            rows_by_program[program] = std::move(program_rows);
        }
    }

    std::vector<ProfileRow> merged;
    for (const auto& [program, rows] : rows_by_program)
        merged.insert(merged.end(), rows.begin(), rows.end());

    std::map<std::string, std::string> first = select_first_kernel(merged, &result.warnings);

    std::map<std::string, KernelProfile> profiles;
    for (const auto& [program, kernel] : first) {
        std::vector<ProfileRow> kernel_rows;
        for (const ProfileRow& row : rows_by_program.at(program))
            if (row.kernel_name == kernel) kernel_rows.push_back(row);
        profiles[program] = to_kernel_profile(kernel_rows, config);
    }

    result.programs = label_programs(profiles, spec);
    for (const auto& [program, labeled] : result.programs)
        for (const std::string& w : labeled.label.warnings)
            result.warnings.push_back(program + ": " + w);
    return result;
}

void save_profiles(const std::filesystem::path& path, const ProfilesFile& file) {
    json programs = json::object();
    for (const auto& [program, labeled] : file.programs) {
        json entry = to_json(labeled.profile);
        entry["classification"] = to_json(labeled.label);
        programs[program] = std::move(entry);
    }
    json doc{{"schema_version", kProfilesSchemaVersion},
             {"hardware", to_json(file.hardware)},
             {"programs", programs},
             {"warnings", file.warnings}};
    write_text_file(path, doc.dump(2) + "\n");
}

ProfilesFile load_profiles(const std::filesystem::path& path) {
    json doc = read_json_file(path);
    if (!doc.contains("schema_version"))
        throw LoadError("profiles file " + path.string() + ": missing schema_version");
    if (doc.at("schema_version").get<int>() != kProfilesSchemaVersion)
        throw LoadError("profiles file " + path.string() + ": unsupported schema version");

    ProfilesFile file;
    file.hardware = hardware_spec_from_json(doc.at("hardware"));
    for (const auto& [program, entry] : doc.at("programs").items()) {
        LabeledProgram labeled;
        labeled.profile = kernel_profile_from_json(entry);
        labeled.label = kernel_label_from_json(entry.at("classification"));
        file.programs[program] = std::move(labeled);
    }
    if (doc.contains("warnings"))
        file.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return file;
}

} // namespace rooflinekit
