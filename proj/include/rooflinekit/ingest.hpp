#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rooflinekit/roofline.hpp"

namespace rooflinekit {

// One metric row from a profiler export. Column layout (header row required):
// program_id,kernel_name,kernel_order,invocation,language,
// grid_x,grid_y,grid_z,block_x,block_y,block_z,args,metric,value
struct ProfileRow {
    std::string program_id;
    std::string kernel_name;
    int kernel_order = 0;
    int invocation_index = 0;
    Language language = Language::CUDA;
    Dim3 grid;
    Dim3 block;
    std::string args;
    std::string metric_name;
    double metric_value = 0.0;
};

enum class MetricRole { sp_ops, dp_ops, int_ops, read_traffic, write_traffic, time };

const char* to_string(MetricRole role);

enum class TrafficUnit { transactions, bytes };

struct MetricMapping {
    MetricRole role = MetricRole::sp_ops;
    TrafficUnit unit = TrafficUnit::transactions; // traffic roles only
    double time_scale = 1.0;                      // multiply raw value into seconds
};

// Adapts any profiler's metric names onto the six required roles.
struct IngestConfig {
    char delimiter = ',';
    double bytes_per_transaction = 32.0;
    std::map<std::string, MetricMapping> metrics;

    static IngestConfig from_file(const std::filesystem::path& path);
    // Throws SchemaError unless all six roles are covered.
    void validate() const;
};

struct ParseStats {
    std::size_t rows_parsed = 0;
    std::size_t ignored_metric_rows = 0;
    std::set<std::string> ignored_metric_names;
};

// Parse one export file. Unknown metric names are skipped and tallied in
// stats; malformed rows raise ParseError with the line number, a bad header
// SchemaError naming the missing column.
std::vector<ProfileRow> parse_profile_export(const std::filesystem::path& path,
                                             const IngestConfig& config,
                                             ParseStats* stats = nullptr);

// Per program, the kernel whose first-invocation rows carry the smallest
// kernel_order. Programs without any invocation-0 rows are dropped with a warning.
std::map<std::string, std::string> select_first_kernel(const std::vector<ProfileRow>& rows,
                                                       std::vector<std::string>* warnings = nullptr);

// Collapse the invocation-0 rows of one kernel into a profile. Traffic metrics
// marked as transaction counts are scaled by bytes_per_transaction.
KernelProfile to_kernel_profile(const std::vector<ProfileRow>& kernel_rows,
                                const IngestConfig& config);

struct LabeledProgram {
    KernelProfile profile;
    KernelLabel label;
};

std::map<std::string, LabeledProgram> label_programs(const std::map<std::string, KernelProfile>& profiles,
                                                     const HardwareSpec& spec);

struct IngestResult {
    std::map<std::string, LabeledProgram> programs; // keyed by program_id
    std::vector<std::string> warnings;
    ParseStats stats;
};

// Ingest every regular file in a directory (sorted by path; on duplicate
// program ids the later file wins with a warning), then label all programs.
IngestResult ingest_directory(const std::filesystem::path& dir, const IngestConfig& config,
                              const HardwareSpec& spec);

struct ProfilesFile {
    HardwareSpec hardware;
    std::map<std::string, LabeledProgram> programs;
    std::vector<std::string> warnings;
};

inline constexpr int kProfilesSchemaVersion = 1;

void save_profiles(const std::filesystem::path& path, const ProfilesFile& file);
ProfilesFile load_profiles(const std::filesystem::path& path);

} // namespace rooflinekit
