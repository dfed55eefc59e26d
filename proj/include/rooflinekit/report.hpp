#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rooflinekit/ingest.hpp"
#include "rooflinekit/metrics.hpp"
#include "rooflinekit/stats.hpp"

namespace rooflinekit {

// Scored results of one query run, keyed for report assembly.
struct EvalRun {
    std::string model_id;
    std::string mode_key; // "rq1_plain_2", "rq1_cot_8", "zero_shot", "few_shot"
    double temperature = 0.0;
    double top_p = 0.0;
    MetricReport report;
};

struct ChiSweepRow {
    std::string label; // e.g. "temperature=0.1 top_p=0.2"
    std::vector<double> counts;
};

struct ChiSquaredBlock {
    std::vector<std::string> columns;
    std::vector<ChiSweepRow> rows;
    ChiSquaredResult result;
};

struct EvalReport {
    std::vector<EvalRun> runs;
    std::optional<ChiSquaredBlock> chi_squared;
};

inline constexpr int kReportSchemaVersion = 1;

std::string render_report_json(const EvalReport& report);

// Plain-text table, one row per model, sorted by best rq1_plain accuracy
// (descending; models without rq1 runs go last). Missing cells render as "--".
std::string render_report_text(const EvalReport& report);

// format is "json" or "text".
void emit_report(const EvalReport& report, const std::filesystem::path& path,
                 const std::string& format);

// Per-kind roofline polylines (memory slope, knee at the balance point, flat
// peak) plus one scatter row per (kernel, op kind), as tab-separated columns.
void emit_roofline_plot_data(const std::map<std::string, LabeledProgram>& programs,
                             const HardwareSpec& spec, const std::filesystem::path& path);

} // namespace rooflinekit
