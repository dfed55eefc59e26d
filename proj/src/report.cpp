#include "rooflinekit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rooflinekit/errors.hpp"
#include "rooflinekit/json_util.hpp"

namespace rooflinekit {

namespace {

json scores_to_json(const MetricScores& scores) {
    return json{{"accuracy", scores.accuracy},
                {"macro_f1", scores.macro_f1},
                {"mcc", scores.mcc},
                {"n", scores.n},
                {"invalid_count", scores.invalid_count}};
}

json matrix_to_json(const ConfusionMatrix2x2& cm) {
    return json{{"compute_compute", cm.compute_compute},
                {"compute_bandwidth", cm.compute_bandwidth},
                {"bandwidth_compute", cm.bandwidth_compute},
                {"bandwidth_bandwidth", cm.bandwidth_bandwidth},
                {"invalid", cm.invalid_count}};
}

json metric_report_to_json(const MetricReport& report) {
    json per_language = json::object();
    for (const auto& [language, scores] : report.per_language)
        per_language[to_string(language)] = scores_to_json(scores);
    return json{{"joint", scores_to_json(report.joint)},
                {"per_language", per_language},
                {"confusion", matrix_to_json(report.joint_matrix)}};
}

std::string format_cell(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

// Best accuracy among the run's rq1 variants with the given prefix, if any.
std::optional<double> best_accuracy(const std::map<std::string, const MetricReport*>& by_mode,
                                    const std::string& prefix) {
    std::optional<double> best;
    for (const auto& [key, report] : by_mode)
        if (key.rfind(prefix, 0) == 0)
            if (!best || report->joint.accuracy > *best) best = report->joint.accuracy;
    return best;
}

std::string number_for_plot(double value) {
    if (std::isinf(value)) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

} // namespace

std::string render_report_json(const EvalReport& report) {
    json models = json::object();
    for (const EvalRun& run : report.runs) {
        json entry = metric_report_to_json(run.report);
        entry["temperature"] = run.temperature;
        entry["top_p"] = run.top_p;
        models[run.model_id][run.mode_key] = std::move(entry);
    }
    json doc{{"schema_version", kReportSchemaVersion}, {"models", models}};
    if (report.chi_squared) {
        const ChiSquaredBlock& chi = *report.chi_squared;
        json rows = json::array();
        for (const ChiSweepRow& row : chi.rows)
            rows.push_back(json{{"label", row.label}, {"counts", row.counts}});
        doc["chi_squared"] = json{{"columns", chi.columns},
                                  {"rows", rows},
                                  {"statistic", chi.result.statistic},
                                  {"dof", chi.result.dof},
                                  {"p_value", chi.result.p_value}};
    }
    return doc.dump(2) + "\n";
}

std::string render_report_text(const EvalReport& report) {
    // Collapse runs into one row per model.
    std::map<std::string, std::map<std::string, const MetricReport*>> by_model;
    for (const EvalRun& run : report.runs) by_model[run.model_id][run.mode_key] = &run.report;

    struct Row {
        std::string model;
        std::map<std::string, const MetricReport*> modes;
        std::optional<double> rq1_acc;
        std::optional<double> rq1_cot_acc;
    };
    std::vector<Row> rows;
    for (auto& [model, modes] : by_model) {
        Row row;
        row.model = model;
        row.rq1_acc = best_accuracy(modes, "rq1_plain");
        row.rq1_cot_acc = best_accuracy(modes, "rq1_cot");
        row.modes = std::move(modes);
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        double av = a.rq1_acc.value_or(-1.0);
        double bv = b.rq1_acc.value_or(-1.0);
        if (av != bv) return av > bv;
        return a.model < b.model;
    });

    std::vector<std::vector<std::string>> cells;
    cells.push_back({"Model", "RQ1 Acc.", "RQ1 CoT Acc.", "RQ2 Acc.", "RQ2 F1", "RQ2 MCC",
                     "RQ3 Acc.", "RQ3 F1", "RQ3 MCC"});
    for (const Row& row : rows) {
        auto cell = [&](const char* key, double MetricScores::*field) -> std::string {
            auto it = row.modes.find(key);
            if (it == row.modes.end()) return "--";
            return format_cell(it->second->joint.*field);
        };
        cells.push_back({row.model,
                         row.rq1_acc ? format_cell(*row.rq1_acc) : "--",
                         row.rq1_cot_acc ? format_cell(*row.rq1_cot_acc) : "--",
                         cell("zero_shot", &MetricScores::accuracy),
                         cell("zero_shot", &MetricScores::macro_f1),
                         cell("zero_shot", &MetricScores::mcc),
                         cell("few_shot", &MetricScores::accuracy),
                         cell("few_shot", &MetricScores::macro_f1),
                         cell("few_shot", &MetricScores::mcc)});
    }

    std::vector<std::size_t> widths(cells[0].size(), 0);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());

    std::ostringstream out;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        for (std::size_t c = 0; c < cells[r].size(); ++c) {
            out << cells[r][c];
            if (c + 1 < cells[r].size())
                out << std::string(widths[c] - cells[r][c].size() + 2, ' ');
        }
        out << "\n";
        if (r == 0) {
            std::size_t line = 0;
            for (std::size_t c = 0; c < widths.size(); ++c) line += widths[c] + (c + 1 < widths.size() ? 2 : 0);
            out << std::string(line, '-') << "\n";
        }
    }

    // Per-shot detail lines under the table.
    out << "\n";
    for (const Row& row : rows) {
        for (const auto& [key, rep] : row.modes) {
            out << row.model << "  " << key << "  acc=" << format_cell(rep->joint.accuracy)
                << "  f1=" << format_cell(rep->joint.macro_f1)
                << "  mcc=" << format_cell(rep->joint.mcc) << "  n=" << rep->joint.n
                << "  invalid=" << rep->joint.invalid_count;
            for (const auto& [language, scores] : rep->per_language)
                out << "  " << to_string(language) << ".acc=" << format_cell(scores.accuracy);
            out << "\n";
        }
    }

    if (report.chi_squared) {
        const ChiSquaredBlock& chi = *report.chi_squared;
        out << "\nchi-squared hyperparameter sensitivity\n";
        for (const ChiSweepRow& row : chi.rows) {
            out << "  " << row.label << ":";
            for (std::size_t c = 0; c < row.counts.size(); ++c)
                out << " " << chi.columns[c] << "=" << row.counts[c];
            out << "\n";
        }
        char line[160];
        std::snprintf(line, sizeof(line), "  statistic=%.6f dof=%d p=%.6g\n", chi.result.statistic,
                      chi.result.dof, chi.result.p_value);
        out << line;
    }
    return out.str();
}

void emit_report(const EvalReport& report, const std::filesystem::path& path,
                 const std::string& format) {
    if (format == "json") {
        write_text_file(path, render_report_json(report));
    } else if (format == "text") {
        write_text_file(path, render_report_text(report));
    } else {
        throw SchemaError("unknown report format: " + format);
    }
}

void emit_roofline_plot_data(const std::map<std::string, LabeledProgram>& programs,
                             const HardwareSpec& spec, const std::filesystem::path& path) {
    spec.validate();
    std::ostringstream out;
    out << "# roofline plot data v1, hardware: " << spec.name << "\n";
    out << "# series\tkind\tai\tgops\tlabel\tprogram_id\tkernel_name\n";

    for (OpKind kind : kOpKinds) {
        double peak = spec.peak.at(kind);
        double balance = balance_point(peak, spec.bandwidth_gbs);
        const double lo = balance / 100.0;
        const double hi = balance * 100.0;
        for (double ai : {lo, balance, hi}) {
            out << "roof\t" << to_string(kind) << "\t" << number_for_plot(ai) << "\t"
                << number_for_plot(roofline_ceiling(ai, spec, kind)) << "\t\t\t\n";
        }
    }
    for (const auto& [program, labeled] : programs) {
        for (OpKind kind : kOpKinds) {
            const RooflinePoint& point = labeled.label.points.at(kind);
            out << "point\t" << to_string(kind) << "\t" << number_for_plot(point.ai) << "\t"
                << number_for_plot(point.achieved_gops) << "\t" << to_string(point.label) << "\t"
                << program << "\t" << labeled.profile.kernel_name << "\n";
        }
    }
    write_text_file(path, out.str());
}

} // namespace rooflinekit
