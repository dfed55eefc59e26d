#include "rooflinekit/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace rooflinekit {

namespace {

double f1_for_class(long tp, long fp, long fn) {
    double precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    double recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

} // namespace

void ConfusionMatrix2x2::add(Boundedness truth, const std::optional<Boundedness>& prediction) {
    if (!prediction) {
        ++invalid_count;
        return;
    }
    if (truth == Boundedness::Compute) {
        if (*prediction == Boundedness::Compute) ++compute_compute;
        else ++compute_bandwidth;
    } else {
        if (*prediction == Boundedness::Compute) ++bandwidth_compute;
        else ++bandwidth_bandwidth;
    }
}

double accuracy(const ConfusionMatrix2x2& cm) {
    long total = cm.total();
    if (total == 0) throw std::domain_error("accuracy: empty matrix");
    return 100.0 * static_cast<double>(cm.compute_compute + cm.bandwidth_bandwidth) /
           static_cast<double>(total);
}

double macro_f1(const ConfusionMatrix2x2& cm) {
    if (cm.total() == 0) throw std::domain_error("macro_f1: empty matrix");
    double f1_compute =
        f1_for_class(cm.compute_compute, cm.bandwidth_compute, cm.compute_bandwidth);
    double f1_bandwidth =
        f1_for_class(cm.bandwidth_bandwidth, cm.compute_bandwidth, cm.bandwidth_compute);
    return 100.0 * (f1_compute + f1_bandwidth) / 2.0;
}

double mcc(const ConfusionMatrix2x2& cm) {
    if (cm.total() == 0) throw std::domain_error("mcc: empty matrix");
    // Compute as the positive class; swapping classes gives the same value.
    double tp = static_cast<double>(cm.compute_compute);
    double tn = static_cast<double>(cm.bandwidth_bandwidth);
    double fp = static_cast<double>(cm.bandwidth_compute);
    double fn = static_cast<double>(cm.compute_bandwidth);
    double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    if (denom == 0.0) return 0.0;
    return 100.0 * (tp * tn - fp * fn) / denom;
}

MetricScores scores_from(const ConfusionMatrix2x2& cm) {
    MetricScores scores;
    scores.n = cm.total();
    scores.invalid_count = cm.invalid_count;
    if (scores.n > 0) {
        scores.accuracy = accuracy(cm);
        scores.macro_f1 = macro_f1(cm);
        scores.mcc = mcc(cm);
    }
    return scores;
}

MetricReport breakdown(const std::vector<ScoredRecord>& records) {
    MetricReport report;
    std::map<Language, ConfusionMatrix2x2> per_language;

    for (const ScoredRecord& record : records) {
        report.joint_matrix.add(record.truth, record.prediction);
        if (record.language) per_language[*record.language].add(record.truth, record.prediction);
    }
    report.joint = scores_from(report.joint_matrix);
    for (const auto& [language, matrix] : per_language)
        report.per_language[language] = scores_from(matrix);
    return report;
}

} // namespace rooflinekit
