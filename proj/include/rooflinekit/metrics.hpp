#pragma once

#include <map>
#include <optional>
#include <vector>

#include "rooflinekit/roofline.hpp"

namespace rooflinekit {

// 2x2 counts, truth x prediction, plus the tally of unparseable predictions.
// Invalid predictions count toward the total (they can never be correct) but
// do not occupy a predicted-class cell.
struct ConfusionMatrix2x2 {
    long compute_compute = 0;   // truth Compute, predicted Compute
    long compute_bandwidth = 0; // truth Compute, predicted Bandwidth
    long bandwidth_compute = 0;
    long bandwidth_bandwidth = 0;
    long invalid_count = 0;

    long total() const {
        return compute_compute + compute_bandwidth + bandwidth_compute + bandwidth_bandwidth +
               invalid_count;
    }

    void add(Boundedness truth, const std::optional<Boundedness>& prediction);
};

// 100 * correct / total. Throws std::domain_error on an empty matrix.
double accuracy(const ConfusionMatrix2x2& cm);

// Unweighted mean of the two per-class F1 scores, x100. A class with no true
// positives and no predicted/actual support contributes 0.
double macro_f1(const ConfusionMatrix2x2& cm);

// Matthews correlation coefficient x100; symmetric in the choice of positive
// class; zero denominator yields 0.
double mcc(const ConfusionMatrix2x2& cm);

struct ScoredRecord {
    Boundedness truth = Boundedness::Bandwidth;
    std::optional<Boundedness> prediction;
    std::optional<Language> language;
};

struct MetricScores {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double mcc = 0.0;
    long n = 0;
    long invalid_count = 0;
};

MetricScores scores_from(const ConfusionMatrix2x2& cm);

struct MetricReport {
    MetricScores joint;
    ConfusionMatrix2x2 joint_matrix;
    // Sub-reports only for languages that actually occur in the records.
    std::map<Language, MetricScores> per_language;
};

MetricReport breakdown(const std::vector<ScoredRecord>& records);

} // namespace rooflinekit
