#include "rooflinekit/roofline.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rooflinekit {

const char* to_string(OpKind kind) {
    switch (kind) {
    case OpKind::SP: return "SP";
    case OpKind::DP: return "DP";
    case OpKind::INT: return "INT";
    }
    throw std::domain_error("unknown OpKind");
}

OpKind op_kind_from_string(const std::string& text) {
    if (text == "SP") return OpKind::SP;
    if (text == "DP") return OpKind::DP;
    if (text == "INT") return OpKind::INT;
    throw std::domain_error("unknown op kind: " + text);
}

const char* to_string(Boundedness b) {
    return b == Boundedness::Compute ? "Compute" : "Bandwidth";
}

Boundedness boundedness_from_string(const std::string& text) {
    if (text == "Compute") return Boundedness::Compute;
    if (text == "Bandwidth") return Boundedness::Bandwidth;
    throw std::domain_error("unknown boundedness: " + text);
}

const char* to_string(Language lang) {
    return lang == Language::CUDA ? "CUDA" : "OMP";
}

Language language_from_string(const std::string& text) {
    if (text == "CUDA") return Language::CUDA;
    if (text == "OMP") return Language::OMP;
    throw std::domain_error("unknown language: " + text);
}

void HardwareSpec::validate() const {
    if (!(bandwidth_gbs > 0.0))
        throw std::domain_error("hardware spec: bandwidth must be > 0");
    for (OpKind kind : kOpKinds) {
        auto it = peak.find(kind);
        if (it == peak.end())
            throw std::domain_error(std::string("hardware spec: missing peak for ") + to_string(kind));
        if (!(it->second > 0.0))
            throw std::domain_error(std::string("hardware spec: peak for ") + to_string(kind) +
                                    " must be > 0");
    }
}

void KernelProfile::validate() const {
    if (program_id.empty()) throw std::domain_error("kernel profile: empty program_id");
    if (kernel_name.empty()) throw std::domain_error("kernel profile: empty kernel_name");
    for (OpKind kind : kOpKinds) {
        auto it = op_counts.find(kind);
        if (it == op_counts.end())
            throw std::domain_error(std::string("kernel profile: missing op count for ") +
                                    to_string(kind));
        if (it->second < 0.0)
            throw std::domain_error(std::string("kernel profile: negative op count for ") +
                                    to_string(kind));
    }
    if (bytes_read < 0.0 || bytes_written < 0.0)
        throw std::domain_error("kernel profile: negative byte count");
    if (!(exec_time_s > 0.0))
        throw std::domain_error("kernel profile: exec_time_s must be > 0");
    for (int v : {grid.x, grid.y, grid.z, block.x, block.y, block.z})
        if (v < 1) throw std::domain_error("kernel profile: grid/block components must be >= 1");
}

double balance_point(double peak_gops, double bandwidth_gbs) {
    if (!(peak_gops > 0.0)) throw std::domain_error("balance_point: peak must be > 0");
    if (!(bandwidth_gbs > 0.0)) throw std::domain_error("balance_point: bandwidth must be > 0");
    return peak_gops / bandwidth_gbs;
}

double arithmetic_intensity(double ops, double bytes_total) {
    if (ops < 0.0 || bytes_total < 0.0)
        throw std::domain_error("arithmetic_intensity: negative input");
    if (bytes_total == 0.0)
        return ops > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return ops / bytes_total;
}

Boundedness classify_op(double ai, double balance) {
    if (!(balance > 0.0)) throw std::domain_error("classify_op: balance must be > 0");
    if (ai < 0.0) throw std::domain_error("classify_op: ai must be >= 0");
    return ai < balance ? Boundedness::Bandwidth : Boundedness::Compute;
}

Boundedness aggregate_label(const std::map<OpKind, Boundedness>& per_op) {
    for (OpKind kind : kOpKinds) {
        auto it = per_op.find(kind);
        if (it == per_op.end())
            throw std::domain_error(std::string("aggregate_label: missing entry for ") +
                                    to_string(kind));
        if (it->second == Boundedness::Compute) return Boundedness::Compute;
    }
    return Boundedness::Bandwidth;
}

double achieved_performance(double ops, double exec_time_s) {
    if (!(exec_time_s > 0.0))
        throw std::domain_error("achieved_performance: exec_time_s must be > 0");
    if (ops < 0.0) throw std::domain_error("achieved_performance: negative op count");
    return (ops / exec_time_s) / 1e9;
}

double roofline_ceiling(double ai, const HardwareSpec& spec, OpKind kind) {
    if (ai < 0.0) throw std::domain_error("roofline_ceiling: ai must be >= 0");
    double peak = spec.peak.at(kind);
    if (std::isinf(ai)) return peak;
    return std::min(peak, ai * spec.bandwidth_gbs);
}

KernelLabel label_kernel(const KernelProfile& profile, const HardwareSpec& spec) {
    profile.validate();
    spec.validate();

    KernelLabel result;
    double bytes_total = profile.bytes_read + profile.bytes_written;
    std::map<OpKind, Boundedness> per_op;

    for (OpKind kind : kOpKinds) {
        double ops = profile.op_counts.at(kind);
        double ai = arithmetic_intensity(ops, bytes_total);
        double balance = balance_point(spec.peak.at(kind), spec.bandwidth_gbs);
        Boundedness cls = classify_op(ai, balance);
        per_op[kind] = cls;
        result.points[kind] =
            RooflinePoint{ai, achieved_performance(ops, profile.exec_time_s), kind, cls};
        if (ops > 0.0 && bytes_total == 0.0)
            result.warnings.push_back(std::string(to_string(kind)) +
                                      ": ops with zero memory traffic, AI treated as infinite");
    }
    if (bytes_total == 0.0 && profile.op_counts.at(OpKind::SP) == 0.0 &&
        profile.op_counts.at(OpKind::DP) == 0.0 && profile.op_counts.at(OpKind::INT) == 0.0)
        result.warnings.push_back("degenerate profile: no ops and no memory traffic");

    result.label = aggregate_label(per_op);
    return result;
}

} // namespace rooflinekit
