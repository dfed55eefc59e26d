#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace rooflinekit {

// Operation classes tracked by the model: single-precision float, double-precision
// float, and integer ops. Every per-op map must be total over these three.
enum class OpKind { SP, DP, INT };

inline constexpr std::array<OpKind, 3> kOpKinds{OpKind::SP, OpKind::DP, OpKind::INT};

const char* to_string(OpKind kind);
OpKind op_kind_from_string(const std::string& text);

// Binary boundedness class. Serialized exactly as "Compute" / "Bandwidth".
enum class Boundedness { Compute, Bandwidth };

const char* to_string(Boundedness b);
Boundedness boundedness_from_string(const std::string& text);

enum class Language { CUDA, OMP };

const char* to_string(Language lang);
Language language_from_string(const std::string& text);

struct Dim3 {
    int x = 1;
    int y = 1;
    int z = 1;
};

// Peak throughput per op class (giga-ops/s) plus memory bandwidth (GB/s) of one GPU.
struct HardwareSpec {
    std::string name;
    std::map<OpKind, double> peak;
    double bandwidth_gbs = 0.0;

    // Throws std::domain_error unless all peaks and the bandwidth are > 0
    // and the peak map is total over OpKind.
    void validate() const;
};

// Profiled counters for one kernel launch.
struct KernelProfile {
    std::string program_id;
    std::string kernel_name;
    Language language = Language::CUDA;
    std::map<OpKind, double> op_counts;
    double bytes_read = 0.0;
    double bytes_written = 0.0;
    double exec_time_s = 0.0;
    Dim3 grid;
    Dim3 block;
    std::string launch_args;

    void validate() const;
};

// One measured point on the roofline plane. ai may be +inf when the kernel
// performed ops without any memory traffic.
struct RooflinePoint {
    double ai = 0.0;
    double achieved_gops = 0.0;
    OpKind kind = OpKind::SP;
    Boundedness label = Boundedness::Bandwidth;
};

struct KernelLabel {
    Boundedness label = Boundedness::Bandwidth;
    std::map<OpKind, RooflinePoint> points;
    std::vector<std::string> warnings;
};

// AI value where the memory slope meets the flat compute roof: peak / bandwidth.
double balance_point(double peak_gops, double bandwidth_gbs);

// ops per byte of memory traffic. Degenerate cases: (0, 0) -> 0,
// (>0, 0) -> +inf.
double arithmetic_intensity(double ops, double bytes_total);

// Bandwidth iff ai < balance; the tie goes to Compute.
Boundedness classify_op(double ai, double balance);

// Bandwidth only when every op class is Bandwidth-bound.
Boundedness aggregate_label(const std::map<OpKind, Boundedness>& per_op);

// Measured throughput in giga-ops/s.
double achieved_performance(double ops, double exec_time_s);

// min(peak, ai * bandwidth); +inf ai clips to the flat roof.
double roofline_ceiling(double ai, const HardwareSpec& spec, OpKind kind);

// Full classification of one kernel: per-op roofline points plus the
// aggregate label. AI denominator is bytes_read + bytes_written.
KernelLabel label_kernel(const KernelProfile& profile, const HardwareSpec& spec);

} // namespace rooflinekit
