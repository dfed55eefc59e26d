#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <limits>

#include "rooflinekit/rng.hpp"
#include "rooflinekit/roofline.hpp"
#include "test_support.hpp"

using namespace rooflinekit;

TEST_CASE("balance point is the peak/bandwidth ratio at full precision") {
    CHECK(balance_point(52.22, 45.9) == doctest::Approx(1.1376906318082789).epsilon(1e-12));
    CHECK(balance_point(73.45, 99.9) == doctest::Approx(0.7352352352352352).epsilon(1e-12));
    CHECK(balance_point(100.0, 100.0) == 1.0);
    CHECK_THROWS_AS(balance_point(0.0, 45.9), std::domain_error);
    CHECK_THROWS_AS(balance_point(52.22, 0.0), std::domain_error);
    CHECK_THROWS_AS(balance_point(-1.0, 45.9), std::domain_error);
}

TEST_CASE("arithmetic intensity handles the degenerate traffic cases") {
    CHECK(arithmetic_intensity(600, 1000) == doctest::Approx(0.6));
    CHECK(arithmetic_intensity(0, 4096) == 0.0);
    CHECK(std::isinf(arithmetic_intensity(512, 0)));
    CHECK(arithmetic_intensity(0, 0) == 0.0);
    CHECK_THROWS_AS(arithmetic_intensity(-1, 10), std::domain_error);
}

TEST_CASE("classification against the balance point, tie goes to Compute") {
    CHECK(classify_op(0.6, 1.1377) == Boundedness::Bandwidth);
    CHECK(classify_op(1.55, 0.7352) == Boundedness::Compute);
    CHECK(classify_op(1.14, 1.14) == Boundedness::Compute);
    CHECK(classify_op(std::numeric_limits<double>::infinity(), 1.0) == Boundedness::Compute);
    CHECK(classify_op(0.0, 1.0) == Boundedness::Bandwidth);
}

TEST_CASE("classification flips exactly at the balance point for random rooflines") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        double peak = rng.uniform(1.0, 50000.0);
        double bandwidth = rng.uniform(1.0, 5000.0);
        double balance = balance_point(peak, bandwidth);
        double below = std::nextafter(balance, 0.0);
        double above = std::nextafter(balance, std::numeric_limits<double>::infinity());
        CHECK(classify_op(below, balance) == Boundedness::Bandwidth);
        CHECK(classify_op(balance, balance) == Boundedness::Compute);
        CHECK(classify_op(above, balance) == Boundedness::Compute);
    }
}

TEST_CASE("aggregate label over all eight per-op combinations") {
    for (int bits = 0; bits < 8; ++bits) {
        std::map<OpKind, Boundedness> per_op;
        per_op[OpKind::SP] = (bits & 1) ? Boundedness::Bandwidth : Boundedness::Compute;
        per_op[OpKind::DP] = (bits & 2) ? Boundedness::Bandwidth : Boundedness::Compute;
        per_op[OpKind::INT] = (bits & 4) ? Boundedness::Bandwidth : Boundedness::Compute;
        Boundedness expected = (bits == 7) ? Boundedness::Bandwidth : Boundedness::Compute;
        CHECK(aggregate_label(per_op) == expected);
    }
}

TEST_CASE("aggregate label requires a total map") {
    std::map<OpKind, Boundedness> partial{{OpKind::SP, Boundedness::Bandwidth},
                                          {OpKind::DP, Boundedness::Bandwidth}};
    CHECK_THROWS_AS(aggregate_label(partial), std::domain_error);
}

TEST_CASE("aggregate label is monotone under Bandwidth->Compute flips") {
    for (int bits = 0; bits < 8; ++bits) {
        std::map<OpKind, Boundedness> per_op;
        per_op[OpKind::SP] = (bits & 1) ? Boundedness::Bandwidth : Boundedness::Compute;
        per_op[OpKind::DP] = (bits & 2) ? Boundedness::Bandwidth : Boundedness::Compute;
        per_op[OpKind::INT] = (bits & 4) ? Boundedness::Bandwidth : Boundedness::Compute;
        Boundedness base = aggregate_label(per_op);
        for (OpKind kind : kOpKinds) {
            if (per_op[kind] != Boundedness::Bandwidth) continue;
            auto flipped = per_op;
            flipped[kind] = Boundedness::Compute;
            // Flipping toward Compute can never move the aggregate toward Bandwidth.
            if (base == Boundedness::Compute)
                CHECK(aggregate_label(flipped) == Boundedness::Compute);
        }
    }
}

TEST_CASE("achieved performance in giga-ops per second") {
    CHECK(achieved_performance(1e9, 1.0) == doctest::Approx(1.0));
    CHECK(achieved_performance(0, 0.5) == 0.0);
    CHECK(achieved_performance(2.5e10, 0.1) == doctest::Approx(250.0));
    CHECK_THROWS_AS(achieved_performance(100, 0.0), std::domain_error);
    CHECK_THROWS_AS(achieved_performance(100, -1.0), std::domain_error);
}

TEST_CASE("roofline ceiling: memory slope below the knee, flat peak above") {
    HardwareSpec spec;
    spec.name = "fig";
    spec.peak[OpKind::SP] = 52.22;
    spec.peak[OpKind::DP] = 26.11;
    spec.peak[OpKind::INT] = 104.44;
    spec.bandwidth_gbs = 45.9;

    CHECK(roofline_ceiling(0.5, spec, OpKind::SP) == doctest::Approx(22.95));
    CHECK(roofline_ceiling(10.0, spec, OpKind::SP) == doctest::Approx(52.22));
    double balance = balance_point(52.22, 45.9);
    CHECK(roofline_ceiling(balance, spec, OpKind::SP) == doctest::Approx(52.22).epsilon(1e-12));
    CHECK(roofline_ceiling(std::numeric_limits<double>::infinity(), spec, OpKind::SP) == 52.22);
}

TEST_CASE("roofline ceiling is continuous and non-decreasing in ai") {
    HardwareSpec spec = testsupport::test_spec();
    Rng rng(11);
    for (OpKind kind : kOpKinds) {
        double balance = balance_point(spec.peak.at(kind), spec.bandwidth_gbs);
        double previous = 0.0;
        double ai = 0.0;
        for (int i = 0; i < 300; ++i) {
            ai += rng.uniform(0.0, balance / 20.0);
            double ceiling = roofline_ceiling(ai, spec, kind);
            CHECK(ceiling >= previous);
            if (ai < balance) CHECK(ceiling == doctest::Approx(ai * spec.bandwidth_gbs));
            else CHECK(ceiling == doctest::Approx(spec.peak.at(kind)));
            previous = ceiling;
        }
    }
}

namespace {

KernelProfile make_profile(double sp, double dp, double ii, double bytes_read,
                           double bytes_written, double time_s = 0.001) {
    KernelProfile profile;
    profile.program_id = "prog";
    profile.kernel_name = "kernel";
    profile.language = Language::CUDA;
    profile.op_counts[OpKind::SP] = sp;
    profile.op_counts[OpKind::DP] = dp;
    profile.op_counts[OpKind::INT] = ii;
    profile.bytes_read = bytes_read;
    profile.bytes_written = bytes_written;
    profile.exec_time_s = time_s;
    return profile;
}

} // namespace

TEST_CASE("kernel labeling composes intensity, per-op classes, and aggregation") {
    HardwareSpec spec = testsupport::test_spec();

    SUBCASE("no ops with traffic is bandwidth-bound at AI zero") {
        auto result = label_kernel(make_profile(0, 0, 0, 1000, 1000), spec);
        CHECK(result.label == Boundedness::Bandwidth);
        for (OpKind kind : kOpKinds) CHECK(result.points.at(kind).ai == 0.0);
    }
    SUBCASE("huge SP ops over tiny traffic is compute-bound") {
        auto result = label_kernel(make_profile(1e12, 0, 0, 8, 8), spec);
        CHECK(result.label == Boundedness::Compute);
    }
    SUBCASE("one op class above its balance point forces Compute") {
        // SP AI = 2.0 (balance 1.0); DP AI 0.0125 (balance 0.5); INT AI 0.125 (balance 2).
        auto profile = make_profile(3200, 20, 200, 800, 800);
        auto result = label_kernel(profile, spec);
        std::map<OpKind, Boundedness> per_op;
        for (OpKind kind : kOpKinds) {
            double ai = arithmetic_intensity(profile.op_counts.at(kind),
                                             profile.bytes_read + profile.bytes_written);
            per_op[kind] =
                classify_op(ai, balance_point(spec.peak.at(kind), spec.bandwidth_gbs));
        }
        CHECK(per_op.at(OpKind::SP) == Boundedness::Compute);
        CHECK(per_op.at(OpKind::DP) == Boundedness::Bandwidth);
        CHECK(per_op.at(OpKind::INT) == Boundedness::Bandwidth);
        CHECK(result.label == aggregate_label(per_op));
        CHECK(result.label == Boundedness::Compute);
    }
    SUBCASE("degenerate all-zero profile is Bandwidth with a warning") {
        auto result = label_kernel(make_profile(0, 0, 0, 0, 0), spec);
        CHECK(result.label == Boundedness::Bandwidth);
        CHECK(!result.warnings.empty());
    }
    SUBCASE("ops without traffic are Compute with a warning") {
        auto result = label_kernel(make_profile(100, 0, 0, 0, 0), spec);
        CHECK(result.label == Boundedness::Compute);
        CHECK(!result.warnings.empty());
    }
}

TEST_CASE("kernel label is invariant to common scaling of ops and bytes") {
    HardwareSpec spec = testsupport::test_spec();
    Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        double sp = std::floor(rng.uniform(0.0, 1e6));
        double dp = std::floor(rng.uniform(0.0, 1e5));
        double ii = std::floor(rng.uniform(0.0, 1e6));
        double br = std::floor(rng.uniform(1.0, 1e6));
        double bw = std::floor(rng.uniform(1.0, 1e6));
        double k = std::floor(rng.uniform(2.0, 64.0));
        auto base = label_kernel(make_profile(sp, dp, ii, br, bw), spec);
        auto scaled = label_kernel(make_profile(sp * k, dp * k, ii * k, br * k, bw * k), spec);
        CHECK(base.label == scaled.label);
        for (OpKind kind : kOpKinds)
            CHECK(base.points.at(kind).label == scaled.points.at(kind).label);
    }
}

TEST_CASE("boundedness text round-trips") {
    for (Boundedness b : {Boundedness::Compute, Boundedness::Bandwidth})
        CHECK(boundedness_from_string(to_string(b)) == b);
    CHECK_THROWS_AS(boundedness_from_string("compute"), std::domain_error);
    CHECK_THROWS_AS(boundedness_from_string(""), std::domain_error);
}

TEST_CASE("profile validation rejects bad geometry and time") {
    auto profile = make_profile(1, 1, 1, 10, 10);
    profile.grid = Dim3{0, 1, 1};
    CHECK_THROWS_AS(profile.validate(), std::domain_error);
    profile = make_profile(1, 1, 1, 10, 10, 0.0);
    CHECK_THROWS_AS(profile.validate(), std::domain_error);
    auto ok = make_profile(1, 1, 1, 10, 10);
    CHECK_NOTHROW(ok.validate());
}
