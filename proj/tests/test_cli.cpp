#include <doctest.h>

#include <fstream>
#include <string>

#include <json.hpp>

#include "rooflinekit/dataset.hpp"
#include "rooflinekit/ingest.hpp"
#include "rooflinekit/llm_client.hpp"
#include "rooflinekit/prompts.hpp"
#include "test_support.hpp"

using namespace rooflinekit;
using testsupport::TempDir;
using testsupport::fixtures_dir;
using testsupport::run_cli;
using testsupport::slurp;
using nlohmann::json;

namespace {

std::string q(const std::filesystem::path& path) { return "'" + path.string() + "'"; }

// Populate the cache with scripted responses for every sample in the dataset.
void record_mock_responses(const std::filesystem::path& dataset_path,
                           const std::filesystem::path& cache_dir,
                           const std::filesystem::path& provider_path,
                           bool answer_truth) {
    Dataset dataset = load_dataset(dataset_path);
    ProviderConfig config = ProviderConfig::from_file(provider_path);
    ResponseCache cache(cache_dir);
    int i = 0;
    for (const DatasetSample& sample : dataset.samples) {
        PromptBundle bundle = build_zero_shot_prompt(sample, dataset.hardware);
        QueryRecord record;
        record.request_hash = request_hash(config, bundle);
        record.bundle_id = bundle.target_sample_id;
        record.model_id = config.model_id;
        record.mode = to_string(bundle.mode);
        record.temperature = config.temperature;
        record.top_p = config.top_p;
        record.raw_text = answer_truth ? to_string(sample.label)
                                       : (i % 3 == 0 ? "Compute" : "Bandwidth");
        record.usage.prompt_tokens = 100;
        record.usage.completion_tokens = 1;
        record.latency_ms = 1.0;
        record.timestamp = "2025-04-01T00:00:00Z";
        cache.store(record);
        ++i;
    }
}

} // namespace

TEST_CASE("cli pipeline end to end on the bundled corpus") {
    TempDir dir("cli");
    auto corpus = fixtures_dir() / "corpus";
    auto profiles = dir.path / "profiles.json";
    auto dataset = dir.path / "dataset.json";

    int rc = run_cli("ingest --profiles " + q(corpus / "exports") + " --hardware " +
                         q(fixtures_dir() / "hardware.json") + " --config " +
                         q(fixtures_dir() / "metric_map.json") + " --out " + q(profiles),
                     dir.path / "ingest.log");
    REQUIRE(rc == 0);
    CHECK(std::filesystem::exists(profiles));
    CHECK(std::filesystem::exists(dir.path / "profiles.json.manifest.json"));

    ProfilesFile loaded = load_profiles(profiles);
    CHECK(loaded.programs.size() == 10);
    CHECK(loaded.programs.at("cuda_gemm").profile.kernel_name == "gemm_kernel");
    CHECK(loaded.programs.at("cuda_gemm").label.label == Boundedness::Compute);
    CHECK(loaded.programs.at("cuda_blur").label.label == Boundedness::Bandwidth);
    CHECK(loaded.programs.at("omp_mc").label.label == Boundedness::Compute);
    CHECK(loaded.programs.at("omp_reduce").label.label == Boundedness::Bandwidth);

    SUBCASE("ingest output is byte-identical across reruns") {
        auto second = dir.path / "profiles2.json";
        REQUIRE(run_cli("ingest --profiles " + q(corpus / "exports") + " --hardware " +
                        q(fixtures_dir() / "hardware.json") + " --config " +
                        q(fixtures_dir() / "metric_map.json") + " --out " + q(second)) == 0);
        CHECK(slurp(profiles) == slurp(second));
    }

    rc = run_cli("build-dataset --profiles " + q(profiles) + " --sources " +
                     q(corpus / "sources") + " --token-cutoff 8000 --seed 42 --split 0.8 --out " +
                     q(dataset),
                 dir.path / "build.log");
    REQUIRE(rc == 0);
    Dataset built = load_dataset(dataset);
    CHECK(built.samples.size() == 8); // smallest (language, class) bucket has 2 programs
    std::map<std::string, int> split_counts;
    for (const auto& sample : built.samples) split_counts[to_string(sample.split)]++;
    CHECK(split_counts["train"] == 4);
    CHECK(split_counts["validation"] == 4);
    std::string build_log = slurp(dir.path / "build.log");
    CHECK(build_log.find("built=10") != std::string::npos);
    CHECK(build_log.find("balanced=8") != std::string::npos);

    SUBCASE("dataset build is seed-deterministic") {
        auto second = dir.path / "dataset2.json";
        REQUIRE(run_cli("build-dataset --profiles " + q(profiles) + " --sources " +
                        q(corpus / "sources") +
                        " --token-cutoff 8000 --seed 42 --split 0.8 --out " + q(second)) == 0);
        CHECK(slurp(dataset) == slurp(second));
    }
    SUBCASE("tiny token cutoff empties a bucket and exits 3") {
        CHECK(run_cli("build-dataset --profiles " + q(profiles) + " --sources " +
                      q(corpus / "sources") + " --token-cutoff 1 --seed 42 --out " +
                      q(dir.path / "tiny.json")) == 3);
    }

    auto cache = dir.path / "cache";
    auto provider = fixtures_dir() / "provider_mock.json";
    record_mock_responses(dataset, cache, provider, /*answer_truth=*/true);

    auto responses = dir.path / "responses" / "zero";
    rc = run_cli("query --dataset " + q(dataset) + " --mode zero --provider-config " +
                     q(provider) + " --cache " + q(cache) + " --replay --out " + q(responses),
                 dir.path / "query.log");
    REQUIRE(rc == 0);
    std::string query_log = slurp(dir.path / "query.log");
    CHECK(query_log.find("0 failures") != std::string::npos);
    CHECK(query_log.find("0 network calls") != std::string::npos);

    auto report = dir.path / "report.json";
    rc = run_cli("evaluate --responses " + q(responses) + " --dataset " + q(dataset) + " --out " +
                     q(report) + " --plot-data " + q(dir.path / "plot.tsv") + " --profiles " +
                     q(profiles),
                 dir.path / "eval.log");
    REQUIRE(rc == 0);

    json report_doc = json::parse(slurp(report));
    auto& metrics = report_doc.at("models").at("mock-model").at("zero_shot").at("joint");
    CHECK(metrics.at("accuracy").get<double>() == doctest::Approx(100.0));
    CHECK(metrics.at("mcc").get<double>() == doctest::Approx(100.0));
    CHECK(metrics.at("n").get<int>() == 8);
    CHECK(std::filesystem::exists(dir.path / "report.txt"));

    std::string plot = slurp(dir.path / "plot.tsv");
    CHECK(plot.find("roof\tSP") != std::string::npos);
    CHECK(plot.find("point\tINT") != std::string::npos);

    SUBCASE("evaluate output is byte-identical across reruns") {
        auto report2 = dir.path / "report2.json";
        REQUIRE(run_cli("evaluate --responses " + q(responses) + " --dataset " + q(dataset) +
                        " --out " + q(report2)) == 0);
        CHECK(slurp(report) == slurp(report2));
    }

    auto finetune = dir.path / "train.jsonl";
    rc = run_cli("export-finetune --dataset " + q(dataset) + " --split train --hardware " +
                     q(fixtures_dir() / "hardware.json") + " --out " + q(finetune),
                 dir.path / "export.log");
    REQUIRE(rc == 0);
    std::ifstream lines(finetune);
    std::string line;
    int count = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++count;
    CHECK(count == 4);
}

TEST_CASE("cli surfaces schema problems as exit code 2") {
    TempDir dir("cli_err");

    SUBCASE("missing column in the export") {
        testsupport::write_file(dir.path / "exports" / "bad.csv",
                                "program_id,kernel_order,invocation\np,0,0\n");
        auto log = dir.path / "out.log";
        int rc = run_cli("ingest --profiles " + q(dir.path / "exports") + " --hardware " +
                             q(fixtures_dir() / "hardware.json") + " --config " +
                             q(fixtures_dir() / "metric_map.json") + " --out " +
                             q(dir.path / "x.json"),
                         log);
        CHECK(rc == 2);
        CHECK(slurp(log).find("kernel_name") != std::string::npos);
    }
    SUBCASE("nonexistent export directory is an io error") {
        CHECK(run_cli("ingest --profiles " + q(dir.path / "nope") + " --hardware " +
                      q(fixtures_dir() / "hardware.json") + " --config " +
                      q(fixtures_dir() / "metric_map.json") + " --out " +
                      q(dir.path / "x.json")) == 1);
    }
    SUBCASE("query in few mode without an example bank") {
        testsupport::write_file(dir.path / "dataset.json", "{}");
        CHECK(run_cli("query --dataset " + q(dir.path / "dataset.json") +
                      " --mode few --provider-config " + q(fixtures_dir() / "provider_mock.json") +
                      " --cache " + q(dir.path / "cache") + " --out " +
                      q(dir.path / "out")) == 2);
    }
    SUBCASE("evaluate with no response runs") {
        std::filesystem::create_directories(dir.path / "empty");
        CHECK(run_cli("evaluate --responses " + q(dir.path / "empty") + " --out " +
                      q(dir.path / "r.json")) == 2);
    }
    SUBCASE("export-finetune on a malformed dataset") {
        testsupport::write_file(dir.path / "broken.json", "{\"schema_version\": 1}");
        CHECK(run_cli("export-finetune --dataset " + q(dir.path / "broken.json") +
                      " --split train --hardware " + q(fixtures_dir() / "hardware.json") +
                      " --out " + q(dir.path / "ft.jsonl")) == 2);
    }
}

TEST_CASE("gen-rq1 emits bundles with a self-consistent truth sidecar") {
    TempDir dir("rq1");
    auto out = dir.path / "rq1";
    int rc = run_cli("gen-rq1 --count 12 --shots 2 --cot --seed 9 --out " + q(out),
                     dir.path / "gen.log");
    REQUIRE(rc == 0);

    std::ifstream prompts(out / "prompts.jsonl");
    REQUIRE(prompts.good());
    std::string line;
    int bundles = 0, cot_bundles = 0;
    while (std::getline(prompts, line)) {
        if (line.empty()) continue;
        PromptBundle bundle = prompt_bundle_from_json_line(line);
        CHECK(bundle.shots == 2);
        if (bundle.mode == PromptMode::rq1_cot) ++cot_bundles;
        ++bundles;
    }
    CHECK(bundles == 24);
    CHECK(cot_bundles == 24);

    json truths = json::parse(slurp(out / "ground_truth.json"));
    CHECK(truths.size() == 24);
    int bandwidth = 0;
    for (const auto& [id, entry] : truths.items()) {
        double balance = entry.at("peak_gflops").get<double>() /
                         entry.at("bandwidth_gbs").get<double>();
        std::string expected =
            entry.at("queried_ai").get<double>() < balance ? "Bandwidth" : "Compute";
        CHECK(entry.at("label").get<std::string>() == expected);
        if (expected == "Bandwidth") ++bandwidth;
    }
    CHECK(bandwidth == 12);

    SUBCASE("--no-cot strips the Thought blocks") {
        auto plain = dir.path / "plain";
        REQUIRE(run_cli("gen-rq1 --count 3 --shots 4 --no-cot --seed 9 --out " + q(plain)) == 0);
        std::string all = slurp(plain / "prompts.jsonl");
        CHECK(all.find("Thought:") == std::string::npos);
        CHECK(all.find("Question:") != std::string::npos);
    }
    SUBCASE("same seed reproduces identical files") {
        auto again = dir.path / "again";
        REQUIRE(run_cli("gen-rq1 --count 12 --shots 2 --cot --seed 9 --out " + q(again)) == 0);
        CHECK(slurp(out / "prompts.jsonl") == slurp(again / "prompts.jsonl"));
        CHECK(slurp(out / "ground_truth.json") == slurp(again / "ground_truth.json"));
    }
    SUBCASE("rq1 query/evaluate replay closes the loop at 100 accuracy") {
        // Cache exact answers for every bundle, then replay and score.
        ProviderConfig config = ProviderConfig::from_file(fixtures_dir() / "provider_mock.json");
        ResponseCache cache(dir.path / "cache");
        std::ifstream in(out / "prompts.jsonl");
        json truth_doc = json::parse(slurp(out / "ground_truth.json"));
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            PromptBundle bundle = prompt_bundle_from_json_line(line);
            QueryRecord record;
            record.request_hash = request_hash(config, bundle);
            record.bundle_id = bundle.target_sample_id;
            record.model_id = config.model_id;
            record.mode = to_string(bundle.mode);
            record.temperature = config.temperature;
            record.top_p = config.top_p;
            record.raw_text = "Answer: " +
                              truth_doc.at(bundle.target_sample_id).at("label").get<std::string>();
            record.timestamp = "2025-04-01T00:00:00Z";
            cache.store(record);
        }
        auto responses = dir.path / "responses";
        REQUIRE(run_cli("query --prompts " + q(out) + " --mode rq1 --provider-config " +
                        q(fixtures_dir() / "provider_mock.json") + " --cache " +
                        q(dir.path / "cache") + " --replay --out " + q(responses)) == 0);
        auto report = dir.path / "report.json";
        REQUIRE(run_cli("evaluate --responses " + q(responses) + " --out " + q(report)) == 0);
        json doc = json::parse(slurp(report));
        auto& joint = doc.at("models").at("mock-model").at("rq1_cot_2").at("joint");
        CHECK(joint.at("accuracy").get<double>() == doctest::Approx(100.0));
        CHECK(joint.at("n").get<int>() == 24);
    }
}
