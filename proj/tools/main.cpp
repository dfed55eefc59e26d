#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rooflinekit/dataset.hpp"
#include "rooflinekit/errors.hpp"
#include "rooflinekit/ingest.hpp"
#include "rooflinekit/json_util.hpp"
#include "rooflinekit/llm_client.hpp"
#include "rooflinekit/manifest.hpp"
#include "rooflinekit/metrics.hpp"
#include "rooflinekit/prompts.hpp"
#include "rooflinekit/report.hpp"
#include "rooflinekit/stats.hpp"
#include "rooflinekit/tokenizer.hpp"
#include "rooflinekit/version.hpp"

namespace fs = std::filesystem;
using namespace rooflinekit;

namespace {

struct IngestArgs {
    std::string profiles_dir;
    std::string hardware_file;
    std::string config_file;
    std::string out_file;
};

void run_ingest(const IngestArgs& args) {
    HardwareSpec spec = load_hardware_spec(args.hardware_file);
    IngestConfig config = IngestConfig::from_file(args.config_file);
    IngestResult result = ingest_directory(args.profiles_dir, config, spec);

    ProfilesFile file;
    file.hardware = spec;
    file.programs = result.programs;
    file.warnings = result.warnings;
    save_profiles(args.out_file, file);

    RunManifest manifest = make_manifest("ingest");
    manifest.config = json{{"profiles", args.profiles_dir},
                           {"hardware", args.hardware_file},
                           {"config", args.config_file},
                           {"out", args.out_file}};
    manifest.add_input("profiles", args.profiles_dir);
    manifest.add_input("hardware", args.hardware_file);
    manifest.add_input("config", args.config_file);
    manifest.write(args.out_file + ".manifest.json");

    for (const std::string& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
    std::cout << "ingested " << result.programs.size() << " programs ("
              << result.stats.rows_parsed << " metric rows, " << result.stats.ignored_metric_rows
              << " ignored rows over " << result.stats.ignored_metric_names.size()
              << " unmapped metrics)\n";
}

struct BuildDatasetArgs {
    std::string profiles_file;
    std::string sources_root;
    int token_cutoff = 8000;
    std::uint64_t seed = 0;
    double split_fraction = 0.8;
    std::string tokenizer_id = "approx-chars4";
    std::string allowlist_csv;
    std::string out_file;
};

std::vector<std::string> parse_allowlist(const std::string& csv) {
    std::vector<std::string> out;
    std::string current;
    for (char c : csv) {
        if (c == ',') {
            if (!current.empty()) out.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) out.push_back(current);
    return out;
}

void run_build_dataset(const BuildDatasetArgs& args) {
    ProfilesFile profiles = load_profiles(args.profiles_file);

    BuildConfig config;
    config.token_cutoff = args.token_cutoff;
    config.seed = args.seed;
    config.split_fraction = args.split_fraction;
    config.tokenizer_id = args.tokenizer_id;
    if (!args.allowlist_csv.empty()) config.allowlist = parse_allowlist(args.allowlist_csv);
    config.validate();

    TokenizerHandle tokenizer = make_tokenizer(config.tokenizer_id);
    if (tokenizer.fell_back)
        std::cerr << "warning: tokenizer '" << config.tokenizer_id
                  << "' unavailable; falling back to " << tokenizer.tokenizer->id()
                  << " estimates\n";

    std::vector<DatasetSample> samples;
    std::size_t skipped = 0;
    for (const auto& [program, labeled] : profiles.programs) {
        fs::path program_dir = fs::path(args.sources_root) / program;
        if (!fs::is_directory(program_dir)) {
            std::cerr << "warning: no source directory for program '" << program << "'; skipped\n";
            ++skipped;
            continue;
        }
        DatasetSample sample;
        try {
            sample.source_text = scrape_sources(program_dir, config.allowlist);
        } catch (const PipelineError& e) {
            std::cerr << "warning: " << e.what() << "; skipped\n";
            ++skipped;
            continue;
        }
        sample.program_id = program;
        sample.language = labeled.profile.language;
        sample.kernel_name = labeled.profile.kernel_name;
        sample.token_count = tokenizer.tokenizer->count(sample.source_text);
        sample.label = labeled.label.label;
        sample.grid = labeled.profile.grid;
        sample.block = labeled.profile.block;
        sample.launch_args = labeled.profile.launch_args;
        samples.push_back(std::move(sample));
    }

    std::size_t built = samples.size();
    samples = prune_by_tokens(std::move(samples), config.token_cutoff);
    std::size_t pruned = samples.size();
    if (pruned == 0) std::cerr << "warning: token cutoff removed every sample\n";
    samples = balance(std::move(samples), config.seed);
    std::size_t balanced = samples.size();
    samples = split(std::move(samples), config.split_fraction, config.seed);

    long n_train = 0;
    for (const DatasetSample& sample : samples)
        if (sample.split == Split::train) ++n_train;

    Dataset dataset;
    dataset.config = config;
    dataset.tokenizer_approximate = tokenizer.tokenizer->approximate();
    dataset.hardware = profiles.hardware;
    dataset.samples = samples;
    save_dataset(args.out_file, dataset);

    RunManifest manifest = make_manifest("build-dataset");
    manifest.config = json{{"profiles", args.profiles_file},
                           {"sources", args.sources_root},
                           {"token_cutoff", config.token_cutoff},
                           {"split_fraction", config.split_fraction},
                           {"tokenizer_id", config.tokenizer_id},
                           {"allowlist", config.allowlist},
                           {"out", args.out_file}};
    manifest.seeds["seed"] = config.seed;
    manifest.add_input("profiles", args.profiles_file);
    manifest.add_input("sources", args.sources_root);
    manifest.write(args.out_file + ".manifest.json");

    std::cout << "built=" << built << " (skipped=" << skipped << ") pruned=" << pruned
              << " balanced=" << balanced << " train=" << n_train
              << " validation=" << (samples.size() - static_cast<std::size_t>(n_train)) << "\n";
}

struct GenRq1Args {
    int count = 240;
    int shots = 2;
    bool with_cot = true;
    std::uint64_t seed = 0;
    std::string out_dir;
};

void run_gen_rq1(const GenRq1Args& args) {
    if (args.shots != 2 && args.shots != 4 && args.shots != 8)
        throw SchemaError("--shots must be 2, 4, or 8");

    auto pairs = gen_random_rooflines(args.count, args.seed);

    fs::create_directories(args.out_dir);
    std::ostringstream prompts;
    json truths = json::object();
    std::size_t index = 0;
    for (const RooflineTaskPair& pair : pairs) {
        for (const RandomRooflineTask* task : {&pair.bandwidth, &pair.compute}) {
            std::uint64_t prompt_seed = args.seed + 0x9E3779B97F4A7C15ULL * (index + 1);
            Rq1Prompt prompt = build_rq1_prompt(*task, args.shots, args.with_cot, prompt_seed);
            prompts << prompt_bundle_to_json_line(prompt.bundle) << "\n";
            truths[task->id] = json{{"label", to_string(task->ground_truth)},
                                    {"bandwidth_gbs", task->bandwidth_gbs},
                                    {"peak_gflops", task->peak_gflops},
                                    {"queried_ai", task->queried_ai},
                                    {"queried_perf_gflops", task->queried_perf_gflops}};
            ++index;
        }
    }
    write_text_file(fs::path(args.out_dir) / "prompts.jsonl", prompts.str());
    write_text_file(fs::path(args.out_dir) / "ground_truth.json", truths.dump(2) + "\n");

    RunManifest manifest = make_manifest("gen-rq1");
    manifest.config = json{{"count", args.count},
                           {"shots", args.shots},
                           {"cot", args.with_cot},
                           {"out", args.out_dir}};
    manifest.seeds["seed"] = args.seed;
    manifest.write(fs::path(args.out_dir) / "manifest.json");

    std::cout << "generated " << index << " prompt bundles (" << args.count
              << " rooflines) into " << args.out_dir << "\n";
}

struct QueryArgs {
    std::string prompts_dir;
    std::string dataset_file;
    std::string mode;
    std::string model_id;
    std::string provider_config_file;
    std::string examples_dir;
    std::string cache_dir;
    std::string hardware_file;
    int concurrency = 0;
    bool replay = false;
    double temperature = -1.0;
    double top_p = -1.0;
    std::string out_dir;
};

void run_query(const QueryArgs& args) {
    ProviderConfig config;
    if (!args.provider_config_file.empty())
        config = ProviderConfig::from_file(args.provider_config_file);
    if (!args.model_id.empty()) config.model_id = args.model_id;
    if (args.concurrency > 0) config.concurrency_limit = args.concurrency;
    if (args.temperature >= 0.0) config.temperature = args.temperature;
    if (args.top_p >= 0.0) config.top_p = args.top_p;
    config.validate();

    std::vector<PromptBundle> bundles;
    json run_meta;

    if (args.mode == "rq1") {
        if (args.prompts_dir.empty()) throw SchemaError("--mode rq1 requires --prompts");
        std::ifstream in(fs::path(args.prompts_dir) / "prompts.jsonl");
        if (!in) throw IoError("cannot open " + args.prompts_dir + "/prompts.jsonl");
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            try {
                bundles.push_back(prompt_bundle_from_json_line(line));
            } catch (const LoadError& e) {
                throw ParseError(std::string(e.what()), line_no);
            }
        }
        if (bundles.empty()) throw SchemaError("no prompt bundles in " + args.prompts_dir);
    } else {
        if (args.dataset_file.empty())
            throw SchemaError("--mode " + args.mode + " requires --dataset");
        Dataset dataset = load_dataset(args.dataset_file);
        HardwareSpec spec = args.hardware_file.empty() ? dataset.hardware
                                                       : load_hardware_spec(args.hardware_file);
        if (args.mode == "zero") {
            for (const DatasetSample& sample : dataset.samples)
                bundles.push_back(build_zero_shot_prompt(sample, spec));
        } else { // few
            if (args.examples_dir.empty()) throw SchemaError("--mode few requires --examples");
            ExampleBank bank = ExampleBank::load(args.examples_dir);
            std::set<std::string> dataset_ids;
            for (const DatasetSample& sample : dataset.samples)
                dataset_ids.insert(sample.program_id);
            bank.ensure_disjoint(dataset_ids);
            for (const DatasetSample& sample : dataset.samples)
                bundles.push_back(build_few_shot_prompt(sample, spec, bank));
        }
        if (bundles.empty()) throw SchemaError("dataset has no samples");
    }

    ChatClient client(config, args.cache_dir, args.replay);
    std::vector<QueryRecord> records = client.send_batch(bundles);

    fs::create_directories(args.out_dir);
    std::ostringstream lines;
    long failures = 0;
    for (const QueryRecord& record : records) {
        lines << query_record_to_json_line(record) << "\n";
        if (!record.ok()) ++failures;
    }
    write_text_file(fs::path(args.out_dir) / "records.jsonl", lines.str());

    run_meta = json{{"model_id", config.model_id},
                    {"mode", to_string(bundles.front().mode)},
                    {"shots", bundles.front().shots},
                    {"temperature", config.temperature},
                    {"top_p", config.top_p},
                    {"reasoning_model", config.reasoning_model},
                    {"n", records.size()}};
    write_text_file(fs::path(args.out_dir) / "run.json", run_meta.dump(2) + "\n");

    if (args.mode == "rq1") {
        fs::path truth_src = fs::path(args.prompts_dir) / "ground_truth.json";
        if (fs::exists(truth_src))
            write_text_file(fs::path(args.out_dir) / "truth.json", read_text_file(truth_src));
    }

    RunManifest manifest = make_manifest("query");
    manifest.config = run_meta;
    manifest.config["replay"] = args.replay;
    manifest.config["cache"] = args.cache_dir;
    if (!args.prompts_dir.empty()) manifest.add_input("prompts", args.prompts_dir);
    if (!args.dataset_file.empty()) manifest.add_input("dataset", args.dataset_file);
    if (!args.examples_dir.empty()) manifest.add_input("examples", args.examples_dir);
    if (!args.provider_config_file.empty())
        manifest.add_input("provider_config", args.provider_config_file);
    manifest.write(fs::path(args.out_dir) / "manifest.json");

    std::cout << "queried " << records.size() << " prompts (" << failures << " failures, "
              << client.network_calls() << " network calls)\n";
}

struct EvaluateArgs {
    std::string responses_dir;
    std::string dataset_file;
    std::string out_file;
    std::string plot_data_file;
    std::string profiles_file;
    std::string chi_squared_dir;
};

struct LoadedRun {
    json meta;
    std::vector<QueryRecord> records;
    fs::path dir;
};

LoadedRun load_run(const fs::path& dir) {
    LoadedRun run;
    run.dir = dir;
    run.meta = read_json_file(dir / "run.json");
    std::ifstream in(dir / "records.jsonl");
    if (!in) throw IoError("cannot open " + (dir / "records.jsonl").string());
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            run.records.push_back(query_record_from_json_line(line));
        } catch (const std::exception& e) {
            throw ParseError((dir / "records.jsonl").string() + ": " + e.what(), line_no);
        }
    }
    return run;
}

std::vector<fs::path> find_run_dirs(const fs::path& root) {
    std::vector<fs::path> dirs;
    if (fs::exists(root / "records.jsonl")) {
        dirs.push_back(root);
        return dirs;
    }
    if (!fs::is_directory(root)) return dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && fs::exists(entry.path() / "records.jsonl"))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

std::vector<ScoredRecord> score_run(const LoadedRun& run, const Dataset* dataset) {
    std::string mode = run.meta.at("mode").get<std::string>();
    bool is_rq1 = mode.rfind("rq1", 0) == 0;

    std::map<std::string, std::pair<Boundedness, std::optional<Language>>> truth;
    if (is_rq1) {
        json truths = read_json_file(run.dir / "truth.json");
        for (const auto& [id, entry] : truths.items())
            truth[id] = {boundedness_from_string(entry.at("label").get<std::string>()),
                         std::nullopt};
    } else {
        if (!dataset)
            throw SchemaError("run " + run.dir.string() + " needs --dataset for ground truth");
        for (const DatasetSample& sample : dataset->samples)
            truth[sample.program_id] = {sample.label, sample.language};
    }

    std::vector<ScoredRecord> scored;
    for (const QueryRecord& record : run.records) {
        auto it = truth.find(record.bundle_id);
        if (it == truth.end())
            throw SchemaError("no ground truth for bundle '" + record.bundle_id + "' in run " +
                              run.dir.string());
        ScoredRecord s;
        s.truth = it->second.first;
        s.language = it->second.second;
        if (record.ok()) {
            ParsedPrediction parsed = is_rq1 ? parse_rq1_response(record.raw_text)
                                             : parse_classification_response(record.raw_text);
            s.prediction = parsed.prediction;
        }
        scored.push_back(s);
    }
    return scored;
}

void run_evaluate(const EvaluateArgs& args) {
    std::vector<fs::path> run_dirs = find_run_dirs(args.responses_dir);
    if (run_dirs.empty())
        throw SchemaError("no response runs found under " + args.responses_dir);

    std::unique_ptr<Dataset> dataset;
    if (!args.dataset_file.empty())
        dataset = std::make_unique<Dataset>(load_dataset(args.dataset_file));

    // Merge scored records per (model, mode variant).
    std::map<std::pair<std::string, std::string>, std::vector<ScoredRecord>> grouped;
    std::map<std::pair<std::string, std::string>, std::pair<double, double>> sampling;
    for (const fs::path& dir : run_dirs) {
        LoadedRun run = load_run(dir);
        std::string mode = run.meta.at("mode").get<std::string>();
        std::string mode_key = mode;
        if (mode.rfind("rq1", 0) == 0)
            mode_key += "_" + std::to_string(run.meta.at("shots").get<int>());
        std::string model = run.meta.at("model_id").get<std::string>();
        auto scored = score_run(run, dataset.get());
        auto& bucket = grouped[{model, mode_key}];
        bucket.insert(bucket.end(), scored.begin(), scored.end());
        sampling[{model, mode_key}] = {run.meta.value("temperature", 0.0),
                                       run.meta.value("top_p", 0.0)};
    }

    EvalReport report;
    for (const auto& [key, records] : grouped) {
        EvalRun run;
        run.model_id = key.first;
        run.mode_key = key.second;
        run.temperature = sampling[key].first;
        run.top_p = sampling[key].second;
        run.report = breakdown(records);
        report.runs.push_back(std::move(run));
    }

    if (!args.chi_squared_dir.empty()) {
        std::vector<fs::path> sweep_dirs = find_run_dirs(args.chi_squared_dir);
        if (sweep_dirs.empty())
            throw SchemaError("no sweep runs under " + args.chi_squared_dir);
        ChiSquaredBlock block;
        bool any_invalid = false;
        std::vector<std::array<double, 3>> counts;
        for (const fs::path& dir : sweep_dirs) {
            LoadedRun run = load_run(dir);
            bool is_rq1 = run.meta.at("mode").get<std::string>().rfind("rq1", 0) == 0;
            std::array<double, 3> row{0, 0, 0};
            for (const QueryRecord& record : run.records) {
                std::optional<Boundedness> prediction;
                if (record.ok())
                    prediction = (is_rq1 ? parse_rq1_response(record.raw_text)
                                         : parse_classification_response(record.raw_text))
                                     .prediction;
                if (!prediction) {
                    row[2] += 1;
                    any_invalid = true;
                } else if (*prediction == Boundedness::Compute) {
                    row[0] += 1;
                } else {
                    row[1] += 1;
                }
            }
            char label[96];
            std::snprintf(label, sizeof(label), "temperature=%g top_p=%g",
                          run.meta.value("temperature", 0.0), run.meta.value("top_p", 0.0));
            block.rows.push_back(ChiSweepRow{label, {}});
            counts.push_back(row);
        }
        block.columns = {"Compute", "Bandwidth"};
        if (any_invalid) block.columns.push_back("Invalid");
        std::vector<std::vector<double>> table;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            std::vector<double> row{counts[i][0], counts[i][1]};
            if (any_invalid) row.push_back(counts[i][2]);
            block.rows[i].counts = row;
            table.push_back(std::move(row));
        }
        try {
            block.result = chi_squared_independence(table);
        } catch (const std::domain_error& e) {
            throw PipelineError(std::string("chi-squared sweep: ") + e.what());
        }
        report.chi_squared = std::move(block);
    }

    emit_report(report, args.out_file, "json");
    fs::path text_path = args.out_file;
    text_path.replace_extension(".txt");
    emit_report(report, text_path, "text");
    std::cout << render_report_text(report);

    if (!args.plot_data_file.empty()) {
        if (args.profiles_file.empty())
            throw SchemaError("--plot-data requires --profiles (labeled profiles file)");
        ProfilesFile profiles = load_profiles(args.profiles_file);
        emit_roofline_plot_data(profiles.programs, profiles.hardware, args.plot_data_file);
    }

    RunManifest manifest = make_manifest("evaluate");
    manifest.config = json{{"responses", args.responses_dir},
                           {"out", args.out_file},
                           {"plot_data", args.plot_data_file},
                           {"chi_squared", args.chi_squared_dir}};
    manifest.add_input("responses", args.responses_dir);
    if (!args.dataset_file.empty()) manifest.add_input("dataset", args.dataset_file);
    if (!args.profiles_file.empty()) manifest.add_input("profiles", args.profiles_file);
    manifest.write(args.out_file + ".manifest.json");
}

struct ExportFinetuneArgs {
    std::string dataset_file;
    std::string split_name = "train";
    std::string hardware_file;
    std::string out_file;
};

void run_export_finetune(const ExportFinetuneArgs& args) {
    Dataset dataset = load_dataset(args.dataset_file);
    HardwareSpec spec = args.hardware_file.empty() ? dataset.hardware
                                                   : load_hardware_spec(args.hardware_file);
    Split which;
    try {
        which = split_from_string(args.split_name);
    } catch (const std::domain_error& e) {
        throw SchemaError(e.what());
    }

    std::ostringstream out;
    std::size_t written = export_finetune_records(dataset, which, spec, out);
    write_text_file(args.out_file, out.str());

    RunManifest manifest = make_manifest("export-finetune");
    manifest.config = json{{"dataset", args.dataset_file},
                           {"split", args.split_name},
                           {"hardware", args.hardware_file},
                           {"out", args.out_file}};
    manifest.add_input("dataset", args.dataset_file);
    if (!args.hardware_file.empty()) manifest.add_input("hardware", args.hardware_file);
    manifest.write(args.out_file + ".manifest.json");

    std::cout << "exported " << written << " " << args.split_name << " records to "
              << args.out_file << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Roofline boundedness pipeline: label GPU kernels from profiled metrics, build "
                 "classification datasets, generate prompts, query chat models, score results"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest_cmd =
        app.add_subcommand("ingest", "Parse profiler metric exports and label programs");
    ingest_cmd->add_option("--profiles", ingest_args.profiles_dir, "Directory of metric exports")
        ->required();
    ingest_cmd->add_option("--hardware", ingest_args.hardware_file, "Hardware spec JSON file")
        ->required();
    ingest_cmd->add_option("--config", ingest_args.config_file, "Metric mapping JSON file")
        ->required();
    ingest_cmd->add_option("--out", ingest_args.out_file, "Labeled profiles output file")
        ->required();

    BuildDatasetArgs build_args;
    auto* build_cmd =
        app.add_subcommand("build-dataset", "Build the balanced, token-pruned, split dataset");
    build_cmd->add_option("--profiles", build_args.profiles_file, "Labeled profiles file")
        ->required();
    build_cmd->add_option("--sources", build_args.sources_root, "Root of per-program source dirs")
        ->required();
    build_cmd->add_option("--token-cutoff", build_args.token_cutoff, "Token cutoff (default 8000)");
    build_cmd->add_option("--seed", build_args.seed, "Seed for balancing and splitting");
    build_cmd->add_option("--split", build_args.split_fraction, "Training fraction (default 0.8)");
    build_cmd->add_option("--tokenizer", build_args.tokenizer_id, "Tokenizer id");
    build_cmd->add_option("--allowlist", build_args.allowlist_csv,
                          "Comma-separated source extensions (default common C/C++/CUDA)");
    build_cmd->add_option("--out", build_args.out_file, "Dataset output file")->required();

    GenRq1Args rq1_args;
    auto* rq1_cmd = app.add_subcommand("gen-rq1", "Generate random-roofline prompt bundles");
    rq1_cmd->add_option("--count", rq1_args.count, "Number of rooflines (two tasks each)");
    rq1_cmd->add_option("--shots", rq1_args.shots, "Worked examples per prompt: 2, 4, or 8");
    rq1_cmd->add_flag("--cot,!--no-cot", rq1_args.with_cot,
                      "Include chain-of-thought text in the worked examples");
    rq1_cmd->add_option("--seed", rq1_args.seed, "Seed");
    rq1_cmd->add_option("--out", rq1_args.out_dir, "Output directory")->required();

    QueryArgs query_args;
    auto* query_cmd = app.add_subcommand("query", "Send prompts to a chat-completion model");
    query_cmd->add_option("--prompts", query_args.prompts_dir, "Prompt bundle dir (rq1 mode)");
    query_cmd->add_option("--dataset", query_args.dataset_file, "Dataset file (zero/few modes)");
    query_cmd->add_option("--mode", query_args.mode, "rq1, zero, or few")
        ->required()
        ->check(CLI::IsMember({"rq1", "zero", "few"}));
    query_cmd->add_option("--model", query_args.model_id, "Model id (overrides provider config)");
    query_cmd->add_option("--provider-config", query_args.provider_config_file,
                          "Provider config JSON file");
    query_cmd->add_option("--examples", query_args.examples_dir, "Example bank dir (few mode)");
    query_cmd->add_option("--cache", query_args.cache_dir, "Response cache directory")->required();
    query_cmd->add_option("--hardware", query_args.hardware_file,
                          "Hardware spec override (defaults to the dataset's)");
    query_cmd->add_option("--concurrency", query_args.concurrency, "Max in-flight requests");
    query_cmd->add_flag("--replay", query_args.replay, "Serve responses from the cache only");
    query_cmd->add_option("--temperature", query_args.temperature, "Sampling temperature override");
    query_cmd->add_option("--top-p", query_args.top_p, "top_p override");
    query_cmd->add_option("--out", query_args.out_dir, "Response run output directory")->required();

    EvaluateArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score recorded responses and emit reports");
    eval_cmd->add_option("--responses", eval_args.responses_dir, "Run dir or dir of run dirs")
        ->required();
    eval_cmd->add_option("--dataset", eval_args.dataset_file, "Dataset file (zero/few truth)");
    eval_cmd->add_option("--out", eval_args.out_file, "Report JSON output path")->required();
    eval_cmd->add_option("--plot-data", eval_args.plot_data_file, "Roofline plot data output");
    eval_cmd->add_option("--profiles", eval_args.profiles_file,
                         "Labeled profiles file (required with --plot-data)");
    eval_cmd->add_option("--chi-squared", eval_args.chi_squared_dir,
                         "Dir of sweep runs for the hyperparameter sensitivity test");

    ExportFinetuneArgs export_args;
    auto* export_cmd =
        app.add_subcommand("export-finetune", "Export fine-tune records for one split");
    export_cmd->add_option("--dataset", export_args.dataset_file, "Dataset file")->required();
    export_cmd->add_option("--split", export_args.split_name, "train or validation");
    export_cmd->add_option("--hardware", export_args.hardware_file,
                           "Hardware spec file (defaults to the dataset's)");
    export_cmd->add_option("--out", export_args.out_file, "Records output file (JSONL)")
        ->required();

    try {
        app.parse(argc, argv);
        if (ingest_cmd->parsed()) run_ingest(ingest_args);
        else if (build_cmd->parsed()) run_build_dataset(build_args);
        else if (rq1_cmd->parsed()) run_gen_rq1(rq1_args);
        else if (query_cmd->parsed()) run_query(query_args);
        else if (eval_cmd->parsed()) run_evaluate(eval_args);
        else if (export_cmd->parsed()) run_export_finetune(export_args);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
        case ErrorKind::io: return 1;
        case ErrorKind::validation: return 2;
        case ErrorKind::pipeline: return 3;
        }
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
