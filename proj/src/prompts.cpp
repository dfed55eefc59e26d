#include "rooflinekit/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "rooflinekit/errors.hpp"
#include "rooflinekit/json_util.hpp"
#include "rooflinekit/rng.hpp"

namespace rooflinekit {

namespace {

constexpr const char* kSystemPreamble =
    "You are a GPU performance analysis expert that classifies kernels into Arithmetic "
    "Intensity Roofline model categories based on their source code characteristics. Your task "
    "is to provide one of the following performance boundedness classifications: Compute or "
    "Bandwidth.\n"
    "\n"
    "A kernel is considered Compute bound if its performance is primarily limited by the number "
    "of operations it performs, and Bandwidth bound if its performance is primarily limited by "
    "the rate at which data can be moved between memory and processing units.\n"
    "\n"
    "Provide only one word as your response, chosen from the set: ['Compute', 'Bandwidth'].\n"
    "\n"
    "Examples:\n"
    "\n";

constexpr const char* kPseudoExamples =
    "Example 1:\n"
    "Kernel Source Code (simplified):\n"
    "for i = 0 to 1000000 {\n"
    "  a[i] = a[i] + b[i];\n"
    "}\n"
    "Response: Compute\n"
    "\n"
    "Example 2:\n"
    "Kernel Source Code (simplified):\n"
    "for i = 0 to 10 {\n"
    "  load_data(large_array);\n"
    "  process_data(large_array);\n"
    "  store_data(large_array);\n"
    "}\n"
    "Response: Bandwidth\n";

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string question_text(const RandomRooflineTask& task) {
    return "Question: Given a GPU having a global memory with a max bandwidth of " +
           format_prompt_number(task.bandwidth_gbs) + " GB/s and a peak performance of " +
           format_prompt_number(task.peak_gflops) +
           " GFLOP/s, if a program executed with an Arithmetic Intensity of " +
           format_prompt_number(task.queried_ai) + " FLOP/Byte and a performance of " +
           format_prompt_number(task.queried_perf_gflops) +
           " GFLOP/s, does the roofline model consider the program as compute-bound or "
           "bandwidth-bound?";
}

std::string thought_text(const RandomRooflineTask& task) {
    double balance = balance_point(task.peak_gflops, task.bandwidth_gbs);
    std::string text = "Thought: The max bandwidth is " + format_prompt_number(task.bandwidth_gbs) +
                       " GB/s, and peak performance is " + format_prompt_number(task.peak_gflops) +
                       " GFLOP/s. The balance point is at " + format_prompt_number(task.peak_gflops) +
                       " / " + format_prompt_number(task.bandwidth_gbs) + "= " +
                       format_prompt_number(balance) +
                       " FLOP/Byte. The program's Arithmetic Intensity is " +
                       format_prompt_number(task.queried_ai) + " FLOP/Byte. ";
    if (task.ground_truth == Boundedness::Bandwidth) {
        text += "Because " + format_prompt_number(task.queried_ai) + " < " +
                format_prompt_number(balance) +
                ", it is before the balance point, putting the program in the bandwidth-bound "
                "region. The roofline model would consider the program as bandwidth-bound.";
    } else {
        text += "Because " + format_prompt_number(task.queried_ai) + " > " +
                format_prompt_number(balance) +
                ", it is after the balance point, putting the program in the compute-bound "
                "region. The roofline model would consider the program as compute-bound.";
    }
    return text;
}

std::string hardware_block(const DatasetSample& sample, const HardwareSpec& spec) {
    if (sample.kernel_name.empty()) throw TemplateError("missing prompt field: kernel name");
    if (sample.source_text.empty()) throw TemplateError("missing prompt field: source code");
    if (spec.name.empty()) throw TemplateError("missing prompt field: GPU model");
    spec.validate();

    const char* lang = to_string(sample.language);
    std::string text =
        "Now, analyze the following source codes for the requested kernel of the specified "
        "hardware.\n"
        "\n"
        "Classify the " +
        std::string(lang) + " kernel called " + sample.kernel_name +
        " as Bandwidth or Compute bound. The system it will execute on is a " + spec.name +
        " with:\n"
        "- peak single-precision performance of " +
        format_prompt_number(spec.peak.at(OpKind::SP)) +
        " GFLOP/s\n"
        "- peak double-precision performance of " +
        format_prompt_number(spec.peak.at(OpKind::DP)) +
        " GFLOP/s\n"
        "- peak integer performance of " +
        format_prompt_number(spec.peak.at(OpKind::INT)) +
        " GINTOP/s\n"
        "- max bandwidth of " +
        format_prompt_number(spec.bandwidth_gbs) +
        " GB/s\n"
        "\n"
        "The block and grid sizes of the invoked kernel are (" +
        std::to_string(sample.block.x) + "," + std::to_string(sample.block.y) + "," +
        std::to_string(sample.block.z) + ") and (" + std::to_string(sample.grid.x) + "," +
        std::to_string(sample.grid.y) + "," + std::to_string(sample.grid.z) +
        "), respectively.\n"
        "The executable running this kernel is launched with the following command-line "
        "arguments: " +
        sample.launch_args +
        ".\n"
        "\n"
        "Below is the source code of the requested " +
        lang + " kernel:\n\n" + sample.source_text;
    return text;
}

std::string real_example_blocks(const BankExample& compute_example,
                                const BankExample& bandwidth_example) {
    auto block = [](int index, const BankExample& ex) {
        return "Example " + std::to_string(index) + ":\nKernel Source Code (" +
               to_string(ex.language) + "):\n" + ex.source_text +
               "Response: " + to_string(ex.label) + "\n";
    };
    return block(1, compute_example) + "\n" + block(2, bandwidth_example);
}

ParsedPrediction last_occurrence_scan(std::string_view raw_text) {
    ParsedPrediction parsed;
    parsed.raw_text = std::string(raw_text);
    std::string lower = lowercase(raw_text);
    std::size_t last_compute = lower.rfind("compute");
    std::size_t last_bandwidth = lower.rfind("bandwidth");
    if (last_compute == std::string::npos && last_bandwidth == std::string::npos) return parsed;
    if (last_bandwidth == std::string::npos ||
        (last_compute != std::string::npos && last_compute > last_bandwidth)) {
        parsed.prediction = Boundedness::Compute;
        parsed.matched_span = std::string(raw_text.substr(last_compute, 7));
    } else {
        parsed.prediction = Boundedness::Bandwidth;
        parsed.matched_span = std::string(raw_text.substr(last_bandwidth, 9));
    }
    return parsed;
}

} // namespace

const char* to_string(PromptMode mode) {
    switch (mode) {
    case PromptMode::rq1_cot: return "rq1_cot";
    case PromptMode::rq1_plain: return "rq1_plain";
    case PromptMode::zero_shot: return "zero_shot";
    case PromptMode::few_shot: return "few_shot";
    }
    return "?";
}

PromptMode prompt_mode_from_string(const std::string& text) {
    if (text == "rq1_cot") return PromptMode::rq1_cot;
    if (text == "rq1_plain") return PromptMode::rq1_plain;
    if (text == "zero_shot") return PromptMode::zero_shot;
    if (text == "few_shot") return PromptMode::few_shot;
    throw std::domain_error("unknown prompt mode: " + text);
}

std::string prompt_bundle_to_json_line(const PromptBundle& bundle) {
    json doc{{"id", bundle.target_sample_id},
             {"mode", to_string(bundle.mode)},
             {"shots", bundle.shots},
             {"system", bundle.system_text},
             {"user", bundle.user_text},
             {"vocabulary", bundle.expected_answer_vocabulary}};
    return doc.dump();
}

PromptBundle prompt_bundle_from_json_line(const std::string& line) {
    PromptBundle bundle;
    try {
        json doc = json::parse(line);
        bundle.target_sample_id = doc.at("id").get<std::string>();
        bundle.mode = prompt_mode_from_string(doc.at("mode").get<std::string>());
        bundle.shots = doc.at("shots").get<int>();
        bundle.system_text = doc.at("system").get<std::string>();
        bundle.user_text = doc.at("user").get<std::string>();
        bundle.expected_answer_vocabulary =
            doc.at("vocabulary").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw LoadError(std::string("bad prompt bundle line: ") + e.what());
    }
    return bundle;
}

std::string format_prompt_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    std::string text(buf);
    while (!text.empty() && text.back() == '0') text.pop_back();
    if (!text.empty() && text.back() == '.') text.pop_back();
    return text;
}

std::vector<RooflineTaskPair> gen_random_rooflines(int count, std::uint64_t seed) {
    if (count < 1) throw std::domain_error("gen_random_rooflines: count must be >= 1");

    Rng rng(seed);
    std::vector<RooflineTaskPair> pairs;
    pairs.reserve(static_cast<std::size_t>(count));

    for (int i = 0; i < count; ++i) {
        double bandwidth = rng.uniform(20.0, 2000.0);
        double peak = rng.uniform(20.0, 20000.0);
        double balance = balance_point(peak, bandwidth);

        RooflineTaskPair pair;
        char id[64];

        pair.bandwidth.bandwidth_gbs = bandwidth;
        pair.bandwidth.peak_gflops = peak;
        pair.bandwidth.queried_ai = balance * rng.uniform(0.05, 0.9);
        pair.bandwidth.queried_perf_gflops =
            pair.bandwidth.queried_ai * bandwidth * rng.uniform_open0();
        pair.bandwidth.ground_truth = Boundedness::Bandwidth;
        std::snprintf(id, sizeof(id), "rq1-s%llu-r%04d-bb", static_cast<unsigned long long>(seed), i);
        pair.bandwidth.id = id;

        pair.compute.bandwidth_gbs = bandwidth;
        pair.compute.peak_gflops = peak;
        pair.compute.queried_ai = balance * rng.uniform(1.1, 10.0);
        pair.compute.queried_perf_gflops = peak * rng.uniform_open0();
        pair.compute.ground_truth = Boundedness::Compute;
        std::snprintf(id, sizeof(id), "rq1-s%llu-r%04d-cb", static_cast<unsigned long long>(seed), i);
        pair.compute.id = id;

        pairs.push_back(std::move(pair));
    }
    return pairs;
}

Rq1Prompt build_rq1_prompt(const RandomRooflineTask& task, int shots, bool with_cot,
                           std::uint64_t seed) {
    if (shots != 2 && shots != 4 && shots != 8)
        throw std::domain_error("rq1 shots must be 2, 4, or 8");

    Rq1Prompt prompt;
    auto pairs = gen_random_rooflines(shots / 2, seed);
    for (const RooflineTaskPair& pair : pairs) {
        prompt.shot_examples.push_back(pair.bandwidth);
        prompt.shot_examples.push_back(pair.compute);
    }

    std::string user;
    for (const RandomRooflineTask& example : prompt.shot_examples) {
        user += question_text(example);
        user += "\n\n";
        if (with_cot) {
            user += thought_text(example);
            user += "\n\n";
        }
        user += "Answer: ";
        user += to_string(example.ground_truth);
        user += "\n\n";
    }
    user += question_text(task);

    prompt.bundle.system_text.clear();
    prompt.bundle.user_text = std::move(user);
    prompt.bundle.mode = with_cot ? PromptMode::rq1_cot : PromptMode::rq1_plain;
    prompt.bundle.shots = shots;
    prompt.bundle.target_sample_id = task.id;
    return prompt;
}

PromptBundle build_zero_shot_prompt(const DatasetSample& sample, const HardwareSpec& spec) {
    PromptBundle bundle;
    bundle.system_text = std::string(kSystemPreamble) + kPseudoExamples;
    bundle.user_text = hardware_block(sample, spec);
    bundle.mode = PromptMode::zero_shot;
    bundle.shots = 0;
    bundle.target_sample_id = sample.program_id;
    return bundle;
}

ExampleBank ExampleBank::load(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path))
        throw BankError("example bank " + dir.string() + ": missing manifest.json");

    json doc = read_json_file(manifest_path);
    ExampleBank bank;
    try {
        for (const json& entry : doc.at("examples")) {
            BankExample ex;
            ex.program_id = entry.at("program_id").get<std::string>();
            ex.language = language_from_string(entry.at("language").get<std::string>());
            ex.label = boundedness_from_string(entry.at("label").get<std::string>());
            fs::path program_dir = dir / entry.at("path").get<std::string>();
            ex.source_text = scrape_sources(program_dir, default_source_allowlist());
            bank.examples_.push_back(std::move(ex));
        }
    } catch (const json::exception& e) {
        throw BankError("example bank " + dir.string() + ": bad manifest: " + e.what());
    }
    std::sort(bank.examples_.begin(), bank.examples_.end(),
              [](const BankExample& a, const BankExample& b) { return a.program_id < b.program_id; });
    return bank;
}

const BankExample& ExampleBank::find(Language language, Boundedness label) const {
    for (const BankExample& ex : examples_)
        if (ex.language == language && ex.label == label) return ex;
    throw BankError(std::string("example bank has no ") + to_string(language) + "/" +
                    to_string(label) + " example");
}

void ExampleBank::ensure_disjoint(const std::set<std::string>& dataset_program_ids) const {
    for (const BankExample& ex : examples_)
        if (dataset_program_ids.count(ex.program_id))
            throw BankError("example bank program '" + ex.program_id +
                            "' also appears in the dataset");
}

PromptBundle build_few_shot_prompt(const DatasetSample& sample, const HardwareSpec& spec,
                                   const ExampleBank& bank) {
    const BankExample& compute_example = bank.find(sample.language, Boundedness::Compute);
    const BankExample& bandwidth_example = bank.find(sample.language, Boundedness::Bandwidth);

    PromptBundle bundle;
    bundle.system_text =
        std::string(kSystemPreamble) + real_example_blocks(compute_example, bandwidth_example);
    bundle.user_text = hardware_block(sample, spec);
    bundle.mode = PromptMode::few_shot;
    bundle.shots = 2;
    bundle.target_sample_id = sample.program_id;
    return bundle;
}

ParsedPrediction parse_classification_response(std::string_view raw_text) {
    return last_occurrence_scan(raw_text);
}

ParsedPrediction parse_rq1_response(std::string_view raw_text) {
    std::string lower = lowercase(raw_text);
    std::size_t marker = lower.rfind("answer:");
    if (marker != std::string::npos) {
        std::string_view tail = raw_text.substr(marker);
        std::string tail_lower = lower.substr(marker);
        std::size_t first_compute = tail_lower.find("compute");
        std::size_t first_bandwidth = tail_lower.find("bandwidth");
        if (first_compute != std::string::npos || first_bandwidth != std::string::npos) {
            ParsedPrediction parsed;
            parsed.raw_text = std::string(raw_text);
            if (first_bandwidth == std::string::npos ||
                (first_compute != std::string::npos && first_compute < first_bandwidth)) {
                parsed.prediction = Boundedness::Compute;
                parsed.matched_span = std::string(tail.substr(first_compute, 7));
            } else {
                parsed.prediction = Boundedness::Bandwidth;
                parsed.matched_span = std::string(tail.substr(first_bandwidth, 9));
            }
            return parsed;
        }
    }
    return last_occurrence_scan(raw_text);
}

std::size_t export_finetune_records(const Dataset& dataset, Split which, const HardwareSpec& spec,
                                    std::ostream& out) {
    if (which == Split::unassigned)
        throw ExportError("cannot export the 'unassigned' split");
    for (const DatasetSample& sample : dataset.samples)
        if (sample.split == Split::unassigned)
            throw ExportError("dataset sample '" + sample.program_id +
                              "' has no train/validation assignment");

    std::size_t written = 0;
    for (const DatasetSample& sample : dataset.samples) {
        if (sample.split != which) continue;
        PromptBundle bundle = build_zero_shot_prompt(sample, spec);
        json record{{"messages",
                     json::array({json{{"role", "system"}, {"content", bundle.system_text}},
                                  json{{"role", "user"}, {"content", bundle.user_text}},
                                  json{{"role", "assistant"},
                                       {"content", to_string(sample.label)}}})}};
        out << record.dump() << "\n";
        ++written;
    }
    return written;
}

} // namespace rooflinekit
