#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rooflinekit/dataset.hpp"
#include "rooflinekit/roofline.hpp"

namespace rooflinekit {

// One synthetic roofline question: random hardware numbers plus a queried AI
// whose true class is fixed by construction.
struct RandomRooflineTask {
    std::string id;
    double bandwidth_gbs = 0.0;
    double peak_gflops = 0.0;
    double queried_ai = 0.0;
    double queried_perf_gflops = 0.0;
    Boundedness ground_truth = Boundedness::Bandwidth;
};

struct RooflineTaskPair {
    RandomRooflineTask bandwidth; // AI strictly below the balance point
    RandomRooflineTask compute;   // AI strictly above it
};

// count random rooflines, each contributing one bandwidth-bound and one
// compute-bound task. Sampling ranges: bandwidth U[20,2000) GB/s, peak
// U[20,20000) GFLOP/s, BB AI in [0.05,0.9)*balance, CB AI in [1.1,10)*balance,
// queried performance in (0, ceiling(AI)].
std::vector<RooflineTaskPair> gen_random_rooflines(int count, std::uint64_t seed);

enum class PromptMode { rq1_cot, rq1_plain, zero_shot, few_shot };

const char* to_string(PromptMode mode);
PromptMode prompt_mode_from_string(const std::string& text);

struct PromptBundle {
    std::string system_text;
    std::string user_text;
    PromptMode mode = PromptMode::zero_shot;
    int shots = 0;
    std::string target_sample_id;
    std::vector<std::string> expected_answer_vocabulary{"Compute", "Bandwidth"};
};

std::string prompt_bundle_to_json_line(const PromptBundle& bundle);
PromptBundle prompt_bundle_from_json_line(const std::string& line);

// Numbers inside prompt text: two decimals with trailing zeros trimmed
// ("45.9", "52.22", "100").
std::string format_prompt_number(double value);

struct Rq1Prompt {
    PromptBundle bundle;
    // The worked examples embedded in the prompt, kept at full precision so
    // their answers can be re-derived independently of the rendered text.
    std::vector<RandomRooflineTask> shot_examples;
};

// Worked Question/(Thought)/Answer examples from fresh random rooflines,
// alternating bandwidth/compute, followed by the task's bare question.
// shots must be 2, 4, or 8.
Rq1Prompt build_rq1_prompt(const RandomRooflineTask& task, int shots, bool with_cot,
                           std::uint64_t seed);

// Source-code classification prompt with the two fixed pseudo-code examples.
PromptBundle build_zero_shot_prompt(const DatasetSample& sample, const HardwareSpec& spec);

struct BankExample {
    std::string program_id;
    Language language = Language::CUDA;
    Boundedness label = Boundedness::Bandwidth;
    std::string source_text;
};

// Real labeled example programs, one directory per program under
// <bank>/<language>/<class>/<program_id>/ plus a manifest.json listing them.
class ExampleBank {
public:
    static ExampleBank load(const std::filesystem::path& dir);

    // First (by program_id) example for the given language/class.
    const BankExample& find(Language language, Boundedness label) const;

    // Throws BankError if any bank program also appears in the dataset.
    void ensure_disjoint(const std::set<std::string>& dataset_program_ids) const;

    const std::vector<BankExample>& examples() const { return examples_; }

private:
    std::vector<BankExample> examples_;
};

// Same skeleton as the zero-shot prompt, with the pseudo-code examples
// replaced by two real language-matched programs (one per class).
PromptBundle build_few_shot_prompt(const DatasetSample& sample, const HardwareSpec& spec,
                                   const ExampleBank& bank);

struct ParsedPrediction {
    std::string raw_text;
    std::optional<Boundedness> prediction; // nullopt = invalid response
    std::string matched_span;
};

// Case-insensitive scan; the last occurrence of either class keyword wins.
ParsedPrediction parse_classification_response(std::string_view raw_text);

// Prefers the keyword after the final "Answer:" marker, falling back to the
// last-occurrence rule.
ParsedPrediction parse_rq1_response(std::string_view raw_text);

// One fine-tune record per sample in the requested split: the zero-shot
// prompt as system+user messages, the ground-truth word as the assistant
// message. Line-delimited JSON. Returns the number of records written.
std::size_t export_finetune_records(const Dataset& dataset, Split which, const HardwareSpec& spec,
                                    std::ostream& out);

} // namespace rooflinekit
