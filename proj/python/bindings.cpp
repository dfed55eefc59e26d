#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rooflinekit/dataset.hpp"
#include "rooflinekit/metrics.hpp"
#include "rooflinekit/prompts.hpp"
#include "rooflinekit/roofline.hpp"
#include "rooflinekit/stats.hpp"
#include "rooflinekit/tokenizer.hpp"
#include "rooflinekit/version.hpp"

namespace py = pybind11;
using namespace rooflinekit;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Roofline boundedness classification core";
    m.attr("__version__") = kVersion;

    py::enum_<OpKind>(m, "OpKind")
        .value("SP", OpKind::SP)
        .value("DP", OpKind::DP)
        .value("INT", OpKind::INT);

    py::enum_<Boundedness>(m, "Boundedness")
        .value("Compute", Boundedness::Compute)
        .value("Bandwidth", Boundedness::Bandwidth);

    py::enum_<Language>(m, "Language").value("CUDA", Language::CUDA).value("OMP", Language::OMP);

    py::enum_<Split>(m, "Split")
        .value("train", Split::train)
        .value("validation", Split::validation)
        .value("unassigned", Split::unassigned);

    py::class_<Dim3>(m, "Dim3")
        .def(py::init<>())
        .def(py::init([](int x, int y, int z) { return Dim3{x, y, z}; }), py::arg("x"),
             py::arg("y") = 1, py::arg("z") = 1)
        .def_readwrite("x", &Dim3::x)
        .def_readwrite("y", &Dim3::y)
        .def_readwrite("z", &Dim3::z);

    py::class_<HardwareSpec>(m, "HardwareSpec")
        .def(py::init<>())
        .def(py::init([](std::string name, std::map<OpKind, double> peak, double bandwidth_gbs) {
                 HardwareSpec spec{std::move(name), std::move(peak), bandwidth_gbs};
                 spec.validate();
                 return spec;
             }),
             py::arg("name"), py::arg("peak"), py::arg("bandwidth_gbs"))
        .def_readwrite("name", &HardwareSpec::name)
        .def_readwrite("peak", &HardwareSpec::peak)
        .def_readwrite("bandwidth_gbs", &HardwareSpec::bandwidth_gbs);

    py::class_<KernelProfile>(m, "KernelProfile")
        .def(py::init<>())
        .def_readwrite("program_id", &KernelProfile::program_id)
        .def_readwrite("kernel_name", &KernelProfile::kernel_name)
        .def_readwrite("language", &KernelProfile::language)
        .def_readwrite("op_counts", &KernelProfile::op_counts)
        .def_readwrite("bytes_read", &KernelProfile::bytes_read)
        .def_readwrite("bytes_written", &KernelProfile::bytes_written)
        .def_readwrite("exec_time_s", &KernelProfile::exec_time_s)
        .def_readwrite("grid", &KernelProfile::grid)
        .def_readwrite("block", &KernelProfile::block)
        .def_readwrite("launch_args", &KernelProfile::launch_args);

    py::class_<RooflinePoint>(m, "RooflinePoint")
        .def_readonly("ai", &RooflinePoint::ai)
        .def_readonly("achieved_gops", &RooflinePoint::achieved_gops)
        .def_readonly("kind", &RooflinePoint::kind)
        .def_readonly("label", &RooflinePoint::label);

    py::class_<KernelLabel>(m, "KernelLabel")
        .def_readonly("label", &KernelLabel::label)
        .def_readonly("points", &KernelLabel::points)
        .def_readonly("warnings", &KernelLabel::warnings);

    m.def("balance_point", &balance_point, py::arg("peak_gops"), py::arg("bandwidth_gbs"),
          "peak / bandwidth, the AI where the roofline knee sits");
    m.def("arithmetic_intensity", &arithmetic_intensity, py::arg("ops"), py::arg("bytes_total"));
    m.def("classify_op", &classify_op, py::arg("ai"), py::arg("balance"));
    m.def("aggregate_label", &aggregate_label, py::arg("per_op"));
    m.def("achieved_performance", &achieved_performance, py::arg("ops"), py::arg("exec_time_s"));
    m.def("roofline_ceiling", &roofline_ceiling, py::arg("ai"), py::arg("spec"), py::arg("kind"));
    m.def("label_kernel", &label_kernel, py::arg("profile"), py::arg("spec"));

    py::class_<DatasetSample>(m, "DatasetSample")
        .def(py::init<>())
        .def_readwrite("program_id", &DatasetSample::program_id)
        .def_readwrite("language", &DatasetSample::language)
        .def_readwrite("kernel_name", &DatasetSample::kernel_name)
        .def_readwrite("source_text", &DatasetSample::source_text)
        .def_readwrite("token_count", &DatasetSample::token_count)
        .def_readwrite("label", &DatasetSample::label)
        .def_readwrite("split", &DatasetSample::split)
        .def_readwrite("grid", &DatasetSample::grid)
        .def_readwrite("block", &DatasetSample::block)
        .def_readwrite("launch_args", &DatasetSample::launch_args);

    m.def("scrape_sources", &scrape_sources, py::arg("program_dir"), py::arg("allowlist"));
    m.def("default_source_allowlist", &default_source_allowlist);
    m.def("prune_by_tokens", &prune_by_tokens, py::arg("samples"), py::arg("cutoff"));
    m.def("balance", &balance, py::arg("samples"), py::arg("seed"));
    m.def("split", &split, py::arg("samples"), py::arg("fraction"), py::arg("seed"));
    m.def(
        "count_tokens",
        [](const std::string& text, const std::string& tokenizer_id) {
            TokenizerHandle handle = make_tokenizer(tokenizer_id);
            return handle.tokenizer->count(text);
        },
        py::arg("text"), py::arg("tokenizer_id") = "approx-chars4");

    py::class_<RandomRooflineTask>(m, "RandomRooflineTask")
        .def_readonly("id", &RandomRooflineTask::id)
        .def_readonly("bandwidth_gbs", &RandomRooflineTask::bandwidth_gbs)
        .def_readonly("peak_gflops", &RandomRooflineTask::peak_gflops)
        .def_readonly("queried_ai", &RandomRooflineTask::queried_ai)
        .def_readonly("queried_perf_gflops", &RandomRooflineTask::queried_perf_gflops)
        .def_readonly("ground_truth", &RandomRooflineTask::ground_truth);

    py::class_<RooflineTaskPair>(m, "RooflineTaskPair")
        .def_readonly("bandwidth", &RooflineTaskPair::bandwidth)
        .def_readonly("compute", &RooflineTaskPair::compute);

    py::enum_<PromptMode>(m, "PromptMode")
        .value("rq1_cot", PromptMode::rq1_cot)
        .value("rq1_plain", PromptMode::rq1_plain)
        .value("zero_shot", PromptMode::zero_shot)
        .value("few_shot", PromptMode::few_shot);

    py::class_<PromptBundle>(m, "PromptBundle")
        .def_readonly("system_text", &PromptBundle::system_text)
        .def_readonly("user_text", &PromptBundle::user_text)
        .def_readonly("mode", &PromptBundle::mode)
        .def_readonly("shots", &PromptBundle::shots)
        .def_readonly("target_sample_id", &PromptBundle::target_sample_id)
        .def_readonly("expected_answer_vocabulary", &PromptBundle::expected_answer_vocabulary);

    py::class_<Rq1Prompt>(m, "Rq1Prompt")
        .def_readonly("bundle", &Rq1Prompt::bundle)
        .def_readonly("shot_examples", &Rq1Prompt::shot_examples);

    m.def("gen_random_rooflines", &gen_random_rooflines, py::arg("count"), py::arg("seed"));
    m.def("build_rq1_prompt", &build_rq1_prompt, py::arg("task"), py::arg("shots"),
          py::arg("with_cot"), py::arg("seed"));
    m.def("build_zero_shot_prompt", &build_zero_shot_prompt, py::arg("sample"), py::arg("spec"));
    m.def("format_prompt_number", &format_prompt_number, py::arg("value"));

    py::class_<ParsedPrediction>(m, "ParsedPrediction")
        .def_readonly("raw_text", &ParsedPrediction::raw_text)
        .def_readonly("prediction", &ParsedPrediction::prediction)
        .def_readonly("matched_span", &ParsedPrediction::matched_span);

    m.def("parse_classification_response", &parse_classification_response, py::arg("raw_text"));
    m.def("parse_rq1_response", &parse_rq1_response, py::arg("raw_text"));

    py::class_<ConfusionMatrix2x2>(m, "ConfusionMatrix2x2")
        .def(py::init<>())
        .def_readwrite("compute_compute", &ConfusionMatrix2x2::compute_compute)
        .def_readwrite("compute_bandwidth", &ConfusionMatrix2x2::compute_bandwidth)
        .def_readwrite("bandwidth_compute", &ConfusionMatrix2x2::bandwidth_compute)
        .def_readwrite("bandwidth_bandwidth", &ConfusionMatrix2x2::bandwidth_bandwidth)
        .def_readwrite("invalid_count", &ConfusionMatrix2x2::invalid_count)
        .def("total", &ConfusionMatrix2x2::total)
        .def("add", &ConfusionMatrix2x2::add, py::arg("truth"), py::arg("prediction"));

    m.def("accuracy", &accuracy, py::arg("cm"));
    m.def("macro_f1", &macro_f1, py::arg("cm"));
    m.def("mcc", &mcc, py::arg("cm"));

    py::class_<ChiSquaredResult>(m, "ChiSquaredResult")
        .def_readonly("statistic", &ChiSquaredResult::statistic)
        .def_readonly("dof", &ChiSquaredResult::dof)
        .def_readonly("p_value", &ChiSquaredResult::p_value);

    m.def("chi_squared_independence", &chi_squared_independence, py::arg("table"));
    m.def("regularized_gamma_q", &regularized_gamma_q, py::arg("a"), py::arg("x"));
    m.def("regularized_gamma_p", &regularized_gamma_p, py::arg("a"), py::arg("x"));
}
