#include "rooflinekit/json_util.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rooflinekit/errors.hpp"

namespace rooflinekit {

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw LoadError("bad JSON in " + path.string() + ": " + e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    static std::atomic<unsigned long> counter{0};
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(static_cast<unsigned long>(::getpid())) + "." +
           std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
    }
}

json ai_to_json(double ai) {
    if (std::isinf(ai)) return json("inf");
    return json(ai);
}

double ai_from_json(const json& value) {
    if (value.is_string()) {
        if (value.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw LoadError("bad ai value: " + value.dump());
    }
    return value.get<double>();
}

json to_json(const Dim3& d) { return json::array({d.x, d.y, d.z}); }

Dim3 dim3_from_json(const json& value) {
    if (!value.is_array() || value.size() != 3) throw LoadError("bad dim3: " + value.dump());
    return Dim3{value[0].get<int>(), value[1].get<int>(), value[2].get<int>()};
}

json to_json(const HardwareSpec& spec) {
    return json{{"name", spec.name},
                {"peak_sp_gops", spec.peak.at(OpKind::SP)},
                {"peak_dp_gops", spec.peak.at(OpKind::DP)},
                {"peak_int_gops", spec.peak.at(OpKind::INT)},
                {"bandwidth_gbs", spec.bandwidth_gbs}};
}

HardwareSpec hardware_spec_from_json(const json& value) {
    HardwareSpec spec;
    try {
        spec.name = value.at("name").get<std::string>();
        spec.peak[OpKind::SP] = value.at("peak_sp_gops").get<double>();
        spec.peak[OpKind::DP] = value.at("peak_dp_gops").get<double>();
        spec.peak[OpKind::INT] = value.at("peak_int_gops").get<double>();
        spec.bandwidth_gbs = value.at("bandwidth_gbs").get<double>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("bad hardware spec: ") + e.what());
    }
    try {
        spec.validate();
    } catch (const std::domain_error& e) {
        throw SchemaError(e.what());
    }
    return spec;
}

HardwareSpec load_hardware_spec(const std::filesystem::path& path) {
    return hardware_spec_from_json(read_json_file(path));
}

json to_json(const KernelProfile& profile) {
    json ops;
    for (OpKind kind : kOpKinds) ops[to_string(kind)] = profile.op_counts.at(kind);
    return json{{"program_id", profile.program_id},
                {"kernel_name", profile.kernel_name},
                {"language", to_string(profile.language)},
                {"op_counts", ops},
                {"bytes_read", profile.bytes_read},
                {"bytes_written", profile.bytes_written},
                {"exec_time_s", profile.exec_time_s},
                {"grid", to_json(profile.grid)},
                {"block", to_json(profile.block)},
                {"args", profile.launch_args}};
}

KernelProfile kernel_profile_from_json(const json& value) {
    KernelProfile p;
    try {
        p.program_id = value.at("program_id").get<std::string>();
        p.kernel_name = value.at("kernel_name").get<std::string>();
        p.language = language_from_string(value.at("language").get<std::string>());
        for (OpKind kind : kOpKinds)
            p.op_counts[kind] = value.at("op_counts").at(to_string(kind)).get<double>();
        p.bytes_read = value.at("bytes_read").get<double>();
        p.bytes_written = value.at("bytes_written").get<double>();
        p.exec_time_s = value.at("exec_time_s").get<double>();
        p.grid = dim3_from_json(value.at("grid"));
        p.block = dim3_from_json(value.at("block"));
        p.launch_args = value.at("args").get<std::string>();
    } catch (const json::exception& e) {
        throw LoadError(std::string("bad kernel profile record: ") + e.what());
    }
    return p;
}

json to_json(const RooflinePoint& point) {
    return json{{"ai", ai_to_json(point.ai)},
                {"achieved_gops", point.achieved_gops},
                {"kind", to_string(point.kind)},
                {"label", to_string(point.label)}};
}

RooflinePoint roofline_point_from_json(const json& value) {
    RooflinePoint p;
    p.ai = ai_from_json(value.at("ai"));
    p.achieved_gops = value.at("achieved_gops").get<double>();
    p.kind = op_kind_from_string(value.at("kind").get<std::string>());
    p.label = boundedness_from_string(value.at("label").get<std::string>());
    return p;
}

json to_json(const KernelLabel& label) {
    json points;
    for (const auto& [kind, point] : label.points) points[to_string(kind)] = to_json(point);
    return json{{"label", to_string(label.label)},
                {"points", points},
                {"warnings", label.warnings}};
}

KernelLabel kernel_label_from_json(const json& value) {
    KernelLabel label;
    label.label = boundedness_from_string(value.at("label").get<std::string>());
    for (OpKind kind : kOpKinds)
        label.points[kind] = roofline_point_from_json(value.at("points").at(to_string(kind)));
    if (value.contains("warnings"))
        label.warnings = value.at("warnings").get<std::vector<std::string>>();
    return label;
}

} // namespace rooflinekit
