#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rooflinekit/roofline.hpp"

namespace rooflinekit {

using json = nlohmann::json;

// Parse a JSON file; parse failures become LoadError with byte position,
// missing files IoError.
json read_json_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

// Write via a temp file + rename so concurrent readers never see a torn file.
void write_text_file(const std::filesystem::path& path, const std::string& content);

// ai values may be +inf, which plain JSON cannot carry; encode as the string "inf".
json ai_to_json(double ai);
double ai_from_json(const json& value);

json to_json(const Dim3& d);
Dim3 dim3_from_json(const json& value);

json to_json(const HardwareSpec& spec);
HardwareSpec hardware_spec_from_json(const json& value);

// Hardware spec file: {"name", "peak_sp_gops", "peak_dp_gops", "peak_int_gops",
// "bandwidth_gbs"}.
HardwareSpec load_hardware_spec(const std::filesystem::path& path);

json to_json(const KernelProfile& profile);
KernelProfile kernel_profile_from_json(const json& value);

json to_json(const RooflinePoint& point);
RooflinePoint roofline_point_from_json(const json& value);

json to_json(const KernelLabel& label);
KernelLabel kernel_label_from_json(const json& value);

} // namespace rooflinekit
