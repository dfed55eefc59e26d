#pragma once

namespace rooflinekit {

inline constexpr const char* kVersion = "0.1.0";

} // namespace rooflinekit
