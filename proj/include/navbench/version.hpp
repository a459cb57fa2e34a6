#pragma once

namespace navbench {

inline constexpr const char* kToolName = "navbench";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace navbench
