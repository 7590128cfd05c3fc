#pragma once

namespace relsim {

inline constexpr const char* kToolName = "relsim";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace relsim
