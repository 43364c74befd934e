#pragma once

namespace oa {

inline constexpr const char* kToolName = "oax";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace oa
