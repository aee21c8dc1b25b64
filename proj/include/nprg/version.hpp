#pragma once

namespace nprg {

inline constexpr const char* kToolName = "nprg-flow";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace nprg
