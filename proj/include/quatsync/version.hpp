#pragma once

namespace quatsync {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace quatsync
