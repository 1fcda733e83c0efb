#pragma once

namespace cbs {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace cbs
