#pragma once

namespace fracfit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fracfit
