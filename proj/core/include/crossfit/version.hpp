#pragma once

namespace crossfit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace crossfit
