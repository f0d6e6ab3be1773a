#pragma once

namespace wvsim {

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace wvsim
