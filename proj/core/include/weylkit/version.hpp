#pragma once

namespace weylkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace weylkit
