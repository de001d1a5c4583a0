#pragma once

namespace rmc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rmc
