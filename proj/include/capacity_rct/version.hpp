#pragma once

namespace capacity_rct {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace capacity_rct
