#pragma once

namespace fer {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kVersionTag = "fer 0.1.0";

}  // namespace fer
