#pragma once

namespace prefcheck {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace prefcheck
