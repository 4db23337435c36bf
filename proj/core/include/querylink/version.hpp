#pragma once

namespace querylink {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace querylink
