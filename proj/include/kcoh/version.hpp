#pragma once

namespace kcoh {

inline constexpr const char* kToolVersion = "kcoh 0.1.0";

}  // namespace kcoh
