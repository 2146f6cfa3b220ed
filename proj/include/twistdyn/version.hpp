#pragma once

namespace twistdyn {

inline constexpr const char* kToolkitName = "twistdyn";
inline constexpr const char* kToolkitVersion = "1.0.0";

}  // namespace twistdyn
