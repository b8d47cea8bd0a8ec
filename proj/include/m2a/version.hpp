#pragma once

namespace m2a {

inline constexpr const char* version_string = "0.1.0";
inline constexpr const char* tool_name = "m2a";

} // namespace m2a
