#pragma once

namespace clqg {

inline constexpr const char* version_string = "clqg 0.1.0";

} // namespace clqg
