#pragma once

namespace subhj {

inline constexpr const char* kVersion = "0.1.0";

} // namespace subhj
