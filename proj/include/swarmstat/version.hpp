#pragma once

namespace swarmstat {

inline constexpr const char* kVersion = "0.1.0";

} // namespace swarmstat
