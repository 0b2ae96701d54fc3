#pragma once

namespace boltzmann {

inline constexpr const char* version = "1.0.0";

}  // namespace boltzmann
