#pragma once

#include <numbers>

namespace nvgrape {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kSpeedOfLight = 299792458.0;       // m/s
inline constexpr double kMu0 = 1.25663706212e-6;           // N/A^2
inline constexpr double kHbar = 1.054571817e-34;           // J s
inline constexpr double kBoltzmann = 1.380649e-23;         // J/K

} // namespace nvgrape
