#pragma once

#include <numbers>

namespace cavsplit {

namespace phys {
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0;       // m/s
inline constexpr double boltzmann = 1.380649e-23;           // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double pascal_per_torr = 133.322368421;
inline constexpr double zero_celsius = 273.15;              // K
inline constexpr double rb87_mass_u = 86.909180527;
} // namespace phys

// Angular frequencies (rad/s) are used internally; Hz only at file/CLI boundaries.
inline constexpr double to_angular(double hz) { return phys::two_pi * hz; }
inline constexpr double to_hz(double rad_s) { return rad_s / phys::two_pi; }

} // namespace cavsplit
