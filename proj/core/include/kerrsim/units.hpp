#pragma once

#include <numbers>

namespace kerrsim::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// hbar / k_B in kelvin seconds.
inline constexpr double hbar_over_kb = 7.638232577577e-12;

/// Angular frequency (rad/s) of a cyclic frequency given in Hz.
constexpr double angular(double hz) { return two_pi * hz; }
constexpr double cyclic(double rad_per_s) { return rad_per_s / two_pi; }

/// Energy hbar*omega expressed as a temperature in kelvin.
constexpr double kelvin(double rad_per_s) { return hbar_over_kb * rad_per_s; }
constexpr double rad_per_s_from_kelvin(double kelvin) { return kelvin / hbar_over_kb; }

}  // namespace kerrsim::units
