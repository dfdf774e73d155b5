#pragma once

namespace ftf::constants {

// CODATA 2018 exact SI values.
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck = 6.62607015e-34;              // J s

// 4 e^2 / h in Hz*F: multiply by an inverse capacitance (1/F) to get a
// coupling energy in Hz.
inline constexpr double four_e2_over_h = 4.0 * elementary_charge * elementary_charge / planck;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace ftf::constants
