#pragma once

namespace optokick {

// CODATA 2018 values; every SI conversion in the library goes through these.
inline constexpr double hbar_J_s = 1.054571817e-34;
inline constexpr double k_boltzmann_J_per_K = 1.380649e-23;

// Canonical internal units: angular rates in rad/ns, times in ns.
inline constexpr double rad_per_s_to_rad_per_ns = 1e-9;

inline constexpr const char* version_string = "1.0.0";

}  // namespace optokick
