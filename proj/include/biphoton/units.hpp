#pragma once

#include <numbers>

namespace biphoton {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace units {

inline constexpr double nm = 1e-9;
inline constexpr double um = 1e-6;
inline constexpr double mm = 1e-3;
inline constexpr double ps = 1e-12;
inline constexpr double fs = 1e-15;
inline constexpr double deg = std::numbers::pi / 180.0;

}  // namespace units

// Vacuum wavelength (m) <-> angular frequency (rad/s).
constexpr double omega_from_wavelength(double wavelength) {
  return kTwoPi * kSpeedOfLight / wavelength;
}

constexpr double wavelength_from_omega(double omega) {
  return kTwoPi * kSpeedOfLight / omega;
}

}  // namespace biphoton
