#pragma once

#include <cmath>
#include <numbers>

namespace alphaloop::dsp {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Maps an angle in degrees into [0, 360). Throws std::invalid_argument on
/// non-finite input.
double wrap360(double angle_deg);

/// Maps an angle in degrees into (-180, 180].
double wrap180(double angle_deg);

/// Signed circular difference a - b in (-180, 180].
inline double circ_diff(double a_deg, double b_deg) { return wrap180(a_deg - b_deg); }

/// Unsigned circular distance in [0, 180].
inline double circ_dist(double a_deg, double b_deg) { return std::abs(circ_diff(a_deg, b_deg)); }

}  // namespace alphaloop::dsp
