#pragma once

#include <numbers>

namespace freelab::units {

inline constexpr double pa_per_psi = 6894.757;

constexpr double psi_to_pa(double psi) { return psi * pa_per_psi; }
constexpr double pa_to_psi(double pa) { return pa / pa_per_psi; }
constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace freelab::units
