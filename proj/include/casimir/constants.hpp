#pragma once

#include <numbers>

namespace casimir {

// CODATA 2018 exact/recommended values, SI units.
struct PhysicalConstants {
  static constexpr double hbar = 1.054571817e-34;  // J s
  static constexpr double c = 2.99792458e8;        // m/s
  static constexpr double k_B = 1.380649e-23;      // J/K
};

inline constexpr double pi = std::numbers::pi;

// Apéry's constant.
inline constexpr double zeta3 = 1.2020569031595942853997;

static_assert(PhysicalConstants::hbar > 0 && PhysicalConstants::c > 0 &&
              PhysicalConstants::k_B > 0);

}  // namespace casimir
