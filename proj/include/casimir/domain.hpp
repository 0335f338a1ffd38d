#pragma once

// Physical description of the Casimir geometry: mirror response, temperature and
// cavity. Everything here is an immutable value type in SI units.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

/// 2*pi*c / lambda_P.
inline double plasma_frequency(double lambda_P) {
  if (!(lambda_P > 0.0) || !std::isfinite(lambda_P)) {
    throw InputError("plasma wavelength must be positive and finite");
  }
  return 2.0 * pi * PhysicalConstants::c / lambda_P;
}

/// hbar*c / (k_B*T).
inline double thermal_wavelength(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw InputError("temperature must be positive and finite");
  }
  return PhysicalConstants::hbar * PhysicalConstants::c / (PhysicalConstants::k_B * T);
}

/// Mirror with total reflection at every frequency and wavevector.
struct PerfectMirror {
  friend bool operator==(const PerfectMirror&, const PerfectMirror&) = default;
};

/// Metallic mirror with plasma-model permittivity eps(i xi) = 1 + omega_P^2/xi^2.
class PlasmaMirror {
 public:
  explicit PlasmaMirror(double lambda_P)
      : lambda_P_(lambda_P), omega_P_(plasma_frequency(lambda_P)) {}

  double lambda_P() const { return lambda_P_; }
  double omega_P() const { return omega_P_; }

  friend bool operator==(const PlasmaMirror&, const PlasmaMirror&) = default;

 private:
  double lambda_P_;
  double omega_P_;
};

using MirrorModel = std::variant<PerfectMirror, PlasmaMirror>;

inline bool is_perfect(const MirrorModel& m) {
  return std::holds_alternative<PerfectMirror>(m);
}

/// Plasma wavelength of the preset metals. Closed table: Al, Cu, Au.
inline std::optional<double> preset_plasma_wavelength(std::string_view name) {
  if (name == "Al") return 107e-9;
  if (name == "Cu" || name == "Au") return 136e-9;
  return std::nullopt;
}

inline PlasmaMirror make_material(double lambda_P) {
  if (!(lambda_P > 0.0)) throw InputError("plasma wavelength must be positive");
  return PlasmaMirror(lambda_P);
}

inline PlasmaMirror make_material(std::string_view name) {
  if (auto lp = preset_plasma_wavelength(name)) return PlasmaMirror(*lp);
  throw InputError("unknown material '" + std::string(name) + "' (expected Al, Cu or Au)");
}

struct ZeroTemperature {
  friend bool operator==(const ZeroTemperature&, const ZeroTemperature&) = default;
};

class FiniteTemperature {
 public:
  explicit FiniteTemperature(double T) : T_(T), lambda_T_(thermal_wavelength(T)) {}

  double T() const { return T_; }
  double lambda_T() const { return lambda_T_; }

  friend bool operator==(const FiniteTemperature&, const FiniteTemperature&) = default;

 private:
  double T_;
  double lambda_T_;
};

using ThermalState = std::variant<ZeroTemperature, FiniteTemperature>;

/// T = 0 maps to the ZeroTemperature variant; negative T is rejected.
inline ThermalState make_thermal_state(double T) {
  if (T == 0.0) return ZeroTemperature{};
  if (!(T > 0.0)) throw InputError("temperature must be non-negative");
  return FiniteTemperature(T);
}

/// Plane-parallel cavity of separation L and optional plate area A.
class CavityConfig {
 public:
  static constexpr double plasma_model_reliable_min_L = 1e-6;

  explicit CavityConfig(double L, std::optional<double> area = std::nullopt)
      : L_(L), area_(area) {
    if (!(L > 0.0) || !std::isfinite(L)) throw InputError("separation L must be positive");
    if (area && !(*area > 0.0)) throw InputError("area must be positive");
  }

  double L() const { return L_; }
  const std::optional<double>& area() const { return area_; }

  // Below ~1 um the plasma model is a poor description of real metals.
  bool plasma_model_reliable() const { return L_ >= plasma_model_reliable_min_L; }

 private:
  double L_;
  std::optional<double> area_;
};

}  // namespace casimir
