#pragma once

// Casimir pressure between two identical plane mirrors on the imaginary frequency
// axis.
//
// Reduced variables: u = 2 kappa L and nu = 2 xi L / c, so the round-trip factor
// e^{-2 kappa L} becomes e^{-u} and the n-th Matsubara frequency maps to
// nu_n = 4 pi n L / lambda_T. The plasma frequency enters only through
// K = 2 L omega_P / c = 4 pi L / lambda_P.
//
//   P(T > 0) = k_B T / (8 pi L^3)     * sum'_n  int_{nu_n}^inf  g(u, nu_n) du
//   P(T = 0) = hbar c / (32 pi^2 L^4) * int_0^inf dnu int_nu^inf g(u, nu) du
//
// with g(u, nu) = u^2 sum_{TE,TM} r^2 e^{-u} / (1 - r^2 e^{-u}) and the primed sum
// giving the n = 0 term weight 1/2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>

#include "casimir/constants.hpp"
#include "casimir/domain.hpp"
#include "casimir/errors.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

/// Imaginary frequency xi (rad/s) and transverse decay constant kappa (1/m).
class ImaginaryFrequencyPoint {
 public:
  ImaginaryFrequencyPoint(double xi, double kappa) : xi_(xi), kappa_(kappa) {
    if (!(xi >= 0.0) || !std::isfinite(xi)) throw InputError("xi must be non-negative");
    if (!std::isfinite(kappa) || !(kappa * PhysicalConstants::c >= xi)) {
      throw InputError("kappa must satisfy kappa >= xi/c");
    }
  }

  double xi() const { return xi_; }
  double kappa() const { return kappa_; }

 private:
  double xi_;
  double kappa_;
};

struct ReflectionPair {
  double r_te;
  double r_tm;
};

struct PressureResult {
  double pressure = 0.0;  // Pa, attraction counted positive
  double abs_error_estimate = 0.0;
  std::size_t matsubara_terms_used = 0;
};

/// eps(i xi) = 1 + (omega_P / xi)^2.
inline double permittivity_imag(double xi, const PlasmaMirror& model) {
  if (!(xi > 0.0)) throw InputError("permittivity_imag requires xi > 0");
  const double ratio = model.omega_P() / xi;
  return 1.0 + ratio * ratio;
}

namespace detail {

// Squared amplitudes together with 1 - r^2, both computed without cancellation.
struct SquaredReflection {
  double r2;
  double one_minus_r2;
};

struct PlasmaReflection {
  double r_te;
  double r_tm;
  SquaredReflection te;
  SquaredReflection tm;
};

// Fresnel amplitudes of a plasma mirror. The arguments may be in any common
// inverse-length scale: kappa, q = xi/c and k_p = omega_P/c (SI), or the reduced
// u, nu and K. With s = sqrt(kappa^2 + k_p^2):
//   r_te = (kappa - s)/(kappa + s) = -k_p^2 / (kappa + s)^2
//   r_tm = (eps kappa - s)/(eps kappa + s), eps = 1 + k_p^2/q^2,
// where eps kappa - s is rewritten as k_p^2 (kappa (kappa + s) - q^2) / (q^2 (kappa + s)).
// q = 0 gives r_tm = 1 exactly (eps -> inf).
inline PlasmaReflection plasma_reflection(double kappa, double q, double k_p) {
  const double kp2 = k_p * k_p;
  const double s = std::sqrt(kappa * kappa + kp2);
  const double sum = kappa + s;

  PlasmaReflection out{};
  out.r_te = -kp2 / (sum * sum);
  // 1 - |r_te| = 2 kappa / (kappa + s), 1 + |r_te| = 2 s / (kappa + s).
  out.te = {out.r_te * out.r_te, 4.0 * kappa * s / (sum * sum)};

  const double q2 = q * q;
  const double numer = kp2 * (kappa * sum - q2) / sum;  // (eps kappa - s) q^2
  const double gap = 2.0 * s * q2;                       // denominator - numerator
  const double denom = numer + gap;
  if (denom == 0.0) {
    // kappa = q = 0: the TM amplitude tends to 1 along q -> 0.
    out.r_tm = 1.0;
    out.tm = {1.0, 0.0};
  } else {
    out.r_tm = numer / denom;
    out.tm = {out.r_tm * out.r_tm, gap * (2.0 * numer + gap) / (denom * denom)};
  }
  return out;
}

// r^2 e^{-u} / (1 - r^2 e^{-u}) with the denominator written as
// (1 - e^{-u}) + (1 - r^2) e^{-u}.
inline double round_trip_term(const SquaredReflection& r, double u) {
  const double e = std::exp(-u);
  const double denom = -std::expm1(-u) + r.one_minus_r2 * e;
  return r.r2 * e / denom;
}

// g(u, nu) for a mirror characterised by K = 4 pi L / lambda_P, or a perfect
// mirror when perfect is set. Caller guarantees u >= nu >= 0.
struct ReducedIntegrand {
  double K = 0.0;
  bool perfect = false;

  double operator()(double u, double nu) const {
    if (u <= 0.0) return 0.0;
    if (perfect) return 2.0 * u * u / std::expm1(u);
    const PlasmaReflection r = plasma_reflection(u, nu, K);
    return u * u * (round_trip_term(r.te, u) + round_trip_term(r.tm, u));
  }
};

inline ReducedIntegrand reduced_integrand(double L, const MirrorModel& model) {
  if (const auto* plasma = std::get_if<PlasmaMirror>(&model)) {
    return {4.0 * pi * L / plasma->lambda_P(), false};
  }
  return {0.0, true};
}

inline void require_positive_length(double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw InputError("separation L must be positive");
}

inline void require_converged(const QuadratureResult& r, const char* what) {
  if (!r.converged) {
    throw ConvergenceError(std::string(what) + ": tolerance not reached within max_evals");
  }
}

}  // namespace detail

inline ReflectionPair reflection_amplitudes(const ImaginaryFrequencyPoint& point,
                                            const MirrorModel& model) {
  if (is_perfect(model)) return {-1.0, 1.0};
  const auto& plasma = std::get<PlasmaMirror>(model);
  const double k_p = plasma.omega_P() / PhysicalConstants::c;
  const auto r = detail::plasma_reflection(point.kappa(), point.xi() / PhysicalConstants::c, k_p);
  return {r.r_te, r.r_tm};
}

/// Dimensionless Matsubara integrand g(u, nu) at separation L.
inline double matsubara_integrand(double u, double nu, double L, const MirrorModel& model) {
  detail::require_positive_length(L);
  if (!(nu >= 0.0) || !(u >= nu)) throw InputError("matsubara_integrand requires u >= nu >= 0");
  return detail::reduced_integrand(L, model)(u, nu);
}

/// pi^2 hbar c / (240 L^4).
inline double pressure_ideal(double L) {
  detail::require_positive_length(L);
  const double L2 = L * L;
  return pi * pi * PhysicalConstants::hbar * PhysicalConstants::c / (240.0 * L2 * L2);
}

/// Matsubara sum at temperature T. The n-th term is the u-integral from nu_n.
inline PressureResult pressure_finite_T(double L, const FiniteTemperature& T,
                                        const MirrorModel& model, const Tolerance& tol = {}) {
  detail::require_positive_length(L);
  tol.validate();
  const detail::ReducedIntegrand g = detail::reduced_integrand(L, model);
  const double nu_step = 4.0 * pi * L / T.lambda_T();

  auto term = [&](std::size_t n) {
    const double nu = nu_step * static_cast<double>(n);
    return integrate_semi_infinite([&g, nu](double u) { return g(u, nu); }, nu, tol);
  };
  const QuadratureResult sum = sum_series(term, true, tol);
  detail::require_converged(sum, "Matsubara sum");

  const double prefactor = PhysicalConstants::k_B * T.T() / (8.0 * pi * L * L * L);
  return {prefactor * sum.value, prefactor * sum.abs_error_estimate, sum.evaluations};
}

/// Zero-temperature pressure: iterated integral, inner over u at fixed nu.
inline PressureResult pressure_zero_T(double L, const MirrorModel& model,
                                      const Tolerance& tol = {}) {
  detail::require_positive_length(L);
  tol.validate();
  const detail::ReducedIntegrand g = detail::reduced_integrand(L, model);

  double worst_inner_rel = 0.0;
  bool inner_ok = true;
  auto inner = [&](double nu) {
    const QuadratureResult r =
        integrate_semi_infinite([&g, nu](double u) { return g(u, nu); }, nu, tol);
    inner_ok = inner_ok && r.converged;
    if (r.value != 0.0) {
      worst_inner_rel = std::max(worst_inner_rel, r.abs_error_estimate / std::fabs(r.value));
    }
    return r.value;
  };
  const QuadratureResult outer = integrate_semi_infinite(inner, 0.0, tol);
  detail::require_converged(outer, "zero-temperature frequency integral");
  if (!inner_ok) {
    throw ConvergenceError("zero-temperature wavevector integral: tolerance not reached");
  }

  const double L2 = L * L;
  const double prefactor =
      PhysicalConstants::hbar * PhysicalConstants::c / (32.0 * pi * pi * L2 * L2);
  const double error = outer.abs_error_estimate + worst_inner_rel * std::fabs(outer.value);
  return {prefactor * outer.value, prefactor * error, 0};
}

/// Dispatches on the thermal state.
inline PressureResult pressure(double L, const ThermalState& T, const MirrorModel& model,
                               const Tolerance& tol = {}) {
  if (const auto* finite = std::get_if<FiniteTemperature>(&T)) {
    return pressure_finite_T(L, *finite, model, tol);
  }
  return pressure_zero_T(L, model, tol);
}

}  // namespace casimir
