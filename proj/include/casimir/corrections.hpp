#pragma once

// Correction factors relative to the ideal Casimir pressure:
//   eta_P  conductivity correction (plasma mirrors, T = 0)
//   eta_T  thermal correction (perfect mirrors, T > 0)
//   eta_F  both effects together
// and the correlation factor delta_F defined by eta_F = eta_P eta_T (1 + delta_F),
// with its scaled form big_delta_F = delta_F lambda_T / lambda_P.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "casimir/domain.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/parallel.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

/// An eta value with its absolute error estimate.
struct Factor {
  double value = 0.0;
  double abs_error_estimate = 0.0;
};

struct CorrectionFactors {
  double eta_P = 1.0;
  double eta_T = 1.0;
  double eta_F = 1.0;
  double delta_F = 0.0;
  double big_delta_F = 0.0;
  double abs_error_estimate = 0.0;  // on delta_F
};

struct CollapseReport {
  std::vector<double> L_over_lambda_T;
  std::vector<std::vector<double>> delta_F;      // [material][grid point]
  std::vector<std::vector<double>> big_delta_F;  // [material][grid point]
  double max_pairwise_relative_spread = 0.0;
  std::vector<std::string> warnings;
};

/// Correction factors must carry at least this absolute accuracy on delta_F.
inline constexpr double delta_F_error_budget = 1e-6;
/// Pressures entering delta_F are evaluated at least this tightly.
inline constexpr double factor_rel_tol = 1e-8;
/// Scaling-law guard on lambda_P / lambda_T: hard limit and warning level.
inline constexpr double scaling_ratio_limit = 0.2;
inline constexpr double scaling_ratio_warn = 0.1;

namespace detail {

inline Factor as_factor(const PressureResult& p, double ideal) {
  return {p.pressure / ideal, p.abs_error_estimate / ideal};
}

inline Tolerance tightened(Tolerance tol) {
  tol.rel_tol = std::min(tol.rel_tol, factor_rel_tol);
  return tol;
}

}  // namespace detail

inline Factor eta_P_factor(double L, const MirrorModel& model, const Tolerance& tol = {}) {
  return detail::as_factor(pressure_zero_T(L, model, tol), pressure_ideal(L));
}

inline Factor eta_T_factor(double L, const FiniteTemperature& T, const Tolerance& tol = {}) {
  return detail::as_factor(pressure_finite_T(L, T, PerfectMirror{}, tol), pressure_ideal(L));
}

inline double eta_P(double L, const MirrorModel& model, const Tolerance& tol = {}) {
  return eta_P_factor(L, model, tol).value;
}

inline double eta_T(double L, const FiniteTemperature& T, const Tolerance& tol = {}) {
  return eta_T_factor(L, T, tol).value;
}

/// Assembles the factors from independently evaluated eta values. Throws
/// ConvergenceError when the propagated error on delta_F exceeds the budget.
inline CorrectionFactors combine_factors(const Factor& eta_p, const Factor& eta_t,
                                         const Factor& eta_f, double lambda_T,
                                         double lambda_P) {
  CorrectionFactors out;
  out.eta_P = eta_p.value;
  out.eta_T = eta_t.value;
  out.eta_F = eta_f.value;
  const double ratio = eta_f.value / (eta_p.value * eta_t.value);
  out.delta_F = ratio - 1.0;
  out.big_delta_F = out.delta_F * lambda_T / lambda_P;
  out.abs_error_estimate = std::fabs(ratio) * (eta_f.abs_error_estimate / eta_f.value +
                                               eta_p.abs_error_estimate / eta_p.value +
                                               eta_t.abs_error_estimate / eta_t.value);
  if (!(out.abs_error_estimate <= delta_F_error_budget)) {
    throw ConvergenceError("precision budget exceeded: delta_F error estimate " +
                           std::to_string(out.abs_error_estimate));
  }
  return out;
}

/// eta_P, eta_T, eta_F and the correlation factors for a plasma mirror at T > 0.
inline CorrectionFactors correction_factors(double L, const FiniteTemperature& T,
                                            const PlasmaMirror& model,
                                            const Tolerance& tol = {}) {
  const Tolerance t = detail::tightened(tol);
  const double ideal = pressure_ideal(L);
  const Factor p = eta_P_factor(L, model, t);
  const Factor th = eta_T_factor(L, T, t);
  const Factor f = detail::as_factor(pressure_finite_T(L, T, model, t), ideal);
  return combine_factors(p, th, f, T.lambda_T(), model.lambda_P());
}

/// Checks the scaling-law validity guard and returns warnings for ratios above
/// the soft limit.
inline std::vector<std::string> check_scaling_validity(const std::vector<PlasmaMirror>& materials,
                                                       const FiniteTemperature& T) {
  std::vector<std::string> warnings;
  for (const auto& m : materials) {
    const double ratio = m.lambda_P() / T.lambda_T();
    if (!(ratio < scaling_ratio_limit)) {
      throw InputError("scaling law requires lambda_P/lambda_T < 0.2 (got " +
                       std::to_string(ratio) + ")");
    }
    if (ratio > scaling_ratio_warn) {
      warnings.push_back("lambda_P/lambda_T = " + std::to_string(ratio) +
                         " above 0.1; first-order scaling residuals may be large");
    }
  }
  return warnings;
}

/// Max over the grid of max_{i,j} |D_i - D_j| / mean_k D_k.
inline double collapse_spread(const std::vector<std::vector<double>>& curves) {
  double spread = 0.0;
  if (curves.empty()) return spread;
  const std::size_t points = curves.front().size();
  for (std::size_t k = 0; k < points; ++k) {
    double lo = curves.front()[k];
    double hi = lo;
    double mean = 0.0;
    for (const auto& c : curves) {
      lo = std::min(lo, c[k]);
      hi = std::max(hi, c[k]);
      mean += c[k];
    }
    mean /= static_cast<double>(curves.size());
    if (hi == lo) continue;
    spread = std::max(spread, (hi - lo) / std::fabs(mean));
  }
  return spread;
}

/// Scaled correlation curves for several plasma wavelengths on a common grid.
/// Grid points are evaluated concurrently; eta_T is shared across materials.
inline CollapseReport scaling_collapse(const std::vector<PlasmaMirror>& materials,
                                       const std::vector<double>& L_grid,
                                       const FiniteTemperature& T, const Tolerance& tol = {},
                                       unsigned workers = 0) {
  if (materials.size() < 2) throw InputError("scaling_collapse needs at least two materials");
  if (L_grid.empty()) throw InputError("scaling_collapse needs a non-empty L grid");
  CollapseReport report;
  report.warnings = check_scaling_validity(materials, T);

  const Tolerance t = detail::tightened(tol);
  const std::size_t n_mat = materials.size();
  const std::size_t n_L = L_grid.size();

  const auto thermal = parallel_map(
      n_L, [&](std::size_t k) { return eta_T_factor(L_grid[k], T, t); }, workers);
  const auto factors = parallel_map(
      n_mat * n_L,
      [&](std::size_t idx) {
        const std::size_t m = idx / n_L;
        const std::size_t k = idx % n_L;
        const double L = L_grid[k];
        const double ideal = pressure_ideal(L);
        const Factor p = eta_P_factor(L, materials[m], t);
        const Factor f = detail::as_factor(pressure_finite_T(L, T, materials[m], t), ideal);
        return combine_factors(p, thermal[k], f, T.lambda_T(), materials[m].lambda_P());
      },
      workers);

  for (double L : L_grid) report.L_over_lambda_T.push_back(L / T.lambda_T());
  report.delta_F.assign(n_mat, std::vector<double>(n_L));
  report.big_delta_F.assign(n_mat, std::vector<double>(n_L));
  for (std::size_t m = 0; m < n_mat; ++m) {
    for (std::size_t k = 0; k < n_L; ++k) {
      report.delta_F[m][k] = factors[m * n_L + k].delta_F;
      report.big_delta_F[m][k] = factors[m * n_L + k].big_delta_F;
    }
  }
  report.max_pairwise_relative_spread = collapse_spread(report.big_delta_F);
  return report;
}

}  // namespace casimir
