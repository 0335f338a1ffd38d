#pragma once

// Physics-agnostic numerical primitives:
//   - globally adaptive Gauss-Kronrod (G7/K15) integration on finite intervals,
//   - semi-infinite integration through the map u = lower - ln(1 - t),
//   - series summation with an optional half-weighted first term.
//
// Everything is deterministic: panels are always bisected at the midpoint and the
// refinement order depends only on the integrand values.

#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include "casimir/errors.hpp"

namespace casimir {

struct Tolerance {
  double rel_tol = 1e-10;
  double abs_tol = 1e-30;
  std::size_t max_evals = 1'000'000;

  void validate() const {
    if (!(rel_tol > 0.0)) throw InputError("rel_tol must be positive");
    if (!(abs_tol >= 0.0)) throw InputError("abs_tol must be non-negative");
    if (max_evals == 0) throw InputError("max_evals must be positive");
  }

  double target(double value) const {
    const double rel = rel_tol * std::fabs(value);
    return rel > abs_tol ? rel : abs_tol;
  }

  friend bool operator==(const Tolerance&, const Tolerance&) = default;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

// Kronrod abscissae on [-1, 1] (positive half, descending) and weights.
inline constexpr double kronrod_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kronrod_w[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (x[1], x[3], x[5], x[7]).
inline constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;

  bool operator<(const Panel& other) const { return error < other.error; }
};

inline void check_finite(double y) {
  if (!std::isfinite(y)) throw ConvergenceError("integrand returned a non-finite value");
}

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = f(center);
  check_finite(fc);
  double kronrod = kronrod_w[7] * fc;
  double gauss = gauss_w[3] * fc;

  for (int i = 0; i < 7; ++i) {
    const double dx = half * kronrod_x[i];
    const double y1 = f(center - dx);
    const double y2 = f(center + dx);
    check_finite(y1);
    check_finite(y2);
    const double pair = y1 + y2;
    kronrod += kronrod_w[i] * pair;
    if (i % 2 == 1) gauss += gauss_w[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::fabs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive integration of f over [a, b]. The panel with the largest
/// embedded error estimate is bisected until the summed estimate meets tol.
/// Budget exhaustion is reported through `converged == false`.
template <class F>
QuadratureResult integrate_interval(F&& f, double a, double b, const Tolerance& tol) {
  tol.validate();
  if (!(a <= b)) throw InputError("integration interval must satisfy a <= b");
  if (a == b) return {0.0, 0.0, 1, true};

  constexpr std::size_t evals_per_panel = 15;
  std::priority_queue<detail::Panel> panels;
  panels.push(detail::gauss_kronrod_15(f, a, b));
  std::size_t evaluations = evals_per_panel;
  double total = panels.top().value;
  double total_error = panels.top().error;
  bool converged = false;

  while (true) {
    if (total_error <= tol.target(total)) {
      converged = true;
      break;
    }
    if (evaluations + 2 * evals_per_panel > tol.max_evals) break;

    const detail::Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // cannot refine below rounding
    panels.pop();

    const detail::Panel left = detail::gauss_kronrod_15(f, worst.a, mid);
    const detail::Panel right = detail::gauss_kronrod_15(f, mid, worst.b);
    evaluations += 2 * evals_per_panel;
    total += (left.value + right.value) - worst.value;
    total_error += (left.error + right.error) - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-accumulate to drop the drift of the running updates.
  double value = 0.0;
  double error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  return {value, error, evaluations, converged};
}

/// Integral of f over [lower, inf). The tail is mapped onto t in [0, 1) with
/// u = lower - ln(1 - t), du = dt/(1 - t); f should decay at least like e^{-u}.
template <class F>
QuadratureResult integrate_semi_infinite(F&& f, double lower, const Tolerance& tol) {
  if (!std::isfinite(lower)) throw InputError("lower integration limit must be finite");
  auto mapped = [&f, lower](double t) {
    const double one_minus_t = 1.0 - t;
    if (one_minus_t <= 0.0) return 0.0;  // node rounded onto t = 1
    const double u = lower - std::log1p(-t);
    return f(u) / one_minus_t;
  };
  return integrate_interval(mapped, 0.0, 1.0, tol);
}

/// Sum of w_n * term(n) for n = 0, 1, ... with w_0 = 1/2 when half_first is set.
///
/// Stops once |term(n)| falls below tol.target(partial sum) for two consecutive
/// indices. `term` may return a double or a QuadratureResult, in which case the
/// per-term error estimates are accumulated and any unconverged term makes the
/// whole sum unconverged. tol.max_evals caps the number of terms.
template <class Term>
QuadratureResult sum_series(Term&& term, bool half_first, const Tolerance& tol) {
  tol.validate();
  using R = std::invoke_result_t<Term&, std::size_t>;
  constexpr bool term_has_error = std::is_same_v<std::decay_t<R>, QuadratureResult>;

  double sum = 0.0;
  double error = 0.0;
  bool terms_converged = true;
  double previous = 0.0;
  double last = 0.0;
  int small_in_a_row = 0;
  std::size_t n = 0;

  for (; n < tol.max_evals; ++n) {
    const double weight = (half_first && n == 0) ? 0.5 : 1.0;
    double value;
    if constexpr (term_has_error) {
      const QuadratureResult r = term(n);
      value = r.value;
      error += weight * r.abs_error_estimate;
      terms_converged = terms_converged && r.converged;
    } else {
      value = static_cast<double>(term(n));
    }
    if (!std::isfinite(value)) {
      throw ConvergenceError("series term " + std::to_string(n) + " is not finite");
    }
    sum += weight * value;
    previous = last;
    last = weight * value;

    small_in_a_row = std::fabs(last) <= tol.target(sum) ? small_in_a_row + 1 : 0;
    if (small_in_a_row >= 2) {
      ++n;
      // Geometric tail estimate from the last ratio; fall back to the last term.
      const double ratio = previous != 0.0 ? std::fabs(last / previous) : 0.0;
      const double tail =
          ratio < 1.0 ? std::fabs(last) * ratio / (1.0 - ratio) : std::fabs(last);
      return {sum, error + tail, n, terms_converged};
    }
  }
  return {sum, error + std::fabs(last), n, false};
}

}  // namespace casimir
