#pragma once

// Command-line front end: `force`, `sweep` and `scaling-check`.
//
// Exit codes: 0 success, 2 input error, 3 convergence failure,
// 4 scaling spread above threshold.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "casimir/corrections.hpp"
#include "casimir/domain.hpp"
#include "casimir/errors.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/sweep.hpp"

namespace casimir::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_input = 2,
  exit_convergence = 3,
  exit_threshold = 4,
};

inline constexpr double default_scaling_threshold = 0.02;

/// Defaults for `scaling-check`: two preset metals and two long plasma wavelengths
/// on 1-10 um.
inline SweepSpec scaling_check_defaults() {
  SweepSpec spec;
  spec.L_min = 1e-6;
  spec.L_max = 10e-6;
  spec.points = 10;
  spec.materials = {"Al", "Cu", "300nm", "500nm"};
  return spec;
}

namespace detail {

struct GlobalFlags {
  std::string config;
  std::string out;
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  std::size_t max_evals = 0;
  double threshold = default_scaling_threshold;
  CLI::Option* rel_tol_opt = nullptr;
  CLI::Option* abs_tol_opt = nullptr;
  CLI::Option* max_evals_opt = nullptr;
};

struct GridFlags {
  double L_min = 0.0;
  double L_max = 0.0;
  std::size_t points = 0;
  std::string spacing;
  double T = 0.0;
  std::vector<std::string> materials;
  double area = 0.0;
  CLI::Option* L_min_opt = nullptr;
  CLI::Option* L_max_opt = nullptr;
  CLI::Option* points_opt = nullptr;
  CLI::Option* spacing_opt = nullptr;
  CLI::Option* T_opt = nullptr;
  CLI::Option* materials_opt = nullptr;
  CLI::Option* area_opt = nullptr;

  void attach(CLI::App& cmd) {
    L_min_opt = cmd.add_option("--L-min,--L_min", L_min, "smallest separation (m)");
    L_max_opt = cmd.add_option("--L-max,--L_max", L_max, "largest separation (m)");
    points_opt = cmd.add_option("--points", points, "number of grid points");
    spacing_opt = cmd.add_option("--spacing", spacing, "grid spacing: log or linear")
                      ->check(CLI::IsMember({"log", "linear"}));
    T_opt = cmd.add_option("--T", T, "temperature (K)");
    materials_opt = cmd.add_option("--materials", materials,
                                   "comma-separated materials: Al, Cu, Au, perfect or "
                                   "wavelengths such as 300nm")
                        ->delimiter(',');
    area_opt = cmd.add_option("--area", area, "plate area (m^2)");
  }

  void apply(SweepSpec& spec) const {
    if (L_min_opt->count()) spec.L_min = L_min;
    if (L_max_opt->count()) spec.L_max = L_max;
    if (points_opt->count()) spec.points = points;
    if (spacing_opt->count()) spec.spacing = spacing == "log" ? Spacing::log : Spacing::linear;
    if (T_opt->count()) spec.T = T;
    if (materials_opt->count()) spec.materials = materials;
    if (area_opt->count()) spec.area = area;
  }
};

inline SweepSpec resolve_spec(SweepSpec spec, const GlobalFlags& g) {
  if (!g.config.empty()) spec = load_config(g.config, std::move(spec));
  if (g.rel_tol_opt->count()) spec.tolerances.rel_tol = g.rel_tol;
  if (g.abs_tol_opt->count()) spec.tolerances.abs_tol = g.abs_tol;
  if (g.max_evals_opt->count()) spec.tolerances.max_evals = g.max_evals;
  return spec;
}

inline void emit(const std::string& content, const GlobalFlags& g, std::ostream& out) {
  if (g.out.empty()) {
    out << content;
  } else {
    write_file_atomically(g.out, content);
  }
}

inline void print_report(const CsvRow& row, bool reliable, std::ostream& out) {
  auto kv = [&out](const char* key, const std::string& value) {
    if (!value.empty()) out << key << " = " << value << '\n';
  };
  kv("L_m", format_number(row.L_m));
  kv("T_K", format_number(row.T_K));
  kv("L_over_lambda_T", row.T_K > 0.0 ? format_number(row.L_over_lambda_T) : std::string{});
  kv("material", row.material);
  kv("lambda_P_m", format_number(row.lambda_P_m));
  kv("pressure_Pa", format_number(row.pressure_Pa));
  kv("force_N", format_number(row.force_N));
  kv("eta_P", format_number(row.eta_P));
  kv("eta_T", format_number(row.eta_T));
  kv("eta_F", format_number(row.eta_F));
  kv("delta_F", format_number(row.delta_F));
  kv("big_delta_F", format_number(row.big_delta_F));
  kv("err_estimate", format_number(row.err_estimate));
  kv("plasma_model_reliable", reliable ? "true" : "false");
}

inline int run_force(double L, const std::optional<double>& T_flag,
                     const std::optional<std::string>& material_flag,
                     const std::optional<double>& area_flag, const GlobalFlags& g,
                     std::ostream& out) {
  const SweepSpec spec = resolve_spec(SweepSpec{}, g);
  const double T_value = T_flag.value_or(spec.T);
  const std::string label = material_flag.value_or(spec.materials.front());
  const std::optional<double> area = area_flag ? area_flag : spec.area;

  const CavityConfig cavity(L, area);
  const MirrorModel model = parse_material(label);
  const ThermalState state = make_thermal_state(T_value);
  spec.tolerances.validate();

  CsvRow row;
  if (const auto* T = std::get_if<FiniteTemperature>(&state)) {
    const Factor thermal = eta_T_factor(L, *T, casimir::detail::tightened(spec.tolerances));
    row = evaluate_row(L, *T, label, model, thermal, area, spec.tolerances);
  } else {
    const PressureResult p = pressure_zero_T(L, model, spec.tolerances);
    const double ideal = pressure_ideal(L);
    row.L_m = L;
    row.material = label;
    if (const auto* plasma = std::get_if<PlasmaMirror>(&model)) row.lambda_P_m = plasma->lambda_P();
    row.pressure_Pa = p.pressure;
    if (area) row.force_N = p.pressure * *area;
    row.eta_P = p.pressure / ideal;
    row.eta_F = row.eta_P;
    row.err_estimate = p.abs_error_estimate / ideal;
  }

  print_report(row, cavity.plasma_model_reliable(), out);
  if (!g.out.empty()) write_file_atomically(g.out, format_csv({row}));
  return exit_ok;
}

inline int run_sweep(const GridFlags& flags, const GlobalFlags& g, std::ostream& out) {
  SweepSpec spec = resolve_spec(SweepSpec{}, g);
  flags.apply(spec);
  const auto rows = run_factor_sweep(spec);
  emit(format_csv(rows), g, out);
  return exit_ok;
}

inline int run_scaling_check(const GridFlags& flags, const GlobalFlags& g, std::ostream& out,
                             std::ostream& err) {
  SweepSpec spec = resolve_spec(scaling_check_defaults(), g);
  flags.apply(spec);
  spec.validate();
  if (spec.materials.size() < 2) throw InputError("scaling-check needs at least two materials");
  if (!(g.threshold >= 0.0)) throw InputError("threshold must be non-negative");

  std::vector<PlasmaMirror> mirrors;
  for (const auto& m : spec.materials) {
    const MirrorModel model = parse_material(m);
    const auto* plasma = std::get_if<PlasmaMirror>(&model);
    if (!plasma) throw InputError("scaling-check needs plasma materials, got '" + m + "'");
    mirrors.push_back(*plasma);
  }

  const FiniteTemperature T(spec.T);
  const std::vector<double> grid = distance_grid(spec);
  const CollapseReport report = scaling_collapse(mirrors, grid, T, spec.tolerances);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';

  std::string csv = "L_m,L_over_lambda_T";
  for (const auto& m : spec.materials) {
    csv += ',' + csv_field("delta_F_" + m);
    csv += ',' + csv_field("big_delta_F_" + m);
  }
  csv += '\n';
  for (std::size_t k = 0; k < grid.size(); ++k) {
    csv += format_number(grid[k]) + ',' + format_number(report.L_over_lambda_T[k]);
    for (std::size_t m = 0; m < mirrors.size(); ++m) {
      csv += ',' + format_number(report.delta_F[m][k]);
      csv += ',' + format_number(report.big_delta_F[m][k]);
    }
    csv += '\n';
  }
  emit(csv, g, out);

  out << "max_spread=" << format_number(report.max_pairwise_relative_spread) << '\n';
  return report.max_pairwise_relative_spread < g.threshold ? exit_ok : exit_threshold;
}

}  // namespace detail

/// Runs the CLI on `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Casimir force between plane plasma-model mirrors at finite temperature",
               "casimir"};
  app.require_subcommand(1);
  app.fallthrough();

  detail::GlobalFlags g;
  app.add_option("--config", g.config, "flat key = value run configuration");
  app.add_option("--out", g.out, "write output to this path (atomically) instead of stdout");
  g.rel_tol_opt = app.add_option("--rel-tol", g.rel_tol, "relative tolerance");
  g.abs_tol_opt = app.add_option("--abs-tol", g.abs_tol, "absolute tolerance");
  g.max_evals_opt = app.add_option("--max-evals", g.max_evals, "evaluation budget");
  app.add_option("--threshold", g.threshold, "scaling-check spread threshold")
      ->capture_default_str();

  auto* force = app.add_subcommand("force", "evaluate a single configuration");
  double L = 0.0;
  std::optional<double> T_flag;
  std::optional<std::string> material_flag;
  std::optional<double> area_flag;
  force->add_option("--L", L, "separation (m)")->required();
  force->add_option("--T", T_flag, "temperature (K); 0 selects the zero-temperature limit");
  force->add_option("--material", material_flag, "Al, Cu, Au, perfect or a wavelength");
  force->add_option("--area", area_flag, "plate area (m^2)");

  auto* sweep = app.add_subcommand("sweep", "correction factors over a distance grid (CSV)");
  detail::GridFlags sweep_flags;
  sweep_flags.attach(*sweep);

  auto* scaling = app.add_subcommand("scaling-check", "scaled correlation collapse (CSV)");
  detail::GridFlags scaling_flags;
  scaling_flags.attach(*scaling);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  }

  try {
    if (force->parsed()) return detail::run_force(L, T_flag, material_flag, area_flag, g, out);
    if (sweep->parsed()) return detail::run_sweep(sweep_flags, g, out);
    return detail::run_scaling_check(scaling_flags, g, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return exit_convergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_internal;
  }
}

}  // namespace casimir::cli
