#pragma once

// Batch evaluation over distance grids: run configuration (flat key = value
// files), material tokens, CSV rows and atomic output.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "casimir/corrections.hpp"
#include "casimir/domain.hpp"
#include "casimir/errors.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/parallel.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

enum class Spacing { log, linear };

struct SweepSpec {
  double L_min = 0.1e-6;
  double L_max = 10e-6;
  std::size_t points = 50;
  Spacing spacing = Spacing::log;
  double T = 300.0;
  std::vector<std::string> materials{"Al"};
  std::optional<double> area;
  Tolerance tolerances;

  void validate() const {
    if (!(L_min > 0.0)) throw InputError("L_min must be positive");
    if (!(L_min < L_max)) throw InputError("L_min must be smaller than L_max");
    if (!std::isfinite(L_max)) throw InputError("L_max must be finite");
    if (points < 2) throw InputError("points must be at least 2");
    if (!(T > 0.0) || !std::isfinite(T)) throw InputError("T must be positive");
    if (materials.empty()) throw InputError("materials must not be empty");
    if (area && !(*area > 0.0)) throw InputError("area must be positive");
    tolerances.validate();
  }

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

// ---------------------------------------------------------------------------
// Parsing helpers

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<std::size_t> parse_count(std::string_view s) {
  s = trim(s);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    // Accept integral values written in floating form, e.g. 1e6.
    const auto d = parse_double(s);
    if (d && *d >= 0.0 && *d == std::floor(*d) && *d < 1.8e19) {
      return static_cast<std::size_t>(*d);
    }
    return std::nullopt;
  }
  return v;
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string format_full(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace detail

/// Material token: `perfect`, a preset name (Al, Cu, Au) or a plasma wavelength
/// with optional unit suffix (nm, um, m; bare numbers are metres).
inline MirrorModel parse_material(std::string_view token) {
  const auto t = detail::trim(token);
  if (t == "perfect") return PerfectMirror{};
  if (auto lp = preset_plasma_wavelength(t)) return PlasmaMirror(*lp);

  double scale = 1.0;
  std::string_view number = t;
  if (t.ends_with("nm")) {
    scale = 1e-9;
    number = t.substr(0, t.size() - 2);
  } else if (t.ends_with("um")) {
    scale = 1e-6;
    number = t.substr(0, t.size() - 2);
  } else if (t.ends_with("m")) {
    number = t.substr(0, t.size() - 1);
  }
  const auto v = detail::parse_double(number);
  if (!v) throw InputError("unknown material '" + std::string(t) + "'");
  if (!(*v > 0.0)) throw InputError("material wavelength must be positive: '" + std::string(t) + "'");
  return make_material(*v * scale);
}

// ---------------------------------------------------------------------------
// Configuration files

namespace detail {

inline void apply_config_value(SweepSpec& spec, std::string_view key, std::string_view value,
                               std::size_t line) {
  auto fail = [&](const std::string& what) {
    throw InputError("config line " + std::to_string(line) + ": " + what);
  };
  auto number = [&]() {
    const auto v = parse_double(value);
    if (!v) fail("invalid number for '" + std::string(key) + "'");
    return *v;
  };
  auto count = [&]() {
    const auto v = parse_count(value);
    if (!v) fail("invalid count for '" + std::string(key) + "'");
    return *v;
  };

  if (key == "L_min") {
    spec.L_min = number();
  } else if (key == "L_max") {
    spec.L_max = number();
  } else if (key == "points") {
    spec.points = count();
  } else if (key == "spacing") {
    if (value == "log") {
      spec.spacing = Spacing::log;
    } else if (value == "linear") {
      spec.spacing = Spacing::linear;
    } else {
      fail("spacing must be 'log' or 'linear'");
    }
  } else if (key == "T") {
    spec.T = number();
  } else if (key == "materials") {
    spec.materials = split_list(value);
  } else if (key == "area") {
    if (value.empty()) {
      spec.area.reset();
    } else {
      spec.area = number();
    }
  } else if (key == "rel_tol") {
    spec.tolerances.rel_tol = number();
  } else if (key == "abs_tol") {
    spec.tolerances.abs_tol = number();
  } else if (key == "max_evals") {
    spec.tolerances.max_evals = count();
  } else {
    fail("unknown key '" + std::string(key) + "'");
  }
}

}  // namespace detail

/// Applies `key = value` lines on top of `base`. `#` starts a comment.
inline SweepSpec parse_config(std::string_view text, SweepSpec base = {}) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw InputError("config line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      const auto key = detail::trim(line.substr(0, eq));
      if (key.empty()) {
        throw InputError("config line " + std::to_string(line_no) + ": missing key");
      }
      detail::apply_config_value(base, key, detail::trim(line.substr(eq + 1)), line_no);
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return base;
}

inline SweepSpec load_config(const std::filesystem::path& path, SweepSpec base = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

/// Inverse of parse_config: every field, shortest round-trip number format.
inline std::string serialize_config(const SweepSpec& spec) {
  std::string out;
  auto line = [&out](std::string_view key, const std::string& value) {
    out.append(key).append(" = ").append(value).push_back('\n');
  };
  line("L_min", detail::format_full(spec.L_min));
  line("L_max", detail::format_full(spec.L_max));
  line("points", std::to_string(spec.points));
  line("spacing", spec.spacing == Spacing::log ? "log" : "linear");
  line("T", detail::format_full(spec.T));
  std::string materials;
  for (std::size_t i = 0; i < spec.materials.size(); ++i) {
    if (i) materials += ',';
    materials += spec.materials[i];
  }
  line("materials", materials);
  line("area", spec.area ? detail::format_full(*spec.area) : std::string{});
  line("rel_tol", detail::format_full(spec.tolerances.rel_tol));
  line("abs_tol", detail::format_full(spec.tolerances.abs_tol));
  line("max_evals", std::to_string(spec.tolerances.max_evals));
  return out;
}

// ---------------------------------------------------------------------------
// Grids and CSV

inline std::vector<double> distance_grid(const SweepSpec& spec) {
  std::vector<double> grid(spec.points);
  const double last = static_cast<double>(spec.points - 1);
  for (std::size_t i = 0; i < spec.points; ++i) {
    const double f = static_cast<double>(i) / last;
    grid[i] = spec.spacing == Spacing::log
                  ? spec.L_min * std::exp(f * std::log(spec.L_max / spec.L_min))
                  : spec.L_min + f * (spec.L_max - spec.L_min);
  }
  grid.front() = spec.L_min;
  grid.back() = spec.L_max;
  return grid;
}

struct CsvRow {
  double L_m = 0.0;
  double L_over_lambda_T = 0.0;
  std::string material;
  std::optional<double> lambda_P_m;
  double T_K = 0.0;
  double pressure_Pa = 0.0;
  std::optional<double> force_N;
  double eta_P = 1.0;
  double eta_T = 1.0;
  double eta_F = 1.0;
  double delta_F = 0.0;
  std::optional<double> big_delta_F;
  double err_estimate = 0.0;
};

inline constexpr std::string_view csv_header =
    "L_m,L_over_lambda_T,material,lambda_P_m,T_K,pressure_Pa,force_N,eta_P,eta_T,eta_F,"
    "delta_F,big_delta_F,err_estimate";

/// 12 significant digits, '.' decimal separator independent of the locale.
inline std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, r.ptr);
}

inline std::string format_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string{};
}

/// RFC 4180 quoting for text fields.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::string format_row(const CsvRow& r) {
  std::string out;
  auto add = [&out](const std::string& field) {
    if (!out.empty()) out += ',';
    out += field;
  };
  add(format_number(r.L_m));
  add(format_number(r.L_over_lambda_T));
  add(csv_field(r.material));
  add(format_number(r.lambda_P_m));
  add(format_number(r.T_K));
  add(format_number(r.pressure_Pa));
  add(format_number(r.force_N));
  add(format_number(r.eta_P));
  add(format_number(r.eta_T));
  add(format_number(r.eta_F));
  add(format_number(r.delta_F));
  add(format_number(r.big_delta_F));
  add(format_number(r.err_estimate));
  return out;
}

inline std::string format_csv(const std::vector<CsvRow>& rows) {
  std::string out(csv_header);
  out += '\n';
  for (const auto& r : rows) {
    out += format_row(r);
    out += '\n';
  }
  return out;
}

/// One row of factors for a material at (L, T). eta_T is passed in so sweeps can
/// share it across materials.
inline CsvRow evaluate_row(double L, const FiniteTemperature& T, const std::string& label,
                           const MirrorModel& model, const Factor& thermal,
                           const std::optional<double>& area, const Tolerance& tol) {
  const double ideal = pressure_ideal(L);
  CsvRow row;
  row.L_m = L;
  row.L_over_lambda_T = L / T.lambda_T();
  row.material = label;
  row.T_K = T.T();
  row.eta_T = thermal.value;

  if (const auto* plasma = std::get_if<PlasmaMirror>(&model)) {
    const Tolerance t = detail::tightened(tol);
    const Factor p = eta_P_factor(L, *plasma, t);
    const Factor f = detail::as_factor(pressure_finite_T(L, T, *plasma, t), ideal);
    const CorrectionFactors c = combine_factors(p, thermal, f, T.lambda_T(), plasma->lambda_P());
    row.lambda_P_m = plasma->lambda_P();
    row.eta_P = c.eta_P;
    row.eta_F = c.eta_F;
    row.delta_F = c.delta_F;
    row.big_delta_F = c.big_delta_F;
    row.err_estimate = c.abs_error_estimate;
  } else {
    // Perfect mirrors: the thermal factor is the whole correction.
    row.eta_P = 1.0;
    row.eta_F = thermal.value;
    row.delta_F = 0.0;
    row.err_estimate = thermal.abs_error_estimate;
  }
  row.pressure_Pa = row.eta_F * ideal;
  if (area) row.force_N = row.pressure_Pa * *area;
  return row;
}

/// Rows ordered material-major, then by grid index, independent of scheduling.
inline std::vector<CsvRow> run_factor_sweep(const SweepSpec& spec, unsigned workers = 0) {
  spec.validate();
  const FiniteTemperature T(spec.T);
  std::vector<MirrorModel> models;
  for (const auto& m : spec.materials) models.push_back(parse_material(m));

  const std::vector<double> grid = distance_grid(spec);
  const Tolerance t = detail::tightened(spec.tolerances);
  const auto thermal = parallel_map(
      grid.size(), [&](std::size_t k) { return eta_T_factor(grid[k], T, t); }, workers);

  return parallel_map(
      models.size() * grid.size(),
      [&](std::size_t idx) {
        const std::size_t m = idx / grid.size();
        const std::size_t k = idx % grid.size();
        return evaluate_row(grid[k], T, spec.materials[m], models[m], thermal[k], spec.area,
                            spec.tolerances);
      },
      workers);
}

/// Writes to `path` through a sibling temporary file and a rename, so readers
/// never observe a partially written file.
inline void write_file_atomically(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open output file '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw InputError("failed writing output file '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot move output into place at '" + path.string() + "'");
  }
}

}  // namespace casimir
