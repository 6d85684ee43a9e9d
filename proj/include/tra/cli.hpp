#pragma once

// Command-line front end: configuration (flags over an optional JSON file),
// solver dispatch and CSV / JSON emission for the spectrum, wavefunction,
// potential-curve, spd-scan and compare commands.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 fixture mismatch.

#include "tra/error.hpp"
#include "tra/fixtures.hpp"
#include "tra/potentials.hpp"
#include "tra/solver_hmd.hpp"
#include "tra/solver_lmm.hpp"
#include "tra/tra.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tra::cli {

inline constexpr std::string_view version = "1.0.0";

enum ExitCode : int { Success = 0, Usage = 1, Numerical = 2, FixtureMismatch = 3 };

enum class Command { Spectrum, Wavefunction, PotentialCurve, SpdScan, Compare };
enum class MethodChoice { Hmd, Lmm, Both };
enum class Format { Csv, Json };

/// Raised for anything the user got wrong: bad flag values, grids, ranges.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct SolverKnobs {
  int hmd_basis = 0;  // 0: model default
  double lambda = 0.0;
  int quad_points = 0;
  int lmm_mesh = 0;
  double h = 0.0;
};

struct RunConfig {
  Command command = Command::Spectrum;
  PotentialSpec potential{Model::I, 1.0, 1.0, 100.0, 2.0};
  MethodChoice method = MethodChoice::Hmd;
  SolverKnobs knobs;
  /// Curves: "x_min:x_max:points". spd-scan: "NBxNC".
  std::string grid;
  /// spd-scan: "lo:hi". potential-curve: comma list. Empty: from the couplings.
  std::string b_over_a;
  std::string c_over_a;
  std::string out;
  Format format = Format::Csv;
};

// ---- names ---------------------------------------------------------------

inline std::string_view to_string(Command c) {
  switch (c) {
  case Command::Spectrum:
    return "spectrum";
  case Command::Wavefunction:
    return "wavefunction";
  case Command::PotentialCurve:
    return "potential-curve";
  case Command::SpdScan:
    return "spd-scan";
  case Command::Compare:
    return "compare";
  }
  return "?";
}

inline std::string_view to_string(MethodChoice m) {
  switch (m) {
  case MethodChoice::Hmd:
    return "hmd";
  case MethodChoice::Lmm:
    return "lmm";
  case MethodChoice::Both:
    return "both";
  }
  return "?";
}

inline std::string_view to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

inline Command parse_command(std::string_view s) {
  for (auto c : {Command::Spectrum, Command::Wavefunction, Command::PotentialCurve,
                 Command::SpdScan, Command::Compare})
    if (to_string(c) == s)
      return c;
  throw UsageError("unknown command '" + std::string(s) + "'");
}

inline Model parse_model(std::string_view s) {
  if (s == "I")
    return Model::I;
  if (s == "II")
    return Model::II;
  throw UsageError("--model must be I or II");
}

inline MethodChoice parse_method(std::string_view s) {
  for (auto m : {MethodChoice::Hmd, MethodChoice::Lmm, MethodChoice::Both})
    if (to_string(m) == s)
      return m;
  throw UsageError("--method must be lmm, hmd or both");
}

inline Format parse_format(std::string_view s) {
  if (s == "csv")
    return Format::Csv;
  if (s == "json")
    return Format::Json;
  throw UsageError("--format must be csv or json");
}

// ---- small parsers -------------------------------------------------------

inline double parse_real(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v))
    throw UsageError(std::string(what) + ": '" + s + "' is not a real number");
  return v;
}

inline int parse_positive_int(const std::string& s, const char* what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || v < 1 || v > 100000000)
    throw UsageError(std::string(what) + ": '" + s + "' is not a positive integer");
  return static_cast<int>(v);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

inline Range parse_range(const std::string& s, const char* what) {
  const auto p = split(s, ':');
  if (p.size() != 2)
    throw UsageError(std::string(what) + ": expected lo:hi, got '" + s + "'");
  Range r{parse_real(p[0], what), parse_real(p[1], what)};
  if (!(r.hi > r.lo))
    throw UsageError(std::string(what) + ": need lo < hi");
  return r;
}

inline std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const auto& part : split(s, ','))
    out.push_back(parse_real(part, what));
  return out;
}

struct LineGrid {
  double x_min = 0.0;
  double x_max = 1.0;
  int points = 2;

  [[nodiscard]] std::vector<double> values() const {
    std::vector<double> x(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
      x[static_cast<std::size_t>(i)] = x_min + (x_max - x_min) * i / (points - 1);
    return x;
  }
};

inline LineGrid parse_line_grid(const std::string& s) {
  const auto p = split(s, ':');
  if (p.size() != 3)
    throw UsageError("--grid: expected x_min:x_max:points, got '" + s + "'");
  LineGrid g{parse_real(p[0], "--grid"), parse_real(p[1], "--grid"),
             parse_positive_int(p[2], "--grid")};
  if (g.points < 2)
    throw UsageError("--grid: need at least 2 points");
  if (g.x_min < 0.0)
    throw UsageError("--grid: x_min must be >= 0");
  if (!(g.x_max > g.x_min))
    throw UsageError("--grid: need x_min < x_max");
  return g;
}

struct ScanGrid {
  int nb = 50;
  int nc = 50;
};

inline ScanGrid parse_scan_grid(const std::string& s) {
  const auto p = split(s, 'x');
  if (p.size() != 2)
    throw UsageError("--grid: expected NBxNC for spd-scan, got '" + s + "'");
  ScanGrid g{parse_positive_int(p[0], "--grid"), parse_positive_int(p[1], "--grid")};
  if (g.nb < 2 || g.nc < 2)
    throw UsageError("--grid: spd-scan needs at least 2 points per axis");
  return g;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// ---- defaults ------------------------------------------------------------

/// Fills every unset knob and grid so the config is fully explicit.
inline RunConfig resolve(RunConfig c) {
  const auto& t = table_for(c.potential.model);
  auto& k = c.knobs;
  if (k.hmd_basis == 0)
    k.hmd_basis = t.hmd_basis;
  if (k.lambda == 0.0)
    k.lambda = t.hmd_lambda;
  if (k.quad_points == 0)
    k.quad_points = 4 * k.hmd_basis;
  if (k.lmm_mesh == 0)
    k.lmm_mesh = t.lmm_mesh;
  if (k.h == 0.0)
    k.h = t.lmm_h;
  const double a = c.potential.a;
  if (c.grid.empty()) {
    switch (c.command) {
    case Command::Wavefunction:
      c.grid = "0:" + fmt(20.0 * a) + ":1000";
      break;
    case Command::PotentialCurve:
    case Command::Compare:
      c.grid = fmt(0.05 * a) + ":" + fmt(10.0 * a) + ":500";
      break;
    case Command::SpdScan:
      c.grid = "50x50";
      break;
    case Command::Spectrum:
      break;
    }
  }
  if (c.command == Command::SpdScan) {
    if (c.b_over_a.empty())
      c.b_over_a = "0:8";
    if (c.c_over_a.empty())
      c.c_over_a = "-2:2";
  }
  return c;
}

inline void validate(const RunConfig& c) {
  try {
    c.potential.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const auto& k = c.knobs;
  if (k.hmd_basis < 1 || k.lmm_mesh < 2)
    throw UsageError("--M must be >= 1 (hmd) and >= 2 (lmm)");
  if (!(k.lambda > 0.0) || !(k.h > 0.0))
    throw UsageError("--lambda and --h must be positive");
  if (k.quad_points < k.hmd_basis)
    throw UsageError("--quad-points must be at least the HMD basis size");
  switch (c.command) {
  case Command::Wavefunction:
  case Command::PotentialCurve:
  case Command::Compare:
    (void)parse_line_grid(c.grid);
    break;
  case Command::SpdScan:
    (void)parse_scan_grid(c.grid);
    (void)parse_range(c.b_over_a, "--B-over-A");
    (void)parse_range(c.c_over_a, "--C-over-A");
    break;
  case Command::Spectrum:
    break;
  }
  if (c.command == Command::PotentialCurve) {
    if (c.potential.A == 0.0)
      throw UsageError("potential-curve: A must be nonzero (V is scaled by A/a^2)");
    if (!c.b_over_a.empty())
      (void)parse_list(c.b_over_a, "--B-over-A");
    if (!c.c_over_a.empty())
      (void)parse_list(c.c_over_a, "--C-over-A");
  }
}

// ---- JSON config ---------------------------------------------------------

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = to_string(c.command);
  j["model"] = to_string(c.potential.model);
  j["a"] = c.potential.a;
  j["A"] = c.potential.A;
  j["B"] = c.potential.B;
  j["C"] = c.potential.C;
  j["method"] = to_string(c.method);
  j["hmd-M"] = c.knobs.hmd_basis;
  j["lambda"] = c.knobs.lambda;
  j["quad-points"] = c.knobs.quad_points;
  j["lmm-M"] = c.knobs.lmm_mesh;
  j["h"] = c.knobs.h;
  j["grid"] = c.grid;
  j["B-over-A"] = c.b_over_a;
  j["C-over-A"] = c.c_over_a;
  j["out"] = c.out;
  j["format"] = to_string(c.format);
  return j;
}

/// Applies the keys present in `j` (same names as the flags) on top of `c`.
inline void apply_json(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object())
    throw UsageError("--config: top level must be a JSON object");
  static const char* known[] = {"command", "model",       "a",     "A",    "B",
                                "C",       "method",      "M",     "hmd-M", "lmm-M",
                                "lambda",  "quad-points", "h",     "grid", "B-over-A",
                                "C-over-A", "out",        "format"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known))
      throw UsageError("--config: unknown key '" + key + "'");
  }
  try {
    if (j.contains("command"))
      c.command = parse_command(j.at("command").get<std::string>());
    if (j.contains("model"))
      c.potential.model = parse_model(j.at("model").get<std::string>());
    if (j.contains("a"))
      c.potential.a = j.at("a").get<double>();
    if (j.contains("A"))
      c.potential.A = j.at("A").get<double>();
    if (j.contains("B"))
      c.potential.B = j.at("B").get<double>();
    if (j.contains("C"))
      c.potential.C = j.at("C").get<double>();
    if (j.contains("method"))
      c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("M")) {
      c.knobs.hmd_basis = j.at("M").get<int>();
      c.knobs.lmm_mesh = c.knobs.hmd_basis;
    }
    if (j.contains("hmd-M"))
      c.knobs.hmd_basis = j.at("hmd-M").get<int>();
    if (j.contains("lmm-M"))
      c.knobs.lmm_mesh = j.at("lmm-M").get<int>();
    if (j.contains("lambda"))
      c.knobs.lambda = j.at("lambda").get<double>();
    if (j.contains("quad-points"))
      c.knobs.quad_points = j.at("quad-points").get<int>();
    if (j.contains("h"))
      c.knobs.h = j.at("h").get<double>();
    if (j.contains("grid"))
      c.grid = j.at("grid").get<std::string>();
    if (j.contains("B-over-A"))
      c.b_over_a = j.at("B-over-A").get<std::string>();
    if (j.contains("C-over-A"))
      c.c_over_a = j.at("C-over-A").get<std::string>();
    if (j.contains("out"))
      c.out = j.at("out").get<std::string>();
    if (j.contains("format"))
      c.format = parse_format(j.at("format").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("--config: ") + e.what());
  }
}

// ---- tabular output ------------------------------------------------------

using Cell = std::variant<double, int, std::string>;

struct Output {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// JSON-only extras (e.g. the potential curve under a compare run).
  nlohmann::ordered_json extras = nlohmann::ordered_json::object();
};

inline std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c))
    return fmt(*d);
  if (const auto* i = std::get_if<int>(&c))
    return std::to_string(*i);
  return std::get<std::string>(c);
}

inline void write_csv(const Output& o, std::ostream& os) {
  for (const auto& [k, v] : o.metadata)
    os << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < o.columns.size(); ++i)
    os << (i ? "," : "") << o.columns[i];
  os << '\n';
  for (const auto& row : o.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
}

inline void write_json(const Output& o, std::ostream& os) {
  nlohmann::ordered_json j;
  auto meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : o.metadata)
    meta[k] = v;
  j["metadata"] = meta;
  j["columns"] = o.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : o.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row)
      std::visit([&](const auto& v) { r.push_back(v); }, c);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  for (const auto& [k, v] : o.extras.items())
    j[k] = v;
  os << j.dump(2) << '\n';
}

// ---- commands ------------------------------------------------------------

inline HmdConfig hmd_config(const RunConfig& c) {
  return make_hmd_config(c.potential, c.knobs.hmd_basis, c.knobs.lambda, c.knobs.quad_points);
}

inline LmmConfig lmm_config(const RunConfig& c) { return {c.knobs.lmm_mesh, c.knobs.h}; }

inline void base_metadata(const RunConfig& c, Output& o) {
  const auto& p = c.potential;
  o.metadata = {{"command", std::string(to_string(c.command))},
                {"model", std::string(to_string(p.model))},
                {"a", fmt(p.a)},
                {"A", fmt(p.A)},
                {"B", fmt(p.B)},
                {"C", fmt(p.C)},
                {"version", std::string(version)}};
}

inline void solver_metadata(const RunConfig& c, bool hmd, bool lmm, Output& o) {
  if (hmd) {
    o.metadata.emplace_back("hmd_M", std::to_string(c.knobs.hmd_basis));
    o.metadata.emplace_back("lambda", fmt(c.knobs.lambda));
    o.metadata.emplace_back("quad_points", std::to_string(c.knobs.quad_points));
  }
  if (lmm) {
    o.metadata.emplace_back("lmm_M", std::to_string(c.knobs.lmm_mesh));
    o.metadata.emplace_back("h", fmt(c.knobs.h));
  }
}

inline bool uses_hmd(MethodChoice m) { return m != MethodChoice::Lmm; }
inline bool uses_lmm(MethodChoice m) { return m != MethodChoice::Hmd; }

inline Output run_spectrum(const RunConfig& c) {
  Output o;
  base_metadata(c, o);
  o.metadata.emplace_back("method", std::string(to_string(c.method)));
  solver_metadata(c, uses_hmd(c.method), uses_lmm(c.method), o);
  o.columns = {"method", "k", "energy"};
  const auto emit = [&](const SpectrumResult& r) {
    o.metadata.emplace_back(std::string(to_string(r.method)) + "_bound_states",
                            std::to_string(r.bound_count()));
    o.metadata.emplace_back(std::string(to_string(r.method)) + "_continuum_states",
                            std::to_string(r.continuum_count));
    for (std::size_t k = 0; k < r.energies.size(); ++k)
      o.rows.push_back({std::string(to_string(r.method)), static_cast<int>(k), r.energies[k]});
  };
  if (uses_hmd(c.method))
    emit(hmd_spectrum(c.potential, hmd_config(c), Vectors::Skip));
  if (uses_lmm(c.method))
    emit(lmm_spectrum(c.potential, lmm_config(c), Vectors::Skip));
  return o;
}

/// Scales v to unit trapezoid norm on x and makes its largest lobe near the
/// origin positive.
inline void normalize_on_grid(std::span<const double> x, std::vector<double>& v) {
  double s = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    peak = std::max(peak, std::abs(v[i]));
    if (i > 0)
      s += 0.5 * (x[i] - x[i - 1]) * (v[i] * v[i] + v[i - 1] * v[i - 1]);
  }
  if (!(s > 0.0))
    return;
  double sign = 1.0;
  for (double e : v) {
    if (std::abs(e) > 1e-3 * peak) {
      sign = e > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  const double scale = sign / std::sqrt(s);
  for (double& e : v)
    e *= scale;
}

inline Output run_wavefunction(const RunConfig& c) {
  Output o;
  base_metadata(c, o);
  const bool hmd = uses_hmd(c.method);
  o.metadata.emplace_back("method", std::string(hmd ? "hmd" : "lmm"));
  solver_metadata(c, hmd, !hmd, o);
  o.metadata.emplace_back("normalization", "unit trapezoid norm on the grid");
  const auto x = parse_line_grid(c.grid).values();
  const HmdConfig hc = hmd ? hmd_config(c) : HmdConfig{};
  const SpectrumResult r = hmd ? hmd_spectrum(c.potential, hc, Vectors::Compute)
                               : lmm_spectrum(c.potential, lmm_config(c), Vectors::Skip);
  std::vector<std::vector<double>> cols;
  o.columns = {"x"};
  for (std::size_t k = 0; k < r.energies.size(); ++k) {
    auto psi = wavefunction(c.potential, r.energies[k], x, static_cast<int>(k)).values;
    normalize_on_grid(x, psi);
    cols.push_back(std::move(psi));
    o.columns.push_back("psi" + std::to_string(k) + "_tra");
  }
  if (hmd) {
    for (std::size_t k = 0; k < r.energies.size(); ++k) {
      auto psi = hmd_wavefunction(hc, r.vectors.col(static_cast<Eigen::Index>(k)), x);
      normalize_on_grid(x, psi);
      cols.push_back(std::move(psi));
      o.columns.push_back("psi" + std::to_string(k) + "_hmd");
    }
  }
  for (std::size_t k = 0; k < r.energies.size(); ++k)
    o.metadata.emplace_back("E" + std::to_string(k), fmt(r.energies[k]));
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<Cell> row{x[i]};
    for (const auto& col : cols)
      row.emplace_back(col[i]);
    o.rows.push_back(std::move(row));
  }
  return o;
}

inline Output run_potential_curve(const RunConfig& c) {
  Output o;
  base_metadata(c, o);
  o.metadata.emplace_back("scaling", "V / (A / a^2)");
  const auto& p = c.potential;
  const auto bs = c.b_over_a.empty() ? std::vector<double>{p.B / p.A}
                                     : parse_list(c.b_over_a, "--B-over-A");
  const auto cs = c.c_over_a.empty() ? std::vector<double>{p.C / p.A}
                                     : parse_list(c.c_over_a, "--C-over-A");
  const auto x = parse_line_grid(c.grid).values();
  std::vector<PotentialSpec> specs;
  o.columns = {"x"};
  for (double cr : cs) {
    for (double br : bs) {
      specs.push_back({p.model, p.a, p.A, br * p.A, cr * p.A});
      o.columns.push_back("V(B/A=" + fmt(br) + ";C/A=" + fmt(cr) + ")");
    }
  }
  const double unit = p.A / (p.a * p.a);
  for (double xi : x) {
    std::vector<Cell> row{xi};
    for (const auto& s : specs)
      row.emplace_back(xi > 0.0 ? eval_potential(s, xi) / unit
                                : std::numeric_limits<double>::infinity());
    o.rows.push_back(std::move(row));
  }
  return o;
}

inline Output run_spd_scan(const RunConfig& c) {
  Output o;
  base_metadata(c, o);
  const auto g = parse_scan_grid(c.grid);
  const auto br = parse_range(c.b_over_a, "--B-over-A");
  const auto cr = parse_range(c.c_over_a, "--C-over-A");
  o.metadata.emplace_back("grid", c.grid);
  o.metadata.emplace_back("B_over_A", c.b_over_a);
  o.metadata.emplace_back("C_over_A", c.c_over_a);
  o.columns = {"B_over_A", "C_over_A", "label", "positive_roots", "exotic", "v_min"};
  const auto& p = c.potential;
  for (double b : linspace(br.lo, br.hi, g.nb)) {
    for (double cc : linspace(cr.lo, cr.hi, g.nc)) {
      const auto lab = classify_spectrum({p.model, p.a, p.A, b * p.A, cc * p.A});
      o.rows.push_back({b, cc, std::string(to_string(lab.label)), lab.positive_root_count,
                        lab.exotic ? 1 : 0, lab.v_min});
    }
  }
  return o;
}

struct CompareOutcome {
  Output output;
  bool fixture_checked = false;
  bool fixture_pass = true;
};

inline CompareOutcome run_compare(const RunConfig& c) {
  CompareOutcome out;
  Output& o = out.output;
  base_metadata(c, o);
  solver_metadata(c, true, true, o);
  const auto h = hmd_spectrum(c.potential, hmd_config(c), Vectors::Skip);
  const auto l = lmm_spectrum(c.potential, lmm_config(c), Vectors::Skip);
  const auto fixture = matching_fixture(c.potential);
  out.fixture_checked = fixture.has_value();
  o.metadata.emplace_back("hmd_bound_states", std::to_string(h.bound_count()));
  o.metadata.emplace_back("lmm_bound_states", std::to_string(l.bound_count()));
  o.metadata.emplace_back("fixture", fixture ? std::string(fixture->name) : "none");
  o.columns = {"k", "E_hmd", "E_lmm", "abs_diff", "rel_diff"};
  if (fixture)
    o.columns.insert(o.columns.end(), {"ref_hmd", "ref_lmm", "rel_tol", "pass"});
  const std::size_t n = std::max(h.energies.size(), l.energies.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (fixture && (h.bound_count() != fixture->hmd.size() || l.bound_count() != fixture->lmm.size()))
    out.fixture_pass = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double eh = k < h.energies.size() ? h.energies[k] : nan;
    const double el = k < l.energies.size() ? l.energies[k] : nan;
    std::vector<Cell> row{static_cast<int>(k), eh, el, std::abs(eh - el),
                          std::abs(eh - el) / std::abs(eh)};
    if (fixture) {
      if (k < fixture->hmd.size()) {
        const double tol = fixture->rel_tol[k];
        const bool pass = TableFixture::agrees(eh, fixture->hmd[k], tol) &&
                          TableFixture::agrees(el, fixture->lmm[k], tol);
        out.fixture_pass = out.fixture_pass && pass;
        row.insert(row.end(), {fixture->hmd[k], fixture->lmm[k], tol,
                               std::string(pass ? "pass" : "fail")});
      } else {
        row.insert(row.end(), {nan, nan, nan, std::string("fail")});
      }
    }
    o.rows.push_back(std::move(row));
  }
  if (fixture)
    o.metadata.emplace_back("fixture_result", out.fixture_pass ? "pass" : "fail");
  const auto x = parse_line_grid(c.grid).values();
  nlohmann::ordered_json curve;
  std::vector<double> xs;
  std::vector<double> vs;
  for (double xi : x) {
    if (!(xi > 0.0))
      continue;
    xs.push_back(xi);
    vs.push_back(eval_potential(c.potential, xi));
  }
  curve["x"] = xs;
  curve["V"] = vs;
  o.extras["potential_curve"] = curve;
  return out;
}

/// Runs a resolved, validated config and writes the result to `os`.
inline int run(const RunConfig& c, std::ostream& os) {
  Output o;
  int code = Success;
  switch (c.command) {
  case Command::Spectrum:
    o = run_spectrum(c);
    break;
  case Command::Wavefunction:
    o = run_wavefunction(c);
    break;
  case Command::PotentialCurve:
    o = run_potential_curve(c);
    break;
  case Command::SpdScan:
    o = run_spd_scan(c);
    break;
  case Command::Compare: {
    auto r = run_compare(c);
    o = std::move(r.output);
    if (r.fixture_checked && !r.fixture_pass)
      code = FixtureMismatch;
    break;
  }
  }
  if (c.format == Format::Csv)
    write_csv(o, os);
  else
    write_json(o, os);
  return code;
}

/// Full entry point: parses argv, merges --config, runs, and maps errors to
/// exit codes.
inline int main_entry(int argc, const char* const* argv, std::ostream& os, std::ostream& err) {
  CLI::App app{"Bound states of two exactly tridiagonalizable potentials"};
  app.set_version_flag("--version", std::string(version));
  // -h would collide with the --h scale option.
  app.set_help_flag("--help", "print this help and exit");
  std::string command;
  std::string model;
  std::string method;
  std::string format;
  std::string config_path;
  std::string save_config;
  double a = 0.0;
  double pa = 0.0;
  double pb = 0.0;
  double pc = 0.0;
  int m = 0;
  int hmd_m = 0;
  int lmm_m = 0;
  double lambda = 0.0;
  double h = 0.0;
  int quad = 0;
  std::string grid;
  std::string b_over_a;
  std::string c_over_a;
  std::string out_path;

  app.add_option("command", command,
                 "spectrum | wavefunction | potential-curve | spd-scan | compare");
  auto* o_model = app.add_option("--model", model, "I or II");
  auto* o_a = app.add_option("--a", a, "length scale a (bohr)");
  auto* o_pa = app.add_option("--A", pa, "coupling A");
  auto* o_pb = app.add_option("--B", pb, "coupling B");
  auto* o_pc = app.add_option("--C", pc, "coupling C");
  auto* o_method = app.add_option("--method", method, "lmm, hmd or both");
  auto* o_m = app.add_option("--M", m, "basis size (hmd) / mesh size (lmm)");
  auto* o_hmd_m = app.add_option("--hmd-M", hmd_m, "HMD basis size");
  auto* o_lmm_m = app.add_option("--lmm-M", lmm_m, "LMM mesh size");
  auto* o_lambda = app.add_option("--lambda", lambda, "HMD scale lambda (1/bohr)");
  auto* o_h = app.add_option("--h", h, "LMM scale h (bohr)");
  auto* o_quad = app.add_option("--quad-points", quad, "HMD Gauss-Laguerre order (default 4M)");
  auto* o_grid = app.add_option("--grid", grid, "x_min:x_max:points, or NBxNC for spd-scan");
  auto* o_ba = app.add_option("--B-over-A", b_over_a, "lo:hi (spd-scan) or list (curves)");
  auto* o_ca = app.add_option("--C-over-A", c_over_a, "lo:hi (spd-scan) or list (curves)");
  auto* o_out = app.add_option("--out", out_path, "output file (default stdout)");
  auto* o_format = app.add_option("--format", format, "csv or json");
  app.add_option("--config", config_path, "JSON config with the same keys as the flags");
  app.add_option("--save-config", save_config, "write the resolved config as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    os << app.help();
    return Success;
  } catch (const CLI::CallForVersion&) {
    os << version << '\n';
    return Success;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return Usage;
  }

  RunConfig c;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in)
        throw UsageError("--config: cannot open '" + config_path + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("--config: ") + e.what());
      }
      apply_json(j, c);
    }
    if (!command.empty())
      c.command = parse_command(command);
    else if (config_path.empty())
      throw UsageError("missing command");
    if (o_model->count())
      c.potential.model = parse_model(model);
    if (o_a->count())
      c.potential.a = a;
    if (o_pa->count())
      c.potential.A = pa;
    if (o_pb->count())
      c.potential.B = pb;
    if (o_pc->count())
      c.potential.C = pc;
    if (o_method->count())
      c.method = parse_method(method);
    if (o_m->count()) {
      c.knobs.hmd_basis = m;
      c.knobs.lmm_mesh = m;
    }
    if (o_hmd_m->count())
      c.knobs.hmd_basis = hmd_m;
    if (o_lmm_m->count())
      c.knobs.lmm_mesh = lmm_m;
    if (o_lambda->count())
      c.knobs.lambda = lambda;
    if (o_h->count())
      c.knobs.h = h;
    if (o_quad->count())
      c.knobs.quad_points = quad;
    if (o_grid->count())
      c.grid = grid;
    if (o_ba->count())
      c.b_over_a = b_over_a;
    if (o_ca->count())
      c.c_over_a = c_over_a;
    if (o_out->count())
      c.out = out_path;
    if (o_format->count())
      c.format = parse_format(format);
    c = resolve(std::move(c));
    validate(c);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return Usage;
  }

  if (!save_config.empty()) {
    std::ofstream cfg(save_config);
    if (!cfg) {
      err << "error: cannot write '" << save_config << "'\n";
      return Usage;
    }
    cfg << to_json(c).dump(2) << '\n';
  }

  try {
    std::ostringstream buffer;
    const int code = run(c, buffer);
    if (c.out.empty()) {
      os << buffer.str();
    } else {
      std::ofstream file(c.out, std::ios::binary);
      if (!file) {
        err << "error: cannot write '" << c.out << "'\n";
        return Usage;
      }
      file << buffer.str();
    }
    if (code == FixtureMismatch)
      err << "fixture mismatch: see the pass column\n";
    return code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return Usage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return Numerical;
  }
}

} // namespace tra::cli
