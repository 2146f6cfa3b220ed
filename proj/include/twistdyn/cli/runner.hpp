#pragma once

// Report drivers behind the dynamo_cli front end. Each run resolves its
// parameters against a fixed per-command key set, writes the requested data
// files into the output directory and finishes with manifest.json.

#include "twistdyn/filament_dynamo.hpp"
#include "twistdyn/frenet_geometry.hpp"
#include "twistdyn/io/text.hpp"
#include "twistdyn/map_algebra.hpp"
#include "twistdyn/tube_flow.hpp"
#include "twistdyn/version.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace twistdyn::cli {

using json = nlohmann::json;

enum ExitCode : int { kSuccess = 0, kInvalidInput = 2, kIoFailure = 3 };

/// Bad user input; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Output could not be written; maps to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"map", "tube", "filament", "frenet"};
  return names;
}

inline const std::set<std::string>& all_formats() {
  static const std::set<std::string> f{"csv", "json", "svg"};
  return f;
}

/// Every accepted parameter per command, with its default.
inline const std::map<std::string, std::map<std::string, std::string>>& parameter_defaults() {
  static const std::map<std::string, std::map<std::string, std::string>> table{
      {"map",
       {{"map", "cat"},
        {"K", "1"},
        {"tau0", "-1"},
        {"K0", "1"},
        {"steps", "50"},
        {"seed_u", "0"},
        {"seed_v", "1"},
        {"orbit_x", "0.1"},
        {"orbit_y", "0.2"},
        {"orbit_steps", "20"}}},
      {"tube",
       {{"r_min", "1e-06"},
        {"r_max", "1"},
        {"nodes", "256"},
        {"spacing", "log"},
        {"m", io::format_number(std::numbers::phi)},
        {"omega0", "1"},
        {"rho0", "1"},
        {"kappa0", "1"},
        {"gamma", "0"},
        {"ansatz", "eigen"},
        {"residual_form", "full"},
        {"blowup_decades", "6"}}},
      {"filament",
       {{"eta", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1"},
        {"kappa", "1"},
        {"kappa_prime", "1"},
        {"K0", "1"},
        {"v0", "-1"},
        {"tau", "1"},
        {"gamma_ref", "1"},
        {"A", "auto"},
        {"B", "auto"},
        {"C", "auto"},
        {"intercept_tol", "1e-10"},
        {"fit_residual_tol", "1e-08"}}},
      {"frenet",
       {{"kappa", "1"},
        {"tau", "1"},
        {"s_start", "0"},
        {"s_end", "10"},
        {"step", "0.001"},
        {"stride", "1"}}},
  };
  return table;
}

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> parameters;  // fully resolved
  std::filesystem::path output_dir;
  std::set<std::string> formats{"csv", "json", "svg"};

  bool wants(const std::string& fmt) const { return formats.count(fmt) != 0; }
};

inline std::set<std::string> parse_formats(const std::string& list) {
  std::set<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = io::trim(item);
    if (item.empty()) continue;
    if (!all_formats().count(item)) throw UsageError("unknown format '" + item + "'");
    out.insert(item);
  }
  return out;
}

/// Defaults, then `overrides`. Unknown commands or keys are rejected.
inline RunConfig resolve_config(const std::string& command, const std::map<std::string, std::string>& overrides,
                                const std::filesystem::path& output_dir, std::set<std::string> formats) {
  const auto& table = parameter_defaults();
  const auto it = table.find(command);
  if (it == table.end()) throw UsageError("unknown command '" + command + "'");
  RunConfig cfg{command, it->second, output_dir, std::move(formats)};
  for (const auto& [k, v] : overrides) {
    if (!cfg.parameters.count(k)) throw UsageError("unknown parameter '" + k + "' for command " + command);
    cfg.parameters[k] = v;
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Parameter parsing

class Params {
 public:
  explicit Params(const std::map<std::string, std::string>& p) : p_(p) {}

  const std::string& str(const std::string& key) const {
    const auto it = p_.find(key);
    if (it == p_.end()) throw std::logic_error("missing parameter " + key);
    return it->second;
  }

  double real(const std::string& key) const { return parse_real(key, str(key)); }

  long long integer(const std::string& key) const {
    const std::string& s = str(key);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw UsageError("parameter " + key + ": expected an integer, got '" + s + "'");
    return v;
  }

  std::vector<double> real_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = io::trim(item);
      if (!item.empty()) out.push_back(parse_real(key, item));
    }
    return out;
  }

  static double parse_real(const std::string& key, const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("parameter " + key + ": expected a finite number, got '" + s + "'");
    }
  }

 private:
  const std::map<std::string, std::string>& p_;
};

// ---------------------------------------------------------------------------
// Output plumbing

inline json manifest_json(const RunConfig& cfg, const json& derived, const std::vector<std::string>& files) {
  json m;
  m["toolkit"] = kToolkitName;
  m["version"] = kToolkitVersion;
  m["command"] = cfg.command;
  m["parameters"] = cfg.parameters;
  m["formats"] = std::vector<std::string>(cfg.formats.begin(), cfg.formats.end());
  m["derived"] = derived;
  m["files"] = files;
  return m;
}

inline json number(double v) {
  if (std::isfinite(v)) return v;
  return io::format_number(v);
}

inline json complex_json(complex z) { return json{{"re", number(z.real())}, {"im", number(z.imag())}}; }

class OutputSet {
 public:
  explicit OutputSet(const RunConfig& cfg) : cfg_(cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.output_dir))
      throw IoError("cannot create output directory " + cfg.output_dir.string());
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = cfg_.output_dir / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write " + path.string());
    os << content;
    os.close();
    if (!os) throw IoError("write failed for " + path.string());
    files_.push_back(name);
  }

  /// Writes `<command>_report.json` with manifest + results, then manifest.json.
  void finish(const json& derived, const json& results) {
    const std::string report = cfg_.command + "_report.json";
    std::vector<std::string> listed = files_;
    if (cfg_.wants("json")) listed.push_back(report);
    const json manifest = manifest_json(cfg_, derived, listed);
    if (cfg_.wants("json")) write(report, json{{"manifest", manifest}, {"results", results}}.dump(2) + "\n");
    write("manifest.json", manifest.dump(2) + "\n");
  }

 private:
  const RunConfig& cfg_;
  std::vector<std::string> files_;
};

inline std::string classification_detail(MapKind kind) {
  return kind == MapKind::parabolic ? "elliptic-or-parabolic boundary: parabolic" : std::string(to_string(kind));
}

// ---------------------------------------------------------------------------
// map

inline LinearTorusMap map_from_params(const Params& p) {
  const std::string& name = p.str("map");
  if (name == "cat") return make_cat_map();
  if (name == "cat-shear") return make_cat_shear_map(static_cast<int>(p.integer("K")));
  if (name == "twist") return make_twist_map();
  if (name == "tube-twist") return make_tube_twist_map(p.real("tau0"), p.real("K0"));
  if (name == "thin-tube") return make_thin_tube_map(p.real("tau0"));
  throw UsageError("unknown map '" + name + "' (expected cat, cat-shear, twist, tube-twist, thin-tube)");
}

inline int run_map_report(const RunConfig& cfg) {
  const Params p(cfg.parameters);
  const LinearTorusMap m = map_from_params(p);
  const long long steps = p.integer("steps");
  const long long orbit_steps = p.integer("orbit_steps");
  if (steps < 1) throw UsageError("steps must be >= 1");
  if (orbit_steps < 0) throw UsageError("orbit_steps must be >= 0");
  const FieldVector seed{p.real("seed_u"), p.real("seed_v")};
  if (!(seed.norm() > 0.0)) throw UsageError("seed vector must be nonzero");

  const MapClassification cls = classify(m);
  const double ln_lambda1 = std::log(std::abs(cls.lambda1));

  OutputSet out(cfg);

  std::vector<double> ns, mean_growth, step_growth;
  io::CsvTable growth({"n", "mean_log_growth", "step_log_growth", "ln_abs_lambda1"});
  for (long long n = 1; n <= steps; ++n) {
    const auto un = static_cast<std::size_t>(n);
    ns.push_back(static_cast<double>(n));
    mean_growth.push_back(growth_rate(m, seed, un));
    step_growth.push_back(step_growth_rate(m, seed, un));
    growth.add_numbers({ns.back(), mean_growth.back(), step_growth.back(), ln_lambda1});
  }

  const auto orbit = iterate_orbit(m, TorusPoint(p.real("orbit_x"), p.real("orbit_y")),
                                   static_cast<std::size_t>(orbit_steps));
  io::CsvTable orbit_csv({"k", "x", "y"});
  for (std::size_t k = 0; k < orbit.size(); ++k)
    orbit_csv.add_numbers({static_cast<double>(k), orbit[k].x(), orbit[k].y()});

  if (cfg.wants("csv")) {
    out.write("map_growth.csv", growth.str());
    out.write("map_orbit.csv", orbit_csv.str());
  }
  if (cfg.wants("svg")) {
    out.write("map_growth.svg",
              io::svg_line_plot("Frozen-field log growth: " + p.str("map"), "n", "log growth",
                                {{"mean (1/n) ln|M^n f|/|f|", ns, mean_growth},
                                 {"per-step ln|M^n f|/|M^(n-1) f|", ns, step_growth},
                                 {"ln|lambda1|", ns, std::vector<double>(ns.size(), ln_lambda1)}}));
  }

  const json matrix = json::array({json::array({m.a, m.b}), json::array({m.c, m.d})});
  const json derived{{"matrix", matrix}};
  json results;
  results["map"] = p.str("map");
  results["matrix"] = matrix;
  results["determinant"] = cls.determinant;
  results["trace"] = cls.trace;
  results["classification"] = std::string(to_string(cls.kind));
  results["classification_detail"] = classification_detail(cls.kind);
  results["eigenvalues"] = json::array({complex_json(cls.lambda1), complex_json(cls.lambda2)});
  results["ln_abs_lambda1"] = number(ln_lambda1);
  results["seed"] = json::array({seed.u, seed.v});
  results["growth"] = {{"steps", steps},
                       {"mean_log_growth_final", number(mean_growth.back())},
                       {"step_log_growth_final", number(step_growth.back())}};
  out.finish(derived, results);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// tube

inline int run_tube_report(const RunConfig& cfg) {
  const Params p(cfg.parameters);
  const double r_min = p.real("r_min");
  if (!(r_min > 0.0)) throw UsageError("r_min must be positive");
  const long long nodes = p.integer("nodes");
  if (nodes < static_cast<long long>(RadialGrid::kMinNodes)) throw UsageError("nodes must be >= 16");
  const std::string& spacing = p.str("spacing");
  if (spacing != "log" && spacing != "uniform") throw UsageError("spacing must be log or uniform");
  const std::string& ansatz = p.str("ansatz");
  if (ansatz != "eigen" && ansatz != "rigid") throw UsageError("ansatz must be eigen or rigid");
  const std::string& form_name = p.str("residual_form");
  if (form_name != "full" && form_name != "curvature_linearized")
    throw UsageError("residual_form must be full or curvature_linearized");
  const ResidualForm form = form_name == "full" ? ResidualForm::full : ResidualForm::curvature_linearized;
  const long long decades = p.integer("blowup_decades");
  if (decades < 2) throw UsageError("blowup_decades must be >= 2");

  const RadialGrid grid(r_min, p.real("r_max"), static_cast<std::size_t>(nodes),
                        spacing == "log" ? GridSpacing::logarithmic : GridSpacing::uniform);
  TubeParameters tp;
  tp.m = p.real("m");
  tp.omega0 = p.real("omega0");
  tp.rho0 = p.real("rho0");
  tp.kappa0 = p.real("kappa0");
  tp.gamma = p.real("gamma");
  tp.validate();

  const auto v_s = velocity_profile(grid);
  const TubeFlowField field =
      ansatz == "eigen" ? make_eigen_ansatz_field(tp, v_s) : make_rigid_rotation_field(tp, grid, v_s);
  const auto res_pol = poloidal_residual(field, grid, form);
  const auto res_tor = toroidal_residual(field, grid, form);

  std::vector<double> pressure(grid.size()), alpha(grid.size()), log_r(grid.size()), p_grad(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    pressure[i] = pressure_profile(r, tp);
    alpha[i] = alpha_effect(r, tp.m, tp.kappa0, field.v_s[i]);
    log_r[i] = std::log(r);
    p_grad[i] = tp.omega0 * tp.omega0 - 2.0 * tp.m * tp.kappa0 * std::log(r) / r;
  }
  const auto res_p = radial_pressure_residual(field, p_grad, grid, form);

  OutputSet out(cfg);
  if (cfg.wants("csv")) {
    io::CsvTable t({"r", "v_s", "v_theta", "p", "alpha", "residual_poloidal", "residual_toroidal"});
    for (std::size_t i = 0; i < grid.size(); ++i)
      t.add_numbers({grid[i], field.v_s[i], field.v_theta[i], pressure[i], alpha[i], res_pol[i], res_tor[i]});
    out.write("tube_profile.csv", t.str());
  }
  if (cfg.wants("svg")) {
    out.write("tube_pressure.svg",
              io::svg_line_plot("Tube pressure profile", "ln r", "p / rho0-scaled", {{"p(r)", log_r, pressure}}));
  }

  auto quad_json = [](const QuadraticEigenproblem& q) {
    const auto [a, b] = q.roots();
    return json{{"provenance", std::string(to_string(q.provenance))},
                {"coefficients", json::array({q.c2, q.c1, q.c0})},
                {"roots", json::array({complex_json(a), complex_json(b)})}};
  };
  const QuadraticEigenproblem derived_q = eliminate_eigenvalue();
  const QuadraticEigenproblem stated_q = paper_eigenproblem();
  const bool quadratics_agree =
      derived_q.c2 == stated_q.c2 && derived_q.c1 == stated_q.c1 && derived_q.c0 == stated_q.c0;

  std::vector<double> radii;
  for (long long k = 1; k <= decades; ++k) radii.push_back(std::pow(10.0, -static_cast<double>(k)));
  std::vector<double> p_seq;
  for (double r : radii) p_seq.push_back(pressure_profile(r, tp));
  const PressureBehaviour blowup = pressure_blowup_check(tp, radii);

  // Poloidal minus m times toroidal, compared with the eliminated combination.
  // Scaled by r^2 so the axis end does not dominate.
  double elimination_defect = 0.0;
  {
    const TubeFlowField ef = make_eigen_ansatz_field(tp, v_s);
    const auto pl = poloidal_residual(ef, grid, ResidualForm::curvature_linearized);
    const auto tr = toroidal_residual(ef, grid, ResidualForm::curvature_linearized);
    const double c = 2.0 - tp.m * (tp.m - 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid[i];
      elimination_defect =
          std::max(elimination_defect, std::abs(pl[i] - tp.m * tr[i] - c * v_s[i] / (r * r)) * r * r);
    }
  }

  double vs_defect = 0.0;
  {
    const Derivatives d = radial_derivatives(v_s, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) vs_defect = std::max(vs_defect, std::abs(d.first[i] + 1.0 / grid[i]));
  }

  auto max_abs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  const double a1 = alpha_effect(1.0, tp.m, 1.0, 1.0);
  json results;
  results["eigenproblems"] = json::array({quad_json(stated_q), quad_json(derived_q)});
  results["discrepancies"] = json::array(
      {json{{"id", "eliminated-vs-stated-quadratic"},
            {"flagged", !quadratics_agree},
            {"detail", "poloidal - m*toroidal elimination gives m^2 - m - 2 = 0 (roots 2, -1); "
                       "the stated eigen-equation is m^2 - m - 1 = 0 (golden-ratio roots)"}},
       json{{"id", "alpha-prefactor"},
            {"flagged", true},
            {"detail", "alpha is implemented as (1/r)(m-1) kappa0^2 v_s^2; substituting m = (1+-sqrt5)/2 gives "
                       "(m-1) = (-1+-sqrt5)/2, not the printed (1+-sqrt5)/2"}},
       json{{"id", "pressure-balance"},
            {"flagged", max_abs(res_p) > 1e-8},
            {"detail", "closed-form pressure gradient checked against the radial balance"},
            {"max_abs_residual", number(max_abs(res_p))}}});
  results["blowup"] = {{"verdict", std::string(to_string(blowup))}, {"radii", radii}, {"pressure", p_seq}};
  results["pressure_at_r_max"] = pressure.back();
  results["alpha_scaling"] = {{"kappa0_doubling_ratio", number(alpha_effect(1.0, tp.m, 2.0, 1.0) / a1)},
                              {"v_s_tripling_ratio", number(alpha_effect(1.0, tp.m, 1.0, 3.0) / a1)},
                              {"alpha_at_m_equal_1", alpha_effect(1.0, 1.0, 1.0, 1.0)}};
  results["checks"] = {
      {"velocity_profile_max_defect", vs_defect},
      {"elimination_combination_max_defect_r2_scaled", elimination_defect},
      {"incompressibility_defect", incompressibility_defect(field, grid)},
      {"log_radial_defect_r2", log_radial_check([](auto r) { return r * r; }, grid)},
      {"log_radial_defect_inv_r", log_radial_check([](auto r) { return 1.0 / r; }, grid)},
      {"log_radial_defect_sin_ln_r",
       log_radial_check([](auto r) { using std::log; using std::sin; return sin(log(r)); }, grid)}};
  results["residual_form"] = form_name;
  results["max_abs_residual_poloidal"] = number(max_abs(res_pol));
  results["max_abs_residual_toroidal"] = number(max_abs(res_tor));

  out.finish(json{{"grid_nodes", grid.size()}, {"r_first", grid[0]}, {"r_last", grid[grid.size() - 1]}}, results);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// filament

inline int run_filament_sweep(const RunConfig& cfg) {
  const Params p(cfg.parameters);
  FilamentParams fp;
  fp.kappa = p.real("kappa");
  fp.kappa_prime = p.real("kappa_prime");
  fp.K0 = p.real("K0");
  fp.v0 = p.real("v0");
  fp.tau = p.real("tau");
  fp.gamma_ref = p.real("gamma_ref");
  if (!(fp.K0 > 0.0)) throw UsageError("K0 must be positive");
  if (fp.gamma_ref == 0.0) throw UsageError("gamma_ref must be nonzero");
  const auto etas = p.real_list("eta");
  if (etas.empty()) throw UsageError("eta list is empty");
  for (double e : etas)
    if (e < 0.0) throw UsageError("eta values must be non-negative");

  auto coeff = [&](const std::string& key, double derived) {
    return p.str(key) == "auto" ? derived : p.real(key);
  };
  const double A = coeff("A", fp.A());
  const double B = coeff("B", fp.B());
  const double C = coeff("C", fp.C());
  const ClassifyThresholds th{p.real("intercept_tol"), p.real("fit_residual_tol")};

  std::vector<GrowthRateResult> rows;
  rows.reserve(etas.size());
  for (double e : etas) rows.push_back(solve_growth_rate(e, A, B, C));

  std::vector<std::pair<double, double>> samples;
  double worst_residual = 0.0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const auto& g = rows[i];
    if (std::isfinite(g.roots[0].real())) samples.emplace_back(etas[i], g.roots[0].real());
    for (double r : g.residuals)
      if (std::isfinite(r)) worst_residual = std::max(worst_residual, r);
  }

  std::string verdict;
  json fit_json = nullptr;
  std::set<double> distinct;
  for (const auto& s : samples) distinct.insert(s.first);
  if (fp.tau == 0.0) {
    verdict = std::string(to_string(DynamoRegime::non_dynamo_planar));
  } else if (distinct.size() < 3 || distinct.size() != samples.size()) {
    verdict = "unclassified: need at least 3 distinct eta samples";
  } else {
    verdict = std::string(to_string(classify_dynamo(samples, fp.tau, th)));
  }
  if (distinct.size() >= 2 && distinct.size() == samples.size()) {
    const LinearFit fit = fit_line(samples);
    fit_json = {{"intercept", number(fit.intercept)}, {"slope", number(fit.slope)},
                {"max_residual", number(fit.max_residual)}};
  }

  OutputSet out(cfg);
  if (cfg.wants("csv")) {
    io::CsvTable t({"eta", "re_gamma_1", "im_gamma_1", "re_gamma_2", "im_gamma_2", "regime"});
    for (std::size_t i = 0; i < etas.size(); ++i) {
      const auto& g = rows[i];
      t.add_row({io::format_number(etas[i]), io::format_number(g.roots[0].real()),
                 io::format_number(g.roots[0].imag()), io::format_number(g.roots[1].real()),
                 io::format_number(g.roots[1].imag()), std::string(to_string(g.regime))});
    }
    out.write("filament_sweep.csv", t.str());
  }
  if (cfg.wants("svg")) {
    std::vector<double> g1, g2;
    for (const auto& g : rows) {
      g1.push_back(g.roots[0].real());
      g2.push_back(g.roots[1].real());
    }
    out.write("filament_gamma.svg", io::svg_line_plot("Filament growth rate", "eta", "Re gamma",
                                                      {{"Re gamma_1", etas, g1}, {"Re gamma_2", etas, g2}}));
  }

  FilamentParams at_ref = fp;
  at_ref.eta = etas.front();
  const FilamentMatrix fm = build_filament_matrix(at_ref);
  json results;
  results["coefficients"] = {{"A", A}, {"B", B}, {"C", C}, {"BA", B * A}};
  results["matrix_at_first_eta"] = {
      {"entries", json::array({json::array({fm.entries[0][0], fm.entries[0][1]}),
                               json::array({fm.entries[1][0], fm.entries[1][1]})})},
      {"m33", fm.m33}};
  results["verdict"] = verdict;
  results["fit"] = fit_json;
  results["max_relative_condition_residual"] = worst_residual;
  json rows_json = json::array();
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const auto& g = rows[i];
    rows_json.push_back({{"eta", etas[i]},
                         {"gamma", json::array({complex_json(g.roots[0]), complex_json(g.roots[1])})},
                         {"x", json::array({complex_json(g.x_roots[0]), complex_json(g.x_roots[1])})},
                         {"residuals", json::array({number(g.residuals[0]), number(g.residuals[1])})},
                         {"regime", std::string(to_string(g.regime))}});
  }
  results["sweep"] = rows_json;
  out.finish(json{{"A", A}, {"B", B}, {"C", C}}, results);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// frenet

inline int run_frenet(const RunConfig& cfg) {
  const Params p(cfg.parameters);
  const double step = p.real("step");
  if (!(step > 0.0)) throw UsageError("step must be positive");
  const double kappa = p.real("kappa");
  if (kappa < 0.0) throw UsageError("kappa must be non-negative");
  const double tau = p.real("tau");
  const double s0 = p.real("s_start");
  const double s1 = p.real("s_end");
  if (!(s1 >= s0)) throw UsageError("s_end must be >= s_start");
  const long long stride = p.integer("stride");
  if (stride < 1) throw UsageError("stride must be >= 1");

  const CurveProfile profile = CurveProfile::constant(kappa, tau);
  const FrenetFrame initial = FrenetFrame::canonical();
  const FrameTrajectory traj = integrate_frame(profile, s0, s1, step, initial);
  const FrenetFrame& last = traj.samples.back().frame;

  OutputSet out(cfg);
  std::vector<double> ss, defects;
  io::CsvTable t({"s", "t1", "t2", "t3", "n1", "n2", "n3", "b1", "b2", "b3", "defect"});
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != traj.samples.size()) continue;
    const auto& [s, f] = traj.samples[i];
    const double d = f.orthonormality_defect();
    ss.push_back(s);
    defects.push_back(d);
    t.add_numbers({s, f.t.x(), f.t.y(), f.t.z(), f.n.x(), f.n.y(), f.n.z(), f.b.x(), f.b.y(), f.b.z(), d});
  }
  if (cfg.wants("csv")) out.write("frenet_trajectory.csv", t.str());
  if (cfg.wants("svg"))
    out.write("frenet_defect.svg",
              io::svg_line_plot("Frenet frame orthonormality defect", "s", "defect", {{"defect", ss, defects}}));

  const double darboux = std::hypot(kappa, tau);
  const double expected = std::abs(std::remainder((s1 - s0) * darboux, 2.0 * std::numbers::pi));
  const double closure = std::max({(last.t - initial.t).lpNorm<Eigen::Infinity>(),
                                   (last.n - initial.n).lpNorm<Eigen::Infinity>(),
                                   (last.b - initial.b).lpNorm<Eigen::Infinity>()});
  json events = json::array();
  for (const auto& e : traj.events) events.push_back({{"s", e.s}, {"defect_before", e.defect_before}});

  auto vec = [](const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); };
  json results;
  results["samples"] = traj.samples.size();
  results["max_defect"] = traj.max_defect();
  results["reorthonormalization_events"] = events;
  results["final_frame"] = {{"t", vec(last.t)}, {"n", vec(last.n)}, {"b", vec(last.b)}};
  results["closure_error"] = closure;
  results["rotation_angle_measured"] = frame_rotation_angle(initial, last);
  results["rotation_angle_expected"] = expected;
  results["accumulated_rotation_angle"] = accumulated_rotation_angle(traj);
  results["accumulated_rotation_angle_expected"] = (s1 - s0) * darboux;
  results["twist_angle_at_end"] = twist_angle(0.0, profile, s1);
  out.finish(json{{"darboux_rate", darboux}}, results);
  return kSuccess;
}

// ---------------------------------------------------------------------------

/// Runs one configuration; all failures are mapped to exit codes and reported on `err`.
inline int run(const RunConfig& cfg, std::ostream& err = std::cerr) {
  try {
    if (cfg.command == "map") return run_map_report(cfg);
    if (cfg.command == "tube") return run_tube_report(cfg);
    if (cfg.command == "filament") return run_filament_sweep(cfg);
    if (cfg.command == "frenet") return run_frenet(cfg);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kInvalidInput;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

/// Command, parameters and formats recorded in a manifest.json.
struct ManifestInput {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::set<std::string> formats;
};

inline ManifestInput read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read manifest " + path.string());
  json j;
  try {
    is >> j;
    ManifestInput m;
    m.command = j.at("command").get<std::string>();
    m.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
    for (const auto& f : j.at("formats")) m.formats.insert(f.get<std::string>());
    return m;
  } catch (const json::exception& e) {
    throw UsageError("malformed manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace twistdyn::cli
