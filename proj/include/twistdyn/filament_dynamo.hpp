#pragma once

// Thin-filament induction: the 2x2 induction matrix, the determinant growth
// condition in x = eta/gamma, and slow / fast / planar regime classification.

#include "twistdyn/quadratic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace twistdyn {

/// Filament parameters evaluated at a single point of the filament.
/// C depends on gamma, so it is frozen at gamma_ref.
struct FilamentParams {
  double eta = 0.0;          // magnetic diffusivity
  double kappa = 1.0;        // curvature
  double kappa_prime = 1.0;  // d kappa / ds
  double K0 = 1.0;           // constant stretch factor
  double v0 = -1.0;          // flow speed scale
  double tau = 1.0;          // torsion
  double gamma_ref = 1.0;    // growth rate at which C is evaluated

  void validate() const {
    if (!(K0 > 0.0)) throw std::invalid_argument("FilamentParams: K0 must be positive");
    if (!(eta >= 0.0)) throw std::invalid_argument("FilamentParams: eta must be non-negative");
    if (gamma_ref == 0.0) throw std::invalid_argument("FilamentParams: gamma_ref must be nonzero");
  }

  double A() const { return K0 * kappa_prime * kappa; }
  double B() const { return kappa / (K0 * K0); }
  double C() const { return kappa / gamma_ref * v0; }
};

enum class DynamoRegime { slow, fast_candidate, non_dynamo_planar, degenerate };

inline std::string_view to_string(DynamoRegime r) {
  switch (r) {
    case DynamoRegime::slow: return "slow";
    case DynamoRegime::fast_candidate: return "fast-candidate";
    case DynamoRegime::non_dynamo_planar: return "non-dynamo-planar";
    case DynamoRegime::degenerate: return "degenerate";
  }
  return "unknown";
}

struct GrowthRateResult {
  std::array<complex, 2> roots{};      // gamma for each x root
  std::array<complex, 2> x_roots{};    // eta / gamma
  std::array<double, 2> residuals{};   // relative determinant-condition defect
  DynamoRegime regime = DynamoRegime::degenerate;
};

/// Squared filament line element K0^2 ds^2.
inline double filament_line_element(double K0, double ds) {
  if (!(K0 > 0.0)) throw std::invalid_argument("filament_line_element: K0 must be positive");
  return K0 * K0 * ds * ds;
}

/// Tangential gradient K0^-1 df/ds by central differences (one-sided at the ends).
inline std::vector<double> filament_gradient(std::span<const double> f, double ds, double K0) {
  if (!(K0 > 0.0)) throw std::invalid_argument("filament_gradient: K0 must be positive");
  if (!(ds > 0.0)) throw std::invalid_argument("filament_gradient: ds must be positive");
  const std::size_t n = f.size();
  if (n < 3) throw std::invalid_argument("filament_gradient: need at least 3 samples");
  std::vector<double> g(n);
  const double w = 1.0 / (2.0 * ds * K0);
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - f[i - 1]) * w;
  g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * w;
  g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * w;
  return g;
}

struct FilamentMatrix {
  std::array<std::array<double, 2>, 2> entries{};
  /// (eta/gamma) tau K0, the dropped third diagonal entry. Zero for a torsion-free filament.
  double m33 = 0.0;
};

/// M - gamma I = -K0^-2 gamma_ref diag(1 + (eta/gamma_ref) A, (eta/gamma_ref) B + C).
/// I is the ordinary 2x2 identity.
inline FilamentMatrix build_filament_matrix(const FilamentParams& p) {
  p.validate();
  const double g = p.gamma_ref;
  const double x = p.eta / g;
  const double pre = -g / (p.K0 * p.K0);
  FilamentMatrix out;
  out.entries[0][0] = pre * (1.0 + x * p.A());
  out.entries[1][1] = pre * (x * p.B() + p.C());
  out.m33 = p.tau == 0.0 ? 0.0 : x * p.tau * p.K0;
  return out;
}

/// x (B A C) + C + x^2 (B A), the determinant condition in x = eta/gamma.
template <class T>
T determinant_condition_residual(T x, double A, double B, double C) {
  const double ba = B * A;
  return x * (ba * C) + C + x * x * ba;
}

namespace detail {

inline double relative_condition_residual(complex x, double A, double B, double C) {
  const double ba = B * A;
  const complex res = determinant_condition_residual(x, A, B, C);
  const double scale = std::abs(ba) * std::norm(x) + std::abs(ba * C) * std::abs(x) + std::abs(C);
  return scale > 0.0 ? std::abs(res) / scale : std::abs(res);
}

}  // namespace detail

/// Solves (BA) x^2 + (BAC) x + C = 0 for x = eta/gamma and returns gamma = eta/x.
///
/// eta = 0 gives gamma = 0 (slow limit). A zero x root with eta != 0, or a
/// vanishing BA, is reported as degenerate and its gamma left as NaN.
/// With finite nonzero x roots gamma is proportional to eta, hence slow.
inline GrowthRateResult solve_growth_rate(double eta, double A, double B, double C) {
  if (!(eta >= 0.0)) throw std::invalid_argument("solve_growth_rate: eta must be non-negative");
  GrowthRateResult out;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (eta == 0.0) {
    out.roots = {complex(0.0), complex(0.0)};
    out.x_roots = {complex(nan), complex(nan)};
    out.residuals = {0.0, 0.0};
    out.regime = DynamoRegime::slow;
    return out;
  }

  const double ba = B * A;
  if (ba == 0.0) {
    // Condition collapses to C = 0: no root, or every x.
    out.roots = {complex(nan, nan), complex(nan, nan)};
    out.x_roots = out.roots;
    out.residuals = {std::abs(C), std::abs(C)};
    out.regime = DynamoRegime::degenerate;
    return out;
  }

  const auto [x1, x2] = solve_quadratic(ba, ba * C, C);
  out.x_roots = {x1, x2};
  out.regime = DynamoRegime::slow;
  for (std::size_t k = 0; k < 2; ++k) {
    const complex x = out.x_roots[k];
    if (x == complex(0.0)) {
      out.roots[k] = complex(nan, nan);
      out.residuals[k] = detail::relative_condition_residual(x, A, B, C);
      out.regime = DynamoRegime::degenerate;
      continue;
    }
    out.roots[k] = eta / x;
    out.residuals[k] = detail::relative_condition_residual(eta / out.roots[k], A, B, C);
  }
  return out;
}

/// Thresholds for the slow/fast decision, configurable.
struct ClassifyThresholds {
  double intercept = 1e-10;
  double fit_residual = 1e-8;
};

struct LinearFit {
  double intercept;
  double slope;
  double max_residual;
};

/// Least-squares line gamma = intercept + slope * eta.
inline LinearFit fit_line(std::span<const std::pair<double, double>> samples) {
  const double n = static_cast<double>(samples.size());
  double se = 0.0, sg = 0.0;
  for (const auto& [e, g] : samples) {
    se += e;
    sg += g;
  }
  const double me = se / n, mg = sg / n;
  double see = 0.0, seg = 0.0;
  for (const auto& [e, g] : samples) {
    see += (e - me) * (e - me);
    seg += (e - me) * (g - mg);
  }
  const double slope = seg / see;
  const double intercept = mg - slope * me;
  double worst = 0.0;
  for (const auto& [e, g] : samples) worst = std::max(worst, std::abs(g - (intercept + slope * e)));
  return {intercept, slope, worst};
}

/// Regime from (eta, gamma) samples.
///
///   tau == 0                    -> non-dynamo-planar (planar incompressible flow)
///   gamma linear in eta through 0 -> slow
///   positive intercept          -> fast-candidate
///   otherwise                   -> degenerate (not classifiable)
inline DynamoRegime classify_dynamo(std::span<const std::pair<double, double>> samples, double tau,
                                    const ClassifyThresholds& th = {}) {
  if (samples.size() < 3) throw std::invalid_argument("classify_dynamo: need at least 3 samples");
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j)
      if (samples[i].first == samples[j].first)
        throw std::invalid_argument("classify_dynamo: eta samples must be distinct");

  if (tau == 0.0) return DynamoRegime::non_dynamo_planar;

  const LinearFit fit = fit_line(samples);
  if (std::abs(fit.intercept) < th.intercept && fit.max_residual < th.fit_residual) return DynamoRegime::slow;
  if (fit.intercept > th.intercept) return DynamoRegime::fast_candidate;
  return DynamoRegime::degenerate;
}

}  // namespace twistdyn
