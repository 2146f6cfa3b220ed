#pragma once

// Flow inside a twisted flux tube: tube metric and gradient, the compact
// radial operator, poloidal/toroidal balance residuals, the eigen-ratio
// quadratics, and the pressure, vorticity and alpha diagnostics.
//
// gamma plays two roles here: the eigenvalue of the radial flow equations and
// the growth rate of the induction equation L_m B = gamma B. One symbol is used
// for both.

#include "twistdyn/finite_difference.hpp"
#include "twistdyn/frenet_geometry.hpp"
#include "twistdyn/quadratic.hpp"

#include <boost/math/differentiation/autodiff.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace twistdyn {

/// Scalars shared by every flow diagnostic. All quantities dimensionless.
struct TubeParameters {
  double m = std::numbers::phi;  // poloidal/toroidal ratio v_theta / v_s
  double omega0 = 1.0;           // poloidal rotation rate
  double rho0 = 1.0;             // density
  double kappa0 = 1.0;           // Frenet curvature of the tube axis
  double gamma = 0.0;            // eigenvalue / growth rate

  void validate() const {
    if (!(rho0 > 0.0)) throw std::invalid_argument("TubeParameters: rho0 must be positive");
    if (!(kappa0 >= 0.0)) throw std::invalid_argument("TubeParameters: kappa0 must be non-negative");
  }
};

/// v = v_s(r) t + v_theta(r) e_theta (+ v_r(r) e_r, normally absent), sampled on a grid.
struct TubeFlowField {
  TubeParameters params;
  std::vector<double> v_s;
  std::vector<double> v_theta;
  std::vector<double> v_r;  // empty means identically zero
};

/// v_theta = m v_s at every node.
inline TubeFlowField make_eigen_ansatz_field(const TubeParameters& p, std::vector<double> v_s) {
  p.validate();
  TubeFlowField f{p, std::move(v_s), {}, {}};
  f.v_theta.resize(f.v_s.size());
  for (std::size_t i = 0; i < f.v_s.size(); ++i) f.v_theta[i] = p.m * f.v_s[i];
  return f;
}

/// v_theta = omega0 r at every node.
inline TubeFlowField make_rigid_rotation_field(const TubeParameters& p, const RadialGrid& grid,
                                               std::vector<double> v_s) {
  p.validate();
  if (v_s.size() != grid.size()) throw std::invalid_argument("make_rigid_rotation_field: size mismatch");
  TubeFlowField f{p, std::move(v_s), {}, {}};
  f.v_theta = grid.sample([&](double r) { return p.omega0 * r; });
  return f;
}

// ---------------------------------------------------------------------------
// Tube metric and gradient

/// dl^2 = dr^2 + r^2 dtheta^2 + K^2 ds^2
inline double tube_line_element(double r, double dr, double dtheta, double ds, double K) {
  if (!(r >= 0.0)) throw std::invalid_argument("tube_line_element: r must be non-negative");
  return dr * dr + r * r * dtheta * dtheta + K * K * ds * ds;
}

/// Tensor-product grid in (r, theta, s); each axis uniform with >= 3 nodes.
/// Flattened index is (i_r * n_theta + j_theta) * n_s + k_s.
class TubeGrid {
 public:
  TubeGrid(std::vector<double> r, std::vector<double> theta, std::vector<double> s)
      : r_(std::move(r)), theta_(std::move(theta)), s_(std::move(s)) {
    check_axis(r_, "r");
    check_axis(theta_, "theta");
    check_axis(s_, "s");
    if (!(r_.front() > 0.0)) throw std::invalid_argument("TubeGrid: r nodes must be positive");
  }

  static std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
  }

  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& s() const { return s_; }
  std::size_t size() const { return r_.size() * theta_.size() * s_.size(); }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * theta_.size() + j) * s_.size() + k;
  }

  template <class F>
  std::vector<double> sample(F&& f) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < r_.size(); ++i)
      for (std::size_t j = 0; j < theta_.size(); ++j)
        for (std::size_t k = 0; k < s_.size(); ++k) out[index(i, j, k)] = f(r_[i], theta_[j], s_[k]);
    return out;
  }

 private:
  static void check_axis(const std::vector<double>& v, const char* name) {
    if (v.size() < 3) throw std::invalid_argument(std::string("TubeGrid: axis ") + name + " needs >= 3 nodes");
    const double h = v[1] - v[0];
    if (!(h > 0.0)) throw std::invalid_argument(std::string("TubeGrid: axis ") + name + " not increasing");
    for (std::size_t i = 1; i < v.size(); ++i)
      if (std::abs((v[i] - v[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
        throw std::invalid_argument(std::string("TubeGrid: axis ") + name + " is not uniform");
  }

  std::vector<double> r_, theta_, s_;
};

/// Components of a gradient in the (t, e_theta, e_r) frame.
struct TubeGradient {
  std::vector<double> t;
  std::vector<double> theta;
  std::vector<double> r;
};

/// grad f = t K^-1 d_s f + e_theta r^-1 d_theta f + e_r d_r f, by central
/// differences (second-order one-sided at the axis ends).
inline TubeGradient tube_gradient(const TubeGrid& grid, std::span<const double> f,
                                  std::span<const double> K) {
  const std::size_t n = grid.size();
  if (f.size() != n || K.size() != n) throw std::invalid_argument("tube_gradient: size mismatch");
  for (double k : K)
    if (!(k > 0.0)) throw std::invalid_argument("tube_gradient: stretch factor K must be positive");

  const auto& rs = grid.r();
  const auto& ths = grid.theta();
  const auto& ss = grid.s();
  TubeGradient g{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  std::vector<double> line;

  // s direction
  line.resize(ss.size());
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = 0; j < ths.size(); ++j) {
      for (std::size_t k = 0; k < ss.size(); ++k) line[k] = f[grid.index(i, j, k)];
      const auto d = uniform_first_derivative(line, ss[1] - ss[0]);
      for (std::size_t k = 0; k < ss.size(); ++k) {
        const std::size_t idx = grid.index(i, j, k);
        g.t[idx] = d[k] / K[idx];
      }
    }

  // theta direction
  line.resize(ths.size());
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t k = 0; k < ss.size(); ++k) {
      for (std::size_t j = 0; j < ths.size(); ++j) line[j] = f[grid.index(i, j, k)];
      const auto d = uniform_first_derivative(line, ths[1] - ths[0]);
      for (std::size_t j = 0; j < ths.size(); ++j) g.theta[grid.index(i, j, k)] = d[j] / rs[i];
    }

  // r direction
  line.resize(rs.size());
  for (std::size_t j = 0; j < ths.size(); ++j)
    for (std::size_t k = 0; k < ss.size(); ++k) {
      for (std::size_t i = 0; i < rs.size(); ++i) line[i] = f[grid.index(i, j, k)];
      const auto d = uniform_first_derivative(line, rs[1] - rs[0]);
      for (std::size_t i = 0; i < rs.size(); ++i) g.r[grid.index(i, j, k)] = d[i];
    }
  return g;
}

// ---------------------------------------------------------------------------
// Compact radial operator L_m f = f'' + f'/r + 2 f / r^2

/// Sampled form, second-order finite differences.
inline std::vector<double> compact_operator_apply(std::span<const double> f, const RadialGrid& grid) {
  const Derivatives d = radial_derivatives(f, grid);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = grid[i];
    out[i] = d.second[i] + d.first[i] / r + 2.0 * f[i] / (r * r);
  }
  return out;
}

namespace detail {

/// Value, first and second derivative of f at x, exact to rounding (forward-mode AD).
/// f must accept a generic scalar; functions returning a plain number count as constant.
template <class F, class G = std::identity>
std::array<double, 3> jet2(F&& f, double x, G&& outer = {}) {
  using boost::math::differentiation::make_fvar;
  const auto var = make_fvar<double, 2>(x);
  const auto y = f(outer(var));
  if constexpr (std::is_arithmetic_v<std::decay_t<decltype(y)>>) {
    return {static_cast<double>(y), 0.0, 0.0};
  } else {
    return {static_cast<double>(y.derivative(0)), static_cast<double>(y.derivative(1)),
            static_cast<double>(y.derivative(2))};
  }
}

struct ExpOf {
  template <class T>
  auto operator()(const T& xi) const {
    using std::exp;
    return exp(xi);
  }
};

}  // namespace detail

/// Function form of L_m with exact derivatives. `f` is a generic callable,
/// e.g. [](auto r) { using std::sin; return sin(r); }.
template <class F>
std::vector<double> compact_operator_apply_exact(F&& f, const RadialGrid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const auto [v, d1, d2] = detail::jet2(f, r);
    out[i] = d2 + d1 / r + 2.0 * v / (r * r);
  }
  return out;
}

/// Max-norm of r^2 L_m f - (d^2 f / dr'^2 + 2 f), r' = ln r.
///
/// The left side differentiates f in r; the right side differentiates
/// g(r') = f(exp(r')) in r'. Both are exact to rounding, so the defect
/// measures the operator identity rather than discretisation error.
template <class F>
double log_radial_check(F&& f, const RadialGrid& grid) {
  double defect = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const auto [v, d1, d2] = detail::jet2(f, r);
    const double lhs = r * r * d2 + r * d1 + 2.0 * v;
    const auto [g, g1, g2] = detail::jet2(f, std::log(r), detail::ExpOf{});
    const double rhs = g2 + 2.0 * g;
    (void)g1;
    defect = std::max(defect, std::abs(lhs - rhs));
  }
  return defect;
}

// ---------------------------------------------------------------------------
// Radial balance residuals

/// How the radial equations are formed.
///
/// full: the poloidal/toroidal/pressure balances as written in r.
///
/// curvature_linearized: terms non-linear in the Frenet curvature are dropped
/// (the kappa0^2 term of the pressure balance) and the poloidal/toroidal
/// equations are taken in the log variable r' = ln r with every bracket
/// carrying one 1/r^2:
///   poloidal = [2 v_s + D v_theta + D^2 v_theta] / r^2 - gamma v_theta
///   toroidal = [(v_theta - v_s) + D v_s + D^2 v_s] / r^2 - gamma v_s
/// with D = d/dr'. Under v_theta = m v_s, poloidal - m toroidal reduces to
/// [2 - m(m-1)] v_s / r^2.
enum class ResidualForm { full, curvature_linearized };

namespace detail {

inline void check_field(const TubeFlowField& field, const RadialGrid& grid) {
  if (field.v_s.size() != grid.size() || field.v_theta.size() != grid.size())
    throw std::invalid_argument("tube flow: field is not populated on the grid");
}

}  // namespace detail

/// (2/r^2) v_s + (1/r) v_theta' + v_theta'' - gamma v_theta
inline std::vector<double> poloidal_residual(const TubeFlowField& field, const RadialGrid& grid,
                                             ResidualForm form = ResidualForm::full) {
  detail::check_field(field, grid);
  const double gamma = field.params.gamma;
  std::vector<double> out(grid.size());
  if (form == ResidualForm::full) {
    const Derivatives d = radial_derivatives(field.v_theta, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid[i];
      out[i] = 2.0 / (r * r) * field.v_s[i] + d.first[i] / r + d.second[i] - gamma * field.v_theta[i];
    }
  } else {
    const Derivatives d = log_radial_derivatives(field.v_theta, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid[i];
      out[i] = (2.0 * field.v_s[i] + d.first[i] + d.second[i]) / (r * r) - gamma * field.v_theta[i];
    }
  }
  return out;
}

/// (1/r)(v_theta - v_s) + (1/r) v_s' + v_s'' - gamma v_s
inline std::vector<double> toroidal_residual(const TubeFlowField& field, const RadialGrid& grid,
                                             ResidualForm form = ResidualForm::full) {
  detail::check_field(field, grid);
  const double gamma = field.params.gamma;
  std::vector<double> out(grid.size());
  if (form == ResidualForm::full) {
    const Derivatives d = radial_derivatives(field.v_s, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid[i];
      out[i] = (field.v_theta[i] - field.v_s[i]) / r + d.first[i] / r + d.second[i] - gamma * field.v_s[i];
    }
  } else {
    const Derivatives d = log_radial_derivatives(field.v_s, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid[i];
      out[i] = ((field.v_theta[i] - field.v_s[i]) + d.first[i] + d.second[i]) / (r * r) -
               gamma * field.v_s[i];
    }
  }
  return out;
}

/// dp/dr / rho0 - [v_s kappa0^2 - v_theta omega0 + (2/r)(v_s - v_theta) kappa0 v_s].
/// `p_gradient` holds dp/dr / rho0 at the nodes.
inline std::vector<double> radial_pressure_residual(const TubeFlowField& field,
                                                    std::span<const double> p_gradient,
                                                    const RadialGrid& grid,
                                                    ResidualForm form = ResidualForm::full) {
  detail::check_field(field, grid);
  if (p_gradient.size() != grid.size())
    throw std::invalid_argument("radial_pressure_residual: size mismatch");
  const auto& p = field.params;
  const double curvature_sq = form == ResidualForm::full ? p.kappa0 * p.kappa0 : 0.0;
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const double vs = field.v_s[i];
    const double vt = field.v_theta[i];
    const double rhs = vs * curvature_sq - vt * p.omega0 + 2.0 / r * (vs - vt) * p.kappa0 * vs;
    out[i] = p_gradient[i] - rhs;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Eigen-ratio quadratics

enum class Provenance { derived_elimination, paper_stated };

inline std::string_view to_string(Provenance p) {
  return p == Provenance::derived_elimination ? "derived-elimination" : "paper-stated";
}

/// c2 m^2 + c1 m + c0 = 0
struct QuadraticEigenproblem {
  double c2;
  double c1;
  double c0;
  Provenance provenance;

  /// Descending real part.
  std::pair<complex, complex> roots() const { return solve_quadratic(c2, c1, c0); }

  double evaluate(double m) const { return (c2 * m + c1) * m + c0; }
};

namespace detail {

/// Polynomial in m, coefficient k multiplies m^k.
struct Poly {
  std::vector<double> c;

  static Poly constant(double v) { return {{v}}; }
  static Poly m() { return {{0.0, 1.0}}; }

  bool is_zero() const {
    return std::all_of(c.begin(), c.end(), [](double x) { return x == 0.0; });
  }
  std::size_t degree() const {
    std::size_t d = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
      if (c[k] != 0.0) d = k;
    return d;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r{std::vector<double>(std::max(a.c.size(), b.c.size()), 0.0)};
    for (std::size_t k = 0; k < a.c.size(); ++k) r.c[k] += a.c[k];
    for (std::size_t k = 0; k < b.c.size(); ++k) r.c[k] += b.c[k];
    return r;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.c.empty() || b.c.empty()) return {};
    Poly r{std::vector<double>(a.c.size() + b.c.size() - 1, 0.0)};
    for (std::size_t i = 0; i < a.c.size(); ++i)
      for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + Poly::constant(-1.0) * b; }
};

/// Linear relation sum_k coeff[k] * term[k] = 0 over the terms
/// {v_s, D v_s, D^2 v_s, gamma v_s, v_theta, D v_theta, D^2 v_theta, gamma v_theta}.
struct LinearRelation {
  enum Term { vs, d_vs, dd_vs, g_vs, vt, d_vt, dd_vt, g_vt, kTerms };
  std::array<Poly, kTerms> coeff;

  LinearRelation() { coeff.fill(Poly::constant(0.0)); }

  /// v_theta -> m v_s (D and gamma commute with the constant m).
  LinearRelation substitute_eigen_ansatz() const {
    LinearRelation out = *this;
    const Term pairs[4][2] = {{vt, vs}, {d_vt, d_vs}, {dd_vt, dd_vs}, {g_vt, g_vs}};
    for (const auto& pr : pairs) {
      out.coeff[pr[1]] = out.coeff[pr[1]] + Poly::m() * out.coeff[pr[0]];
      out.coeff[pr[0]] = Poly::constant(0.0);
    }
    return out;
  }

  friend LinearRelation operator-(const LinearRelation& a, const LinearRelation& b) {
    LinearRelation r;
    for (std::size_t k = 0; k < kTerms; ++k) r.coeff[k] = a.coeff[k] - b.coeff[k];
    return r;
  }
  friend LinearRelation operator*(const Poly& p, const LinearRelation& a) {
    LinearRelation r;
    for (std::size_t k = 0; k < kTerms; ++k) r.coeff[k] = p * a.coeff[k];
    return r;
  }
};

/// Poloidal balance in the log variable: 2 v_s + D v_theta + D^2 v_theta - gamma v_theta = 0.
inline LinearRelation poloidal_relation() {
  LinearRelation r;
  r.coeff[LinearRelation::vs] = Poly::constant(2.0);
  r.coeff[LinearRelation::d_vt] = Poly::constant(1.0);
  r.coeff[LinearRelation::dd_vt] = Poly::constant(1.0);
  r.coeff[LinearRelation::g_vt] = Poly::constant(-1.0);
  return r;
}

/// Toroidal balance in the log variable: (v_theta - v_s) + D v_s + D^2 v_s - gamma v_s = 0.
inline LinearRelation toroidal_relation() {
  LinearRelation r;
  r.coeff[LinearRelation::vt] = Poly::constant(1.0);
  r.coeff[LinearRelation::vs] = Poly::constant(-1.0);
  r.coeff[LinearRelation::d_vs] = Poly::constant(1.0);
  r.coeff[LinearRelation::dd_vs] = Poly::constant(1.0);
  r.coeff[LinearRelation::g_vs] = Poly::constant(-1.0);
  return r;
}

}  // namespace detail

/// Symbolic elimination of the eigen-ansatz equations: substitute
/// v_theta = m v_s into both balances, subtract m times the toroidal one from
/// the poloidal one, check that every derivative and gamma term cancels, then
/// cancel v_s != 0 and normalise to a monic quadratic in m.
inline QuadraticEigenproblem eliminate_eigenvalue() {
  using detail::LinearRelation;
  const LinearRelation pol = detail::poloidal_relation().substitute_eigen_ansatz();
  const LinearRelation tor = detail::toroidal_relation().substitute_eigen_ansatz();
  const LinearRelation combined = pol - detail::Poly::m() * tor;

  for (std::size_t k = 0; k < LinearRelation::kTerms; ++k)
    if (k != LinearRelation::vs && !combined.coeff[k].is_zero())
      throw std::logic_error("eliminate_eigenvalue: derivative terms did not cancel");

  detail::Poly poly = combined.coeff[LinearRelation::vs];
  if (poly.degree() != 2) throw std::logic_error("eliminate_eigenvalue: expected a quadratic in m");
  poly.c.resize(3, 0.0);
  const double lead = poly.c[2];
  return {1.0, poly.c[1] / lead, poly.c[0] / lead, Provenance::derived_elimination};
}

/// m^2 - m - 1 = 0 as printed, golden-ratio roots.
inline QuadraticEigenproblem paper_eigenproblem() {
  return {1.0, -1.0, -1.0, Provenance::paper_stated};
}

// ---------------------------------------------------------------------------
// Profiles and diagnostics

/// v_s(r) = -ln r
inline std::vector<double> velocity_profile(const RadialGrid& grid) {
  return grid.sample([](double r) { return 0.0 - std::log(r); });  // +0 at r = 1
}

/// p(r) = rho0 [omega0^2 r - m kappa0 (ln r)^2]
inline double pressure_profile(double r, const TubeParameters& p) {
  if (!(r > 0.0)) throw std::invalid_argument("pressure_profile: r must be positive");
  const double lr = std::log(r);
  return p.rho0 * (p.omega0 * p.omega0 * r - p.m * p.kappa0 * lr * lr);
}

enum class PressureBehaviour { divergent, bounded };

inline std::string_view to_string(PressureBehaviour b) {
  return b == PressureBehaviour::divergent ? "divergent" : "bounded";
}

/// Divergent when |p| increases at every step of the decreasing radius
/// sequence and the last |p| exceeds ten times the first.
inline PressureBehaviour pressure_blowup_check(const TubeParameters& p, std::span<const double> r_sequence) {
  if (r_sequence.size() < 2) throw std::invalid_argument("pressure_blowup_check: need >= 2 radii");
  for (std::size_t i = 1; i < r_sequence.size(); ++i)
    if (!(r_sequence[i] < r_sequence[i - 1]))
      throw std::invalid_argument("pressure_blowup_check: radii must be strictly decreasing");

  std::vector<double> mag(r_sequence.size());
  for (std::size_t i = 0; i < r_sequence.size(); ++i) mag[i] = std::abs(pressure_profile(r_sequence[i], p));
  for (std::size_t i = 1; i < mag.size(); ++i)
    if (!(mag[i] > mag[i - 1])) return PressureBehaviour::bounded;
  return mag.back() > 10.0 * mag.front() ? PressureBehaviour::divergent : PressureBehaviour::bounded;
}

inline constexpr double kSecantGuard = 1e-9;

/// Omega = -(1/r) kappa0 v_s (cos theta t - sec theta b), returned as (t, n, b) components.
inline Vec3 vorticity(double r, double theta, double kappa0, double v_s) {
  if (!(r > 0.0)) throw std::invalid_argument("vorticity: r must be positive");
  const double off = std::remainder(theta - std::numbers::pi / 2.0, std::numbers::pi);
  if (std::abs(off) < kSecantGuard)
    throw std::domain_error("vorticity: sec(theta) is singular at theta = pi/2 + k pi");
  const double scale = -kappa0 * v_s / r;
  return {scale * std::cos(theta), 0.0, -scale / std::cos(theta)};
}

/// lambda with omega = lambda v, if the two are parallel to 1e-10 relative.
inline std::optional<double> beltrami_alignment(const Vec3& v, const Vec3& omega) {
  const double vn = v.norm();
  if (!(vn > 0.0)) throw std::invalid_argument("beltrami_alignment: zero velocity");
  if (v.cross(omega).norm() > 1e-10 * vn * std::max(omega.norm(), vn)) return std::nullopt;
  return omega.dot(v) / (vn * vn);
}

/// alpha = (1/r)(m - 1) kappa0^2 v_s^2
inline double alpha_effect(double r, double m, double kappa0, double v_s) {
  if (!(r > 0.0)) throw std::invalid_argument("alpha_effect: r must be positive");
  return (m - 1.0) * (kappa0 * kappa0) * (v_s * v_s) / r;
}

/// Max-norm of div v in thin-tube coordinates (K = 1). Profiles depend on r
/// only, so the theta and s terms vanish and div v = (1/r) d(r v_r)/dr.
inline double incompressibility_defect(const TubeFlowField& field, const RadialGrid& grid) {
  detail::check_field(field, grid);
  if (field.v_r.empty()) return 0.0;
  if (field.v_r.size() != grid.size()) throw std::invalid_argument("incompressibility_defect: size mismatch");
  std::vector<double> flux(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) flux[i] = grid[i] * field.v_r[i];
  const Derivatives d = radial_derivatives(flux, grid);
  double defect = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) defect = std::max(defect, std::abs(d.first[i] / grid[i]));
  return defect;
}

}  // namespace twistdyn
