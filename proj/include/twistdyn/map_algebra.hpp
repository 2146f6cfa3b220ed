#pragma once

// Linear torus maps: the cat map family, the twist/tube-twist shears, their
// spectral classification and frozen-field growth estimates.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace twistdyn {

using complex = std::complex<double>;

/// Real 2x2 matrix acting on T^2, stored row-major: [[a, b], [c, d]].
struct LinearTorusMap {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  LinearTorusMap() = default;
  LinearTorusMap(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d))
      throw std::invalid_argument("LinearTorusMap: entries must be finite");
  }

  double determinant() const { return a * d - b * c; }
  double trace() const { return a + d; }

  friend bool operator==(const LinearTorusMap&, const LinearTorusMap&) = default;
};

enum class MapKind { hyperbolic, parabolic, elliptic };

inline std::string_view to_string(MapKind kind) {
  switch (kind) {
    case MapKind::hyperbolic: return "hyperbolic";
    case MapKind::parabolic: return "parabolic";
    case MapKind::elliptic: return "elliptic";
  }
  return "unknown";
}

struct MapClassification {
  MapKind kind;
  complex lambda1;  // |lambda1| >= |lambda2|
  complex lambda2;
  double determinant;
  double trace;
};

/// Point on the unit torus. Coordinates are always held in [0,1).
class TorusPoint {
 public:
  TorusPoint() = default;
  TorusPoint(double x, double y) : x_(reduce(x)), y_(reduce(y)) {}

  double x() const { return x_; }
  double y() const { return y_; }

  /// Floor-based reduction so negative inputs land in [0,1) as well.
  static double reduce(double v) {
    double r = v - std::floor(v);
    // v slightly below an integer can round up to exactly 1.
    if (r >= 1.0) r = 0.0;
    return r;
  }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
};

/// Tangent (field) vector. Never reduced mod 1.
struct FieldVector {
  double u = 0.0;
  double v = 0.0;

  double norm() const { return std::hypot(u, v); }
  friend bool operator==(const FieldVector&, const FieldVector&) = default;
};

inline constexpr double kParabolicTolerance = 1e-12;

// ---------------------------------------------------------------------------
// Named maps

inline LinearTorusMap make_cat_map() { return {2.0, 1.0, 1.0, 1.0}; }

/// Cat map with integer shear K: [[1+K^2, K], [K, 1]].
inline LinearTorusMap make_cat_shear_map(int K) {
  const double k = static_cast<double>(K);
  return {1.0 + k * k, k, k, 1.0};
}

inline LinearTorusMap make_twist_map() { return {1.0, 1.0, 0.0, 1.0}; }

/// Twisted-tube map with constant torsion tau0 and constant stretch K0.
inline LinearTorusMap make_tube_twist_map(double tau0, double K0) {
  if (!(K0 > 0.0))
    throw std::invalid_argument("make_tube_twist_map: stretch K0 must be positive");
  return {1.0, -tau0, 0.0, K0};
}

/// Thin-tube limit (K0 = 1) of the tube-twist map.
inline LinearTorusMap make_thin_tube_map(double tau0) { return make_tube_twist_map(tau0, 1.0); }

// ---------------------------------------------------------------------------
// Spectrum

/// Closed-form eigenvalues of the 2x2 characteristic quadratic.
///
/// The discriminant is taken as ((a-d)/2)^2 + bc, which is equal to
/// (tr/2)^2 - det but does not cancel when the eigenvalues are close. The
/// larger-magnitude real root is h + sign(h) sqrt(disc); the other is det/that,
/// so the product is reproduced to rounding.
inline MapClassification classify(const LinearTorusMap& m) {
  const double tr = m.trace();
  const double det = m.determinant();
  const double h = 0.5 * tr;
  const double half_diff = 0.5 * (m.a - m.d);
  const double disc = half_diff * half_diff + m.b * m.c;

  complex l1, l2;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    const double q = h + std::copysign(s, h);
    if (q == 0.0) {
      l1 = l2 = complex(0.0);
    } else {
      l1 = complex(q);
      l2 = complex(det / q);
    }
  } else {
    const double s = std::sqrt(-disc);
    l1 = complex(h, s);
    l2 = complex(h, -s);
  }
  if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);

  const double at = std::abs(tr);
  MapKind kind;
  if (std::abs(at - 2.0) <= kParabolicTolerance)
    kind = MapKind::parabolic;
  else if (at > 2.0)
    kind = MapKind::hyperbolic;
  else
    kind = MapKind::elliptic;

  return {kind, l1, l2, det, tr};
}

// ---------------------------------------------------------------------------
// Dynamics

inline TorusPoint apply(const LinearTorusMap& m, const TorusPoint& p) {
  return {m.a * p.x() + m.b * p.y(), m.c * p.x() + m.d * p.y()};
}

/// [p, Mp, ..., M^n p]
inline std::vector<TorusPoint> iterate_orbit(const LinearTorusMap& m, TorusPoint p, std::size_t n) {
  std::vector<TorusPoint> orbit;
  orbit.reserve(n + 1);
  orbit.push_back(p);
  for (std::size_t i = 0; i < n; ++i) {
    p = apply(m, p);
    orbit.push_back(p);
  }
  return orbit;
}

inline FieldVector multiply(const LinearTorusMap& m, const FieldVector& f) {
  return {m.a * f.u + m.b * f.v, m.c * f.u + m.d * f.v};
}

/// M^n f, frozen-field transport of a tangent vector.
inline FieldVector transport_field(const LinearTorusMap& m, FieldVector f, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) f = multiply(m, f);
  return f;
}

namespace detail {

inline void check_growth_args(const FieldVector& f, std::size_t n) {
  if (n == 0) throw std::invalid_argument("growth rate: need n >= 1");
  if (!(f.norm() > 0.0)) throw std::invalid_argument("growth rate: zero seed vector");
}

}  // namespace detail

/// Mean log growth (1/n) ln(|M^n f| / |f|).
///
/// Accumulated with per-step renormalisation so large n does not overflow.
inline double growth_rate(const LinearTorusMap& m, const FieldVector& f, std::size_t n) {
  detail::check_growth_args(f, n);
  const double n0 = f.norm();
  FieldVector g{f.u / n0, f.v / n0};
  double log_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g = multiply(m, g);
    const double len = g.norm();
    if (len == 0.0) return -INFINITY;
    log_sum += std::log(len);
    g = {g.u / len, g.v / len};
  }
  return log_sum / static_cast<double>(n);
}

/// Per-step log growth ln(|M^n f| / |M^{n-1} f|), the power-iteration estimate
/// of ln|lambda1|. Converges geometrically for hyperbolic maps.
inline double step_growth_rate(const LinearTorusMap& m, const FieldVector& f, std::size_t n) {
  detail::check_growth_args(f, n);
  const double n0 = f.norm();
  FieldVector g{f.u / n0, f.v / n0};
  double last = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g = multiply(m, g);
    const double len = g.norm();
    if (len == 0.0) return -INFINITY;
    last = std::log(len);
    g = {g.u / len, g.v / len};
  }
  return last;
}

// ---------------------------------------------------------------------------

/// Squared line element exp(-lambda z) dp^2 + exp(lambda z) dq^2 + dz^2 of the
/// uniformly stretching metric on T^2 x [0,1].
inline double arnold_line_element(double lambda, double z, double dp, double dq, double dz) {
  return std::exp(-lambda * z) * dp * dp + std::exp(lambda * z) * dq * dq + dz * dz;
}

}  // namespace twistdyn
