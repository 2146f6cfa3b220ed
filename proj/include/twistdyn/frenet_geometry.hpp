#pragma once

// Frenet-Serret frames along a curve: arclength and time evolution, the
// torsion twist angle and the tube stretch factor.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace twistdyn {

using Vec3 = Eigen::Vector3d;

inline constexpr double kFrameTolerance = 1e-8;

struct FrenetFrame {
  Vec3 t = Vec3::UnitX();
  Vec3 n = Vec3::UnitY();
  Vec3 b = Vec3::UnitZ();

  static FrenetFrame canonical() { return {}; }

  /// max{|t.n|, |t.b|, |n.b|, ||t|-1|, ||n|-1|, ||b|-1|}
  double orthonormality_defect() const {
    return std::max({std::abs(t.dot(n)), std::abs(t.dot(b)), std::abs(n.dot(b)),
                     std::abs(t.norm() - 1.0), std::abs(n.norm() - 1.0),
                     std::abs(b.norm() - 1.0)});
  }

  /// Orthonormal and right-handed (b = t x n) within tol.
  bool is_valid(double tol = kFrameTolerance) const {
    return orthonormality_defect() <= tol && (t.cross(n) - b).lpNorm<Eigen::Infinity>() <= tol;
  }
};

/// d/ds or d/dt of the three frame vectors.
struct FrameDerivative {
  Vec3 dt = Vec3::Zero();
  Vec3 dn = Vec3::Zero();
  Vec3 db = Vec3::Zero();
};

/// Curvature, torsion and (optionally) curvature derivative as functions of arclength.
struct CurveProfile {
  std::function<double(double)> kappa;
  std::function<double(double)> tau;
  /// Empty means: central finite difference of kappa.
  std::function<double(double)> kappa_prime;
  /// Set when tau is a known constant; twist integrals are then exact.
  std::optional<double> constant_tau;

  static CurveProfile constant(double kappa0, double tau0) {
    CurveProfile p;
    p.kappa = [kappa0](double) { return kappa0; };
    p.tau = [tau0](double) { return tau0; };
    p.kappa_prime = [](double) { return 0.0; };
    p.constant_tau = tau0;
    return p;
  }

  double curvature(double s) const { return kappa(s); }
  double torsion(double s) const { return constant_tau ? *constant_tau : tau(s); }

  double curvature_derivative(double s) const {
    if (kappa_prime) return kappa_prime(s);
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(s));
    return (kappa(s + h) - kappa(s - h)) / (2.0 * h);
  }
};

/// Arclength derivative: t' = kappa n, n' = -kappa t + tau b, b' = -tau n.
inline FrameDerivative frenet_rhs(const FrenetFrame& f, double kappa, double tau) {
  return {kappa * f.n, -kappa * f.t + tau * f.b, -tau * f.n};
}

/// Time derivative: t_dot = kappa' b - kappa tau n, n_dot = kappa tau t, b_dot = -kappa' t.
inline FrameDerivative time_evolution_rhs(const FrenetFrame& f, double kappa, double kappa_prime,
                                          double tau) {
  return {kappa_prime * f.b - kappa * tau * f.n, kappa * tau * f.t, -kappa_prime * f.t};
}

struct FrameSample {
  double s;
  FrenetFrame frame;
};

/// Logged whenever an output frame drifted past tolerance and was projected back.
struct ReorthonormalizationEvent {
  double s;
  double defect_before;
};

struct FrameTrajectory {
  std::vector<FrameSample> samples;
  std::vector<ReorthonormalizationEvent> events;

  double max_defect() const {
    double m = 0.0;
    for (const auto& smp : samples) m = std::max(m, smp.frame.orthonormality_defect());
    return m;
  }
};

namespace detail {

inline FrenetFrame axpy(const FrenetFrame& f, double h, const FrameDerivative& d) {
  return {f.t + h * d.dt, f.n + h * d.dn, f.b + h * d.db};
}

inline FrenetFrame gram_schmidt(const FrenetFrame& f) {
  FrenetFrame g;
  g.t = f.t.normalized();
  g.n = (f.n - f.n.dot(g.t) * g.t).normalized();
  g.b = g.t.cross(g.n);
  return g;
}

inline FrenetFrame rk4_step(const CurveProfile& profile, const FrenetFrame& f, double s, double h) {
  auto rhs = [&](const FrenetFrame& x, double at) {
    const double k = profile.curvature(at);
    if (k < 0.0) throw std::invalid_argument("integrate_frame: negative curvature");
    return frenet_rhs(x, k, profile.torsion(at));
  };
  const FrameDerivative k1 = rhs(f, s);
  const FrameDerivative k2 = rhs(axpy(f, 0.5 * h, k1), s + 0.5 * h);
  const FrameDerivative k3 = rhs(axpy(f, 0.5 * h, k2), s + 0.5 * h);
  const FrameDerivative k4 = rhs(axpy(f, h, k3), s + h);
  const double w = h / 6.0;
  return {f.t + w * (k1.dt + 2.0 * k2.dt + 2.0 * k3.dt + k4.dt),
          f.n + w * (k1.dn + 2.0 * k2.dn + 2.0 * k3.dn + k4.dn),
          f.b + w * (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db)};
}

}  // namespace detail

/// Fixed-step classical RK4 integration of the Frenet-Serret system from
/// s_start to s_end. A final partial step lands exactly on s_end. Output
/// frames are projected back to orthonormal only when their defect exceeds
/// 1e-8, and every such projection is recorded in `events`.
inline FrameTrajectory integrate_frame(const CurveProfile& profile, double s_start, double s_end,
                                       double step, const FrenetFrame& initial) {
  if (!(step > 0.0)) throw std::invalid_argument("integrate_frame: step must be positive");
  if (!(s_end >= s_start)) throw std::invalid_argument("integrate_frame: s_end < s_start");
  if (!initial.is_valid()) throw std::invalid_argument("integrate_frame: initial frame is not orthonormal");

  const double span = s_end - s_start;
  auto full_steps = static_cast<std::size_t>(std::floor(span / step));
  const bool partial = span - static_cast<double>(full_steps) * step > 1e-12 * step;

  FrameTrajectory out;
  out.samples.reserve(full_steps + 2);
  out.samples.push_back({s_start, initial});

  FrenetFrame f = initial;
  auto advance = [&](double s0, double h, double s1) {
    f = detail::rk4_step(profile, f, s0, h);
    const double defect = f.orthonormality_defect();
    if (defect > kFrameTolerance) {
      out.events.push_back({s1, defect});
      f = detail::gram_schmidt(f);
    }
    out.samples.push_back({s1, f});
  };

  for (std::size_t k = 0; k < full_steps; ++k) {
    const double s0 = s_start + static_cast<double>(k) * step;
    const double s1 = s_start + static_cast<double>(k + 1) * step;
    advance(s0, s1 - s0, s1);
  }
  if (partial) {
    const double s0 = s_start + static_cast<double>(full_steps) * step;
    advance(s0, s_end - s0, s_end);
  }
  return out;
}

/// Integral of the torsion over [a, b]. Exact for constant torsion, otherwise
/// composite Simpson with an even interval count of at least 100.
inline double torsion_integral(const CurveProfile& profile, double a, double b) {
  if (profile.constant_tau) return *profile.constant_tau * (b - a);
  if (a == b) return 0.0;
  auto intervals = static_cast<std::size_t>(std::ceil(std::abs(b - a) / 1e-3));
  intervals = std::max<std::size_t>(intervals, 100);
  if (intervals % 2) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double sum = profile.tau(a) + profile.tau(b);
  for (std::size_t i = 1; i < intervals; ++i)
    sum += (i % 2 ? 4.0 : 2.0) * profile.tau(a + static_cast<double>(i) * h);
  return sum * h / 3.0;
}

/// theta(s) = theta_R - int_0^s tau(u) du
inline double twist_angle(double theta_R, const CurveProfile& profile, double s) {
  return theta_R - torsion_integral(profile, 0.0, s);
}

/// Angle in [0, pi] of the rotation R carrying frame `from` onto frame `to`.
inline double frame_rotation_angle(const FrenetFrame& from, const FrenetFrame& to) {
  Eigen::Matrix3d F0, F1;
  F0 << from.t, from.n, from.b;
  F1 << to.t, to.n, to.b;
  const Eigen::Matrix3d R = F1 * F0.transpose();
  const Vec3 axis_sin(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  return std::atan2(0.5 * axis_sin.norm(), 0.5 * (R.trace() - 1.0));
}

/// Unwrapped rotation angle along a trajectory: sum of the angles between
/// consecutive samples. Matches the total angle only while each step rotates
/// by less than pi.
inline double accumulated_rotation_angle(const FrameTrajectory& traj) {
  double total = 0.0;
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    total += frame_rotation_angle(traj.samples[i - 1].frame, traj.samples[i].frame);
  return total;
}

struct StretchFactor {
  double value;
  /// Set when value <= 0: the tube radius exceeds the local curvature radius.
  bool degenerate;
};

/// K = 1 - r kappa cos(theta)
inline StretchFactor stretch_factor(double r, double kappa, double theta) {
  if (!(r >= 0.0)) throw std::invalid_argument("stretch_factor: r must be non-negative");
  const double k = 1.0 - r * kappa * std::cos(theta);
  return {k, k <= 0.0};
}

}  // namespace twistdyn
