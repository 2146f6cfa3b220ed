#pragma once

// Radial grids and second-order finite differences on them.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace twistdyn {

enum class GridSpacing { uniform, logarithmic };

inline std::string_view to_string(GridSpacing s) {
  return s == GridSpacing::uniform ? "uniform" : "log";
}

/// Radial nodes on [r_min, r_max], r_min > 0. The grid is uniform in its
/// natural coordinate xi: xi = r for uniform spacing, xi = ln r for log spacing.
class RadialGrid {
 public:
  static constexpr std::size_t kMinNodes = 16;

  RadialGrid(double r_min, double r_max, std::size_t count, GridSpacing spacing)
      : r_min_(r_min), r_max_(r_max), spacing_(spacing) {
    if (!(r_min > 0.0)) throw std::invalid_argument("RadialGrid: r_min must be positive");
    if (!(r_max > r_min)) throw std::invalid_argument("RadialGrid: r_max must exceed r_min");
    if (count < kMinNodes) throw std::invalid_argument("RadialGrid: need at least 16 nodes");

    const double xi0 = coordinate_of(r_min);
    const double xi1 = coordinate_of(r_max);
    step_ = (xi1 - xi0) / static_cast<double>(count - 1);
    nodes_.resize(count);
    for (std::size_t i = 0; i < count; ++i)
      nodes_[i] = radius_of(xi0 + static_cast<double>(i) * step_);
    nodes_.front() = r_min;
    nodes_.back() = r_max;
    for (std::size_t i = 1; i < count; ++i)
      if (!(nodes_[i] > nodes_[i - 1]))
        throw std::invalid_argument("RadialGrid: nodes are not strictly increasing");
  }

  static RadialGrid logarithmic(double r_min, double r_max, std::size_t count) {
    return {r_min, r_max, count, GridSpacing::logarithmic};
  }
  static RadialGrid uniform(double r_min, double r_max, std::size_t count) {
    return {r_min, r_max, count, GridSpacing::uniform};
  }

  const std::vector<double>& nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  GridSpacing spacing() const { return spacing_; }
  /// Step in the natural coordinate.
  double step() const { return step_; }

  template <class F>
  std::vector<double> sample(F&& f) const {
    std::vector<double> out(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) out[i] = f(nodes_[i]);
    return out;
  }

 private:
  double coordinate_of(double r) const { return spacing_ == GridSpacing::uniform ? r : std::log(r); }
  double radius_of(double xi) const { return spacing_ == GridSpacing::uniform ? xi : std::exp(xi); }

  double r_min_;
  double r_max_;
  GridSpacing spacing_;
  double step_ = 0.0;
  std::vector<double> nodes_;
};

struct Derivatives {
  std::vector<double> first;
  std::vector<double> second;
};

/// Uniform-step derivatives: three-point central stencils in the interior,
/// second-order one-sided stencils (3 points for f', 4 points for f'') at the ends.
inline Derivatives uniform_derivatives(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 4) throw std::invalid_argument("uniform_derivatives: need at least 4 samples");
  Derivatives d{std::vector<double>(n), std::vector<double>(n)};
  const double inv2h = 1.0 / (2.0 * h);
  const double invh2 = 1.0 / (h * h);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d.first[i] = (f[i + 1] - f[i - 1]) * inv2h;
    d.second[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * invh2;
  }
  d.first[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
  d.first[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2h;
  d.second[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * invh2;
  d.second[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * invh2;
  return d;
}

/// First derivative only, for short axes (>= 3 samples).
inline std::vector<double> uniform_first_derivative(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 3) throw std::invalid_argument("uniform_first_derivative: need at least 3 samples");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

/// d/dr and d^2/dr^2 of grid samples. Differences are taken in the grid's
/// natural coordinate and mapped back by the chain rule, so on a log grid
/// f_r = f_xi / r and f_rr = (f_xixi - f_xi) / r^2.
inline Derivatives radial_derivatives(std::span<const double> f, const RadialGrid& grid) {
  if (f.size() != grid.size()) throw std::invalid_argument("radial_derivatives: size mismatch");
  Derivatives d = uniform_derivatives(f, grid.step());
  if (grid.spacing() == GridSpacing::logarithmic) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double r = grid[i];
      const double fx = d.first[i];
      const double fxx = d.second[i];
      d.first[i] = fx / r;
      d.second[i] = (fxx - fx) / (r * r);
    }
  }
  return d;
}

/// d/dr' and d^2/dr'^2 with r' = ln r.
inline Derivatives log_radial_derivatives(std::span<const double> f, const RadialGrid& grid) {
  if (f.size() != grid.size()) throw std::invalid_argument("log_radial_derivatives: size mismatch");
  Derivatives d = uniform_derivatives(f, grid.step());
  if (grid.spacing() == GridSpacing::uniform) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double r = grid[i];
      const double fr = d.first[i];
      const double frr = d.second[i];
      d.first[i] = r * fr;
      d.second[i] = r * r * frr + r * fr;
    }
  }
  return d;
}

}  // namespace twistdyn
