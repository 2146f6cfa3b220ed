#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

namespace twistdyn {

using complex = std::complex<double>;

/// Orders two complex numbers by descending real part, then descending imaginary part.
inline std::pair<complex, complex> order_by_real_part(complex a, complex b) {
  if (a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()))
    std::swap(a, b);
  return {a, b};
}

/// Roots of c2 x^2 + c1 x + c0 = 0 in closed form, complex when the
/// discriminant is negative. Uses the cancellation-free pairing
/// q = -(c1 + sign(c1) sqrt(disc)) / 2, x = q/c2, c0/q for real roots.
/// Roots come back in descending real-part order.
inline std::pair<complex, complex> solve_quadratic(double c2, double c1, double c0) {
  if (c2 == 0.0)
    throw std::invalid_argument("solve_quadratic: leading coefficient is zero");

  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double q = -0.5 * (c1 + std::copysign(root, c1));
    if (q == 0.0)
      return {complex(0.0), complex(0.0)};
    return order_by_real_part(complex(q / c2), complex(c0 / q));
  }

  const double re = -c1 / (2.0 * c2);
  const double im = std::sqrt(-disc) / (2.0 * std::abs(c2));
  return {complex(re, im), complex(re, -im)};
}

}  // namespace twistdyn
