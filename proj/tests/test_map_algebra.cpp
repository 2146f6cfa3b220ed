#include "twistdyn/map_algebra.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace twistdyn;
using Catch::Approx;

namespace {

bool same_entries(const LinearTorusMap& m, double a, double b, double c, double d) {
  return m.a == a && m.b == b && m.c == c && m.d == d;
}

const double kLnGolden2 = std::log((3.0 + std::sqrt(5.0)) / 2.0);

}  // namespace

TEST_CASE("named maps have the expected entries", "[map_algebra]") {
  CHECK(same_entries(make_cat_map(), 2, 1, 1, 1));
  CHECK(make_cat_map().determinant() == 1.0);
  CHECK(make_cat_map().trace() == 3.0);

  CHECK(make_cat_shear_map(1) == make_cat_map());
  CHECK(same_entries(make_cat_shear_map(0), 1, 0, 0, 1));
  CHECK(same_entries(make_cat_shear_map(2), 5, 2, 2, 1));
  CHECK(make_cat_shear_map(2).determinant() == 1.0);

  CHECK(same_entries(make_twist_map(), 1, 1, 0, 1));

  CHECK(make_tube_twist_map(-1.0, 1.0) == make_twist_map());
  CHECK(same_entries(make_tube_twist_map(0.0, 1.0), 1, 0, 0, 1));
  CHECK(same_entries(make_tube_twist_map(2.0, 3.0), 1, -2, 0, 3));

  CHECK(make_thin_tube_map(-1.0) == make_twist_map());
  CHECK(same_entries(make_thin_tube_map(0.0), 1, 0, 0, 1));
  CHECK(make_thin_tube_map(0.37) == make_tube_twist_map(0.37, 1.0));
}

TEST_CASE("degenerate stretch and non-finite entries are rejected", "[map_algebra]") {
  CHECK_THROWS_AS(make_tube_twist_map(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_tube_twist_map(1.0, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(LinearTorusMap(1.0, NAN, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LinearTorusMap(INFINITY, 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("area preservation of the named maps", "[map_algebra][property]") {
  CHECK(std::abs(make_cat_map().determinant() - 1.0) < 1e-12);
  CHECK(std::abs(make_twist_map().determinant() - 1.0) < 1e-12);
  for (int K = -5; K <= 5; ++K) {
    CAPTURE(K);
    CHECK(std::abs(make_cat_shear_map(K).determinant() - 1.0) < 1e-12);
  }
  for (double tau0 : {-3.5, -1.0, 0.0, 0.25, 7.0}) CHECK(std::abs(make_thin_tube_map(tau0).determinant() - 1.0) < 1e-12);
}

TEST_CASE("classification of the cat, twist and rotation maps", "[map_algebra]") {
  const auto cat = classify(make_cat_map());
  CHECK(cat.kind == MapKind::hyperbolic);
  CHECK(cat.lambda1.real() == Approx(2.6180340).margin(1e-7));
  CHECK(cat.lambda2.real() == Approx(0.3819660).margin(1e-7));
  CHECK(cat.lambda1.imag() == 0.0);

  const auto twist = classify(make_twist_map());
  CHECK(twist.kind == MapKind::parabolic);
  CHECK(twist.lambda1 == complex(1.0));
  CHECK(twist.lambda2 == complex(1.0));

  const auto rot = classify(LinearTorusMap(0, -1, 1, 0));
  CHECK(rot.kind == MapKind::elliptic);
  CHECK(std::abs(rot.lambda1 - complex(0, 1)) < 1e-15);
  CHECK(std::abs(rot.lambda2 - complex(0, -1)) < 1e-15);

  const auto tube = classify(make_tube_twist_map(2.0, 3.0));
  CHECK(tube.lambda1 == complex(3.0));
  CHECK(tube.lambda2 == complex(1.0));

  for (int K = 1; K <= 5; ++K) {
    const auto c = classify(make_cat_shear_map(K));
    CHECK(std::abs(c.lambda1 * c.lambda2 - 1.0) < 1e-12);
  }
}

TEST_CASE("classify reproduces trace and determinant for random matrices", "[map_algebra][property]") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const LinearTorusMap m(u(rng), u(rng), u(rng), u(rng));
    const auto c = classify(m);
    CAPTURE(m.a, m.b, m.c, m.d);
    REQUIRE(std::abs(c.lambda1 * c.lambda2 - m.determinant()) < 1e-12);
    REQUIRE(std::abs(c.lambda1 + c.lambda2 - m.trace()) < 1e-12);
    REQUIRE(std::abs(c.lambda1) >= std::abs(c.lambda2));
    const double at = std::abs(m.trace());
    if (std::abs(at - 2.0) > 1e-12) REQUIRE((c.kind == MapKind::hyperbolic) == (at > 2.0));
  }
}

TEST_CASE("apply reduces mod 1", "[map_algebra]") {
  CHECK(apply(make_cat_map(), TorusPoint(0, 0)) == TorusPoint(0, 0));
  const auto p = apply(make_cat_map(), TorusPoint(0.5, 0.5));
  CHECK(p.x() == 0.5);
  CHECK(p.y() == 0.0);
  const auto q = apply(make_twist_map(), TorusPoint(0.25, 0.5));
  CHECK(q.x() == 0.75);
  CHECK(q.y() == 0.5);

  const TorusPoint neg(-0.25, -1e-20);
  CHECK(neg.x() == 0.75);
  CHECK(neg.y() == 0.0);  // 1 - 1e-20 rounds to 1, folded back to 0
}

TEST_CASE("apply output stays in the unit square", "[map_algebra][property]") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> ki(-5, 5);
  std::uniform_real_distribution<double> ur(-10.0, 10.0), up(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const LinearTorusMap m = i % 2 ? LinearTorusMap(ki(rng), ki(rng), ki(rng), ki(rng))
                                   : LinearTorusMap(ur(rng), ur(rng), ur(rng), ur(rng));
    const auto p = apply(m, TorusPoint(up(rng), up(rng)));
    REQUIRE(p.x() >= 0.0);
    REQUIRE(p.x() < 1.0);
    REQUIRE(p.y() >= 0.0);
    REQUIRE(p.y() < 1.0);
  }
}

TEST_CASE("orbits", "[map_algebra]") {
  const auto o0 = iterate_orbit(make_cat_map(), TorusPoint(0.3, 0.4), 0);
  REQUIRE(o0.size() == 1);
  CHECK(o0[0] == TorusPoint(0.3, 0.4));

  const auto fixed = iterate_orbit(make_cat_map(), TorusPoint(0, 0), 5);
  REQUIRE(fixed.size() == 6);
  for (const auto& p : fixed) CHECK(p == TorusPoint(0, 0));

  const auto tw = iterate_orbit(make_twist_map(), TorusPoint(0, 0.5), 2);
  REQUIRE(tw.size() == 3);
  CHECK(tw[0] == TorusPoint(0, 0.5));
  CHECK(tw[1] == TorusPoint(0.5, 0.5));
  CHECK(tw[2] == TorusPoint(0, 0.5));
}

TEST_CASE("frozen-field transport", "[map_algebra]") {
  const FieldVector f{0.3, -1.7};
  CHECK(transport_field(make_cat_map(), f, 0) == f);
  CHECK(transport_field(make_cat_map(), {0, 1}, 1) == FieldVector{1, 1});
  CHECK(transport_field(make_twist_map(), {0, 1}, 3) == FieldVector{3, 1});
}

TEST_CASE("transport composes", "[map_algebra][property]") {
  const auto cat = make_cat_map();
  const FieldVector f{0.6, -0.2};
  for (std::size_t n = 0; n <= 60; n += 7)
    for (std::size_t m = 0; n + m <= 60; m += 5) {
      const auto direct = transport_field(cat, f, n + m);
      const auto split = transport_field(cat, transport_field(cat, f, n), m);
      const double rel = std::hypot(direct.u - split.u, direct.v - split.v) / direct.norm();
      CAPTURE(n, m);
      REQUIRE(rel < 1e-10);
    }
}

TEST_CASE("mean log growth matches an exact integer oracle", "[map_algebra]") {
  // Integer iteration of the cat map on (0,1) (Fibonacci entries), exact in 128 bits.
  auto exact_mean_growth = [](int n) {
    __int128 u = 0, v = 1;
    for (int i = 0; i < n; ++i) {
      const __int128 nu = 2 * u + v, nv = u + v;
      u = nu;
      v = nv;
    }
    const long double lu = static_cast<long double>(u), lv = static_cast<long double>(v);
    return static_cast<double>(0.5L * std::log(lu * lu + lv * lv) / n);
  };
  for (int n : {1, 5, 10, 20, 50}) {
    CAPTURE(n);
    CHECK(growth_rate(make_cat_map(), {0, 1}, n) == Approx(exact_mean_growth(n)).epsilon(1e-13));
  }
  // 50 steps: 0.949564..., about 0.0129 below ln(lambda1).
  CHECK(growth_rate(make_cat_map(), {0, 1}, 50) == Approx(0.9495643423064404).margin(1e-12));
}

TEST_CASE("growth estimators", "[map_algebra]") {
  CHECK(std::abs(step_growth_rate(make_cat_map(), {0, 1}, 50) - 0.962424) < 1e-6);
  CHECK(std::abs(step_growth_rate(make_cat_map(), {0, 1}, 50) - kLnGolden2) < 1e-12);

  CHECK(std::abs(growth_rate(LinearTorusMap(), {0.3, 0.4}, 17)) < 1e-15);

  const double tw = growth_rate(make_twist_map(), {0, 1}, 1000);
  CHECK(tw < 0.01);
  CHECK(tw == Approx(0.5 * std::log(1e6 + 1.0) / 1000.0).epsilon(1e-12));

  CHECK_THROWS_AS(growth_rate(make_cat_map(), {0, 0}, 10), std::invalid_argument);
  CHECK_THROWS_AS(growth_rate(make_cat_map(), {0, 1}, 0), std::invalid_argument);
}

TEST_CASE("mean growth converges like C/n", "[map_algebra][property]") {
  for (std::size_t n : {10, 20, 50, 100}) {
    const double C = std::abs(growth_rate(make_cat_map(), {0, 1}, n) - kLnGolden2) * static_cast<double>(n);
    CAPTURE(n, C);
    CHECK(C < 5.0);
  }
}

TEST_CASE("stretching metric line element", "[map_algebra]") {
  CHECK(arnold_line_element(0, 0.3, 1, 1, 1) == 3.0);
  CHECK(arnold_line_element(1, 1, 1, 0, 0) == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(arnold_line_element(1, 1, 0, 1, 0) == Approx(std::numbers::e).epsilon(1e-15));

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    double dp = u(rng), dq = u(rng), dz = u(rng);
    if (i % 3 == 0) dp = dq = 0.0;
    REQUIRE(arnold_line_element(u(rng), u(rng), dp, dq, dz) > 0.0);
  }
}
