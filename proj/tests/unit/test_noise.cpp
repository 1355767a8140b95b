#include <doctest.h>

#include <cmath>
#include <numbers>

#include "effdyn/noise.hpp"

using namespace effdyn;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
        C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             {0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             {0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("plan step count and spacing") {
  const auto p = NoisePlan::from_dt(1, 1.0, 5e-4);
  CHECK(p.steps() == 2000);
  CHECK(std::abs(p.steps() * p.dt() - 1.0) <= 2e-16);
  CHECK(p.refined().steps() == 4000);
  CHECK(NoisePlan::from_dt(1, 0.3, 0.1).steps() == 3);
  CHECK_THROWS(NoisePlan::from_dt(1, 1.0, 0.0));
}

TEST_CASE("increments are a pure function of seed, path, step and coordinate") {
  const auto p = NoisePlan::from_dt(42, 1.0, 0.01);
  const auto a = brownian_normals(p, 5, 3);
  const auto b = brownian_normals(p, 5, 3);
  CHECK(a == b);
  CHECK(a != brownian_normals(p, 6, 3));
  CHECK(a != brownian_normals(NoisePlan::from_dt(43, 1.0, 0.01), 5, 3));
  std::vector<double> col(p.steps());
  brownian_normals(p, 5, 2, col);
  for (int j = 0; j < p.steps(); ++j) {
    CHECK(col[j] == a[j * 3 + 2]);
    CHECK(col[j] == counter_normal(42, 5, 0, 2, StreamTag::Dynamics, j));
  }
}

TEST_CASE("refinement subdivides the same Brownian path") {
  const auto p = NoisePlan::from_dt(9, 1.0, 0.01);
  const auto coarse = brownian_normals(p, 0, 2);
  const auto fine = brownian_normals(p.refined(), 0, 2);
  const auto finer = brownian_normals(p.refined(2), 0, 2);
  for (int j = 0; j < p.steps(); ++j) {
    for (int c = 0; c < 2; ++c) {
      // sqrt(dt) G over a coarse step equals the sum of the two half-step increments.
      const double sum = (fine[(2 * j) * 2 + c] + fine[(2 * j + 1) * 2 + c]) / std::numbers::sqrt2;
      CHECK(sum == doctest::Approx(coarse[j * 2 + c]).epsilon(1e-13));
      double s4 = 0.0;
      for (int k = 0; k < 4; ++k) s4 += finer[(4 * j + k) * 2 + c];
      CHECK(s4 / 2.0 == doctest::Approx(coarse[j * 2 + c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("normal moments") {
  const auto p = NoisePlan::from_dt(3, 1.0, 1.0 / 200000);
  for (const auto& plan : {p, p.refined(2)}) {
    std::vector<double> z(plan.steps());
    brownian_normals(plan, 1, 0, z);
    double m1 = 0, m2 = 0, m4 = 0;
    for (double v : z) {
      m1 += v;
      m2 += v * v;
      m4 += v * v * v * v;
    }
    const double n = static_cast<double>(z.size());
    CHECK(std::abs(m1 / n) < 4 / std::sqrt(n));
    CHECK(std::abs(m2 / n - 1) < 4 * std::sqrt(2 / n));
    CHECK(std::abs(m4 / n - 3) < 4 * std::sqrt(96 / n));
    // lag-1 correlation
    double c = 0;
    for (std::size_t i = 1; i < z.size(); ++i) c += z[i] * z[i - 1];
    CHECK(std::abs(c / n) < 4 / std::sqrt(n));
  }
}

TEST_CASE("sequential generator") {
  CounterRng a(7, 3, StreamTag::Initial), b(7, 3, StreamTag::Initial), c(7, 3, StreamTag::Mala);
  double sa = 0, su = 0;
  bool differ = false;
  for (int i = 0; i < 100000; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differ |= x != c.normal();
    sa += x;
    const double u = a.uniform();
    b.uniform();
    c.uniform();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
    su += u;
  }
  CHECK(differ);
  CHECK(std::abs(sa / 1e5) < 0.0127);
  CHECK(std::abs(su / 1e5 - 0.5) < 0.0037);
}
