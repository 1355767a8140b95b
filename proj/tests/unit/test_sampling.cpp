#include <doctest.h>

#include <cmath>

#include "effdyn/sampling.hpp"
#include "oracles.hpp"

using namespace effdyn;

TEST_CASE("exact Gaussian equilibrium for GC") {
  const auto gc = PotentialModel::gaussian_coupled(1, 1, 2, 1);
  const EquilibriumSampler s(gc, 11);
  REQUIRE(s.exact());
  const auto cov = s.covariance();
  CHECK(cov(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cov(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(cov(1, 1) == doctest::Approx(1.0).epsilon(1e-12));

  const int N = 100000;
  double s00 = 0, s01 = 0, s11 = 0, m0 = 0, m1 = 0;
  std::vector<double> q00(N), q01(N), q11(N);
  for (int i = 0; i < N; ++i) {
    const auto x = s.draw(i);
    m0 += x[0];
    m1 += x[1];
    q00[i] = x[0] * x[0];
    q01[i] = x[0] * x[1];
    q11[i] = x[1] * x[1];
    s00 += q00[i];
    s01 += q01[i];
    s11 += q11[i];
  }
  // Oracle: covariance (beta A)^-1 for A = [[1,1],[1,2]]; se of x_i x_j from its variance.
  const double se00 = std::sqrt(2 * 2.0 * 2.0 / N), se11 = std::sqrt(2 * 1.0 / N),
               se01 = std::sqrt((2.0 * 1.0 + 1.0) / N);
  CHECK(std::abs(s00 / N - 2.0) < 4 * se00);
  CHECK(std::abs(s01 / N + 1.0) < 4 * se01);
  CHECK(std::abs(s11 / N - 1.0) < 4 * se11);
  CHECK(std::abs(m0 / N) < 4 * std::sqrt(2.0 / N));
  CHECK(std::abs(m1 / N) < 4 * std::sqrt(1.0 / N));
}

TEST_CASE("decoupled quadratic model: independent coordinates of variance 1/beta") {
  const auto dec = PotentialModel::decoupled(ExprPotential1D::parse("x^2/2"),
                                             {ExprPotential1D::parse("x^2/2")}, 2);
  const EquilibriumSampler s(dec, 5);
  REQUIRE(s.exact());
  const auto cov = s.covariance();
  CHECK(cov(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cov(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(cov(0, 1)) < 1e-15);
}

TEST_CASE("off-center quadratic has the right mean") {
  const auto tr = PotentialModel::tracking(ExprPotential1D::parse("(x-2)^2/2"), 1, 3, 1);
  const EquilibriumSampler s(tr, 5);
  REQUIRE(s.exact());
  for (int i = 0; i < 3; ++i) CHECK(s.mean()(i) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("fixed initial point passes through") {
  const auto gc = PotentialModel::gaussian_coupled(1, 1, 2, 1);
  const InitialSampler s(gc, InitialLaw::fixed({0.25, -3}), 1);
  CHECK(s.draw(17) == std::vector<double>{0.25, -3});
  CHECK_FALSE(s.density_ratio_bound().has_value());
}

TEST_CASE("custom initial law carries its density ratio bound") {
  const auto gc = PotentialModel::gaussian_coupled(1, 1, 2, 1);
  const InitialSampler s(gc, InitialLaw::custom([](CounterRng& r) {
                           return std::vector<double>{r.normal(), r.normal()};
                         }, 2.5),
                         1);
  CHECK(*s.density_ratio_bound() == 2.5);
  CHECK(s.draw(3) == s.draw(3));
  CHECK(s.draw(3) != s.draw(4));
}

TEST_CASE("MALA for the double well") {
  const auto dw = PotentialModel::double_well(1, 2, 1);
  const EquilibriumSampler s(dw, 21);
  REQUIRE_FALSE(s.exact());
  REQUIRE(s.mala().has_value());
  CHECK(s.mala()->acceptance >= 0.4);
  CHECK(s.mala()->acceptance <= 0.8);

  // E[x1^2] against a quadrature oracle of exp(-(x^2-1)^2).
  auto V1 = [](double x) { return (x * x - 1) * (x * x - 1); };
  const double ref = oracle::gibbs_mean(V1, [](double x) { return x * x; }, 1.0, -4, 4);
  const double ref4 = oracle::gibbs_mean(V1, [](double x) { return x * x * x * x; }, 1.0, -4, 4);
  const int N = 2000;
  double m2 = 0, d2 = 0;
  for (int i = 0; i < N; ++i) {
    const auto x = s.draw(i);
    m2 += x[0] * x[0];
    d2 += (x[1] - x[0]) * (x[1] - x[0]);
  }
  CHECK(std::abs(m2 / N - ref) < 4 * std::sqrt((ref4 - ref * ref) / N));
  CHECK(std::abs(d2 / N - 1.0) < 4 * std::sqrt(2.0 / N));
  CHECK(s.draw(7) == s.draw(7));
}
