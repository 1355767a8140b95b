#include <doctest.h>

#include <cmath>
#include <cstring>

#include "effdyn/ensemble.hpp"
#include "effdyn/error.hpp"
#include "effdyn/sampling.hpp"
#include "effdyn/sde.hpp"

using namespace effdyn;

namespace {

PotentialModel tr_quadratic(double k = 1.0) {
  return PotentialModel::tracking(ExprPotential1D::parse("x^2/2"), k, 2, 1.0);
}

PotentialModel dec_quadratic(int n = 2) {
  std::vector<ExprPotential1D> bath(n - 1, ExprPotential1D::parse("x^2/2"));
  return PotentialModel::decoupled(ExprPotential1D::parse("x^2/2"), bath, 1.0);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("zero potential gives the scaled cumulative sum of the increments") {
  const auto z = PotentialModel::zero(3, 2.0);
  const auto plan = NoisePlan::from_dt(4, 1.0, 0.01);
  const double x0[] = {1, -2, 0.5};
  const auto tr = simulate_full(z, x0, plan, 3);
  const auto g = brownian_normals(plan, 3, 3);
  REQUIRE(tr.steps() == 100);
  const double s = std::sqrt(2 * plan.dt() / 2.0);  // sqrt(dt) for beta = 2
  for (int c = 0; c < 3; ++c) {
    double x = x0[c];
    CHECK(tr.at(0, c) == x0[c]);
    for (int j = 0; j < plan.steps(); ++j) {
      x = x + s * g[j * 3 + c];
      CHECK(tr.at(j + 1, c) == doctest::Approx(x).epsilon(1e-14));
    }
  }
}

TEST_CASE("OU mean decays like exp(-T)") {
  const auto m = dec_quadratic(3);
  const auto plan = NoisePlan::from_dt(12, 1.0, 1e-3);
  const int N = 10000;
  std::vector<double> xT(N);
  parallel_for(N, 1, [&](std::size_t i) {
    const double x0[] = {1, 1, 1};
    xT[i] = simulate_full(m, x0, plan, i).at(plan.steps(), 0);
  });
  double mean = 0, sq = 0;
  for (double v : xT) mean += v;
  mean /= N;
  for (double v : xT) sq += (v - mean) * (v - mean);
  const double se = std::sqrt(sq / (N - 1) / N);
  CHECK(std::abs(mean - std::exp(-1.0)) < 3 * se);
}

TEST_CASE("strong error against a dt/4 reference on the same Brownian path") {
  const auto m = PotentialModel::tracking(ExprPotential1D::parse("x^4/4 + x^2/2"), 2, 2, 1.0);
  const auto plan = NoisePlan::from_dt(8, 1.0, 0.02);
  double e1 = 0, e2 = 0;
  const int N = 400;
  for (int i = 0; i < N; ++i) {
    const double x0[] = {0.5, -0.5};
    const auto ref = simulate_full(m, x0, plan.refined(2), i);
    const auto a = simulate_full(m, x0, plan, i);
    const auto b = simulate_full(m, x0, plan.refined(1), i);
    const int s = ref.steps();
    for (int c = 0; c < 2; ++c) {
      e1 += std::pow(a.at(a.steps(), c) - ref.at(s, c), 2);
      e2 += std::pow(b.at(b.steps(), c) - ref.at(s, c), 2);
    }
  }
  const double ratio = std::sqrt(e1 / e2);
  MESSAGE("strong error ratio " << ratio);
  CHECK(ratio > 1.6);
  CHECK(ratio < 3.2);
}

TEST_CASE("explosion guard reports the step") {
  const auto m = PotentialModel::decoupled(ExprPotential1D::parse("x^4"),
                                           {ExprPotential1D::parse("x^2")}, 1.0);
  const double x0[] = {3, 0};
  try {
    simulate_full(m, x0, NoisePlan::from_dt(1, 1.0, 0.1));
    FAIL("expected an explosion");
  } catch (const ExplosionError& e) {
    CHECK(e.step() >= 1);
    CHECK(e.step() <= 5);
  }
}

TEST_CASE("decoupled model: effective path equals the first coordinate bit for bit") {
  const auto m = PotentialModel::decoupled(ExprPotential1D::parse("x^4/4 - x^2/2"),
                                           {ExprPotential1D::parse("x^2/2 + x^4/4")}, 1.0);
  const auto t = MeanForceTable::build_default(m);
  const auto plan = NoisePlan::from_dt(2, 1.0, 1e-3);
  const double x0[] = {0.3, 1.2};
  const auto pair = simulate_coupled(m, t, x0, plan, 9);
  for (int j = 0; j <= plan.steps(); ++j) {
    CHECK(same_bits(pair.full.at(j, 0), pair.eff.at(j, 0)));
    CHECK(pair.fluct_integral[j] == 0.0);
  }
  CHECK(summarize(pair).sup_abs_diff == 0.0);
}

TEST_CASE("forced zero fluctuation gives a zero running integral") {
  const auto m = tr_quadratic();
  const auto t = MeanForceTable::build_default(m);
  const auto drift = EffectiveDrift::from_model(m, t).with_fluctuation(
      [](std::span<const double>) { return 0.0; });
  const double x0[] = {0.1, 0.2};
  const auto pair = simulate_coupled(m, drift, x0, NoisePlan::from_dt(1, 1.0, 1e-2), 0);
  for (double e : pair.fluct_integral) CHECK(e == 0.0);
}

TEST_CASE("effective path consumes the same W1 increments as the full path") {
  const auto m = tr_quadratic();
  const auto t = MeanForceTable::build_default(m);
  const auto plan = NoisePlan::from_dt(6, 1.0, 1e-2);
  const double x0[] = {0.4, -0.1};
  const auto pair = simulate_coupled(m, t, x0, plan, 2);
  const auto eff = simulate_effective(m, EffectiveDrift::from_model(m, t), 0.4, plan, 2);
  CHECK(pair.eff.states == eff.states);
  CHECK(pair.eff.at(0, 0) == pair.full.at(0, 0));
  // Recover G from each path: full first coordinate and effective path agree.
  const auto g = brownian_normals(plan, 2, 2);
  const double s = std::sqrt(2 * plan.dt());
  for (int j = 0; j < plan.steps(); ++j) {
    const double x = pair.full.state(j)[0], y = pair.full.state(j)[1];
    const double gx = (pair.full.at(j + 1, 0) - x + (x - (y - x)) * plan.dt()) / s;
    const double xi = pair.eff.at(j, 0);
    const double ge = (pair.eff.at(j + 1, 0) - xi + t.b_at(xi) * plan.dt()) / s;
    CHECK(gx == doctest::Approx(g[j * 2]).epsilon(1e-9));
    CHECK(ge == doctest::Approx(g[j * 2]).epsilon(1e-9));
  }
}

TEST_CASE("left-endpoint fluctuation integral vs an independent trapezoid pass") {
  const auto m = tr_quadratic();
  const auto t = MeanForceTable::build_default(m);
  const auto plan = NoisePlan::from_dt(3, 1.0, 1e-3);
  const double x0[] = {0.2, 0.9};
  const auto pair = simulate_coupled(m, t, x0, plan, 1);
  // f = k (x2 - x1) for the tracking family
  double trap = 0.0;
  for (int j = 0; j < plan.steps(); ++j) {
    const double a = pair.full.at(j, 1) - pair.full.at(j, 0);
    const double b = pair.full.at(j + 1, 1) - pair.full.at(j + 1, 0);
    trap += 0.5 * (a + b) * plan.dt();
  }
  const double eT = pair.fluct_integral.back();
  CHECK(std::abs(eT - trap) < 20 * plan.dt());
  CHECK(std::abs(eT - trap) > 0.0);
}

TEST_CASE("two-scale system with epsilon = 1 is the full system") {
  const auto m = PotentialModel::double_well(2, 3, 1.0);
  const auto plan = NoisePlan::from_dt(5, 1.0, 5e-4);
  const double x0[] = {0.5, 0.2, -0.3};
  const auto full = simulate_full(m, x0, plan, 4);
  const auto ts = simulate_two_scale(m, x0, plan, TwoScaleConfig::uniform(1.0), 4);
  CHECK(full.states == ts.states);
}

TEST_CASE("stiffness guard for the plain integrator") {
  const auto m = tr_quadratic();
  const double x0[] = {0, 0};
  const auto plan = NoisePlan::from_dt(1, 1.0, 1e-3);
  CHECK_THROWS_WITH(simulate_two_scale(m, x0, plan, TwoScaleConfig::uniform(0.05), 0),
                    doctest::Contains("stiffness guard"));
  CHECK_NOTHROW(simulate_two_scale(
      m, x0, plan, TwoScaleConfig::uniform(0.05, TwoScaleConfig::Integrator::Splitting), 0));
  TwoScaleConfig bad;
  bad.epsilon = {-1};
  CHECK_THROWS(simulate_two_scale(m, x0, plan, bad, 0));
}

TEST_CASE("two-scale bath keeps the equilibrium variance of x2 - x1") {
  const auto m = tr_quadratic();
  const auto plan = NoisePlan::from_dt(31, 1.0, 2.5e-4);
  const EquilibriumSampler eq(m, 31);
  for (auto integrator : {TwoScaleConfig::Integrator::Plain, TwoScaleConfig::Integrator::Splitting}) {
    const auto cfg = TwoScaleConfig::uniform(0.025, integrator);
    const int N = 4096;
    std::vector<double> d(N);
    parallel_for(N, 2, [&](std::size_t i) {
      const auto x0 = eq.draw(i);
      const auto tr = simulate_two_scale(m, x0, plan, cfg, i);
      d[i] = tr.at(tr.steps(), 1) - tr.at(tr.steps(), 0);
    });
    double s2 = 0;
    for (double v : d) s2 += v * v;
    CHECK(std::abs(s2 / N - 1.0) < 4 * std::sqrt(2.0 / N));
  }
}

TEST_CASE("splitting and plain integrators agree on E[X1_T]") {
  const auto m = tr_quadratic();
  const double eps = 0.1;
  const auto plan = NoisePlan::from_dt(17, 1.0, eps / 200);
  const int N = 4096;
  std::vector<double> a(N), b(N);
  parallel_for(N, 1, [&](std::size_t i) {
    const double x0[] = {1.0, 2.0};
    a[i] = simulate_two_scale(m, x0, plan, TwoScaleConfig::uniform(eps), i).states[2 * plan.steps()];
    b[i] = simulate_two_scale(m, x0, plan,
                              TwoScaleConfig::uniform(eps, TwoScaleConfig::Integrator::Splitting), i)
               .states[2 * plan.steps()];
  });
  double ma = 0, mb = 0, va = 0, vb = 0;
  for (int i = 0; i < N; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= N;
  mb /= N;
  for (int i = 0; i < N; ++i) {
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  const double se = std::sqrt(va / (N - 1) / N + vb / (N - 1) / N);
  CHECK(std::abs(ma - mb) < 3 * se);
}

TEST_CASE("vector epsilon scales each bath coordinate") {
  // Nearly deterministic, so the relaxation rates 1/eps_i dominate.
  const auto m = PotentialModel::double_well(1, 3, 1e8);
  const auto plan = NoisePlan::from_dt(1, 0.1, 1e-5);
  TwoScaleConfig cfg;
  cfg.epsilon = {0.01, 1.0};
  const double x0[] = {0.3, 1.0, 1.0};
  const auto tr = simulate_two_scale(m, x0, plan, cfg, 0);
  // The fast coordinate relaxes to x1 far sooner than the slow one.
  CHECK(std::abs(tr.at(tr.steps(), 1) - tr.at(tr.steps(), 0)) < 0.05);
  CHECK(std::abs(tr.at(tr.steps(), 2) - tr.at(tr.steps(), 0)) > 0.3);
  cfg.epsilon = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(simulate_two_scale(m, x0, plan, cfg, 0), DimensionError);
}

TEST_CASE("stationarity from equilibrium") {
  const auto gc = PotentialModel::gaussian_coupled(1, 1, 2, 1);
  const EquilibriumSampler eq(gc, 77);
  const auto plan = NoisePlan::from_dt(77, 1.0, 1e-3);
  const int N = 8192;
  std::vector<double> x1(N), x2(N);
  parallel_for(N, 2, [&](std::size_t i) {
    const auto tr = simulate_full(gc, eq.draw(i), plan, i);
    x1[i] = tr.at(tr.steps(), 0);
    x2[i] = tr.at(tr.steps(), 1);
  });
  double m1 = 0, m2 = 0, s11 = 0, s22 = 0, s12 = 0;
  for (int i = 0; i < N; ++i) {
    m1 += x1[i];
    m2 += x2[i];
    s11 += x1[i] * x1[i];
    s22 += x2[i] * x2[i];
    s12 += x1[i] * x2[i];
  }
  CHECK(std::abs(m1 / N) < 4 * std::sqrt(2.0 / N));
  CHECK(std::abs(m2 / N) < 4 * std::sqrt(1.0 / N));
  CHECK(std::abs(s11 / N - 2.0) < 4 * std::sqrt(8.0 / N));
  CHECK(std::abs(s22 / N - 1.0) < 4 * std::sqrt(2.0 / N));
  CHECK(std::abs(s12 / N + 1.0) < 4 * std::sqrt(3.0 / N));
}

TEST_CASE("ensembles are independent of the worker count") {
  const auto m = PotentialModel::double_well(1, 2, 1);
  const auto t = MeanForceTable::build_default(m);
  const InitialSampler init(m, InitialLaw::equilibrium(), 5);
  const auto plan = NoisePlan::from_dt(5, 0.5, 1e-3);
  const auto drift = EffectiveDrift::from_model(m, t);
  const auto a = run_coupled_ensemble(m, drift, init, plan, {64, 1});
  const auto b = run_coupled_ensemble(m, drift, init, plan, {64, 4});
  REQUIRE(a.paths.size() == 64);
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    CHECK(same_bits(a.paths[i].sup_abs_diff, b.paths[i].sup_abs_diff));
    CHECK(same_bits(a.paths[i].sup_abs_fluct, b.paths[i].sup_abs_fluct));
    CHECK(same_bits(a.paths[i].x1_T, b.paths[i].x1_T));
  }
}

TEST_CASE("trajectory CSV") {
  const auto z = PotentialModel::zero(2, 1.0);
  const double x0[] = {0, 0};
  const auto tr = simulate_full(z, x0, NoisePlan::from_dt(1, 1.0, 0.25));
  std::ostringstream os;
  tr.write_csv(os);
  CHECK(os.str().rfind("t,x1,x2\n0,0,0\n", 0) == 0);
}
