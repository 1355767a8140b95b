#include <doctest.h>

#include <cmath>

#include "effdyn/estimators.hpp"

using namespace effdyn;

namespace {

Ensemble coupled_ensemble(const PotentialModel& m, const MeanForceTable& t, int paths,
                          std::uint64_t seed, double dt = 5e-4) {
  const InitialSampler init(m, InitialLaw::equilibrium(), seed);
  return run_coupled_ensemble(m, EffectiveDrift::from_model(m, t), init,
                              NoisePlan::from_dt(seed, 1.0, dt), {paths, 2});
}

}  // namespace

TEST_CASE("sample mean and standard error") {
  const double v[] = {1, 2, 3, 4};
  const auto e = sample_mean(v);
  CHECK(e.value == 2.5);
  CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)).epsilon(1e-15));
  CHECK(e.N == 4);
  const double one[] = {1};
  CHECK_THROWS(sample_mean(one));
}

TEST_CASE("log-log fit") {
  const double x[] = {1, 2, 4, 8};
  const double y[] = {3, 1.5, 0.75, 0.375};
  const auto f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(f.slope_se < 1e-14);
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-14));

  const double noisy[] = {1.0, 1.5, 1.9, 3.1};
  const auto g = fit_loglog(x, noisy);
  // Oracle: normal equations on (log x, log y) by hand.
  double lx[4], ly[4], mx = 0, my = 0;
  for (int i = 0; i < 4; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(noisy[i]);
    mx += lx[i] / 4;
    my += ly[i] / 4;
  }
  double sxx = 0, sxy = 0, rss = 0;
  for (int i = 0; i < 4; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  const double b = sxy / sxx;
  for (int i = 0; i < 4; ++i) rss += std::pow(ly[i] - my - b * (lx[i] - mx), 2);
  CHECK(g.slope == doctest::Approx(b).epsilon(1e-13));
  CHECK(g.slope_se == doctest::Approx(std::sqrt(rss / 2 / sxx)).epsilon(1e-12));

  const double zeros[] = {0, 0, 0, 0};
  const auto d = fit_loglog(x, zeros);
  CHECK(d.degenerate);
  CHECK(d.slope == 0.0);
  const double mixed[] = {0, 1, 2, 3};
  CHECK_THROWS(fit_loglog(x, mixed));
}

TEST_CASE("decoupled ensembles: every path-space estimate is exactly zero") {
  const auto dec = PotentialModel::decoupled(ExprPotential1D::parse("x^4/4 - x^2/2"),
                                             {ExprPotential1D::parse("x^2/2 + x^4/4")}, 1);
  const auto t = MeanForceTable::build_default(dec);
  const auto ens = coupled_ensemble(dec, t, 64, 3, 1e-3);
  CHECK(pathwise_error(ens, 1.0).value == 0.0);
  CHECK(pathwise_error(ens, 2.0).value == 0.0);
  CHECK(martingale_sup(ens).value == 0.0);
  const auto g = gronwall_ratio(ens);
  CHECK(g.exact_closure);
  const auto rep = bound_report(dec, t, compute_constants(dec, t), &ens);
  for (const auto& e : rep.entries) {
    if (e.status != BoundStatus::Skipped) CHECK(e.lhs == 0.0);
  }
  CHECK(rep.all_satisfied());
}

TEST_CASE("GC bound report, Jensen consistency and the Gronwall ratio") {
  const auto gc = PotentialModel::gaussian_coupled(1, 1, 2, 1);
  const auto t = MeanForceTable::build_default(gc);
  const auto ens = coupled_ensemble(gc, t, 1024, 11);
  const auto c = compute_constants(gc, t);
  const auto rep = bound_report(gc, t, c, &ens);
  CHECK(rep.all_satisfied());
  const auto* sq = rep.find("sup_sq_error");
  REQUIRE(sq);
  CHECK(sq->rhs == doctest::Approx(std::exp(1.0) / 2).epsilon(1e-12));
  CHECK(rep.find("martingale_sup")->rhs == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.find("sup_error")->status == BoundStatus::Informational);

  const auto e1 = pathwise_error(ens, 1.0), e2 = pathwise_error(ens, 2.0);
  CHECK(e1.value * e1.value <= e2.value + 2 * std::hypot(2 * e1.value * e1.std_error, e2.std_error));
  CHECK(e1.T == 1.0);
  CHECK(e1.N == 1024);

  const auto g = gronwall_ratio(ens);
  CHECK_FALSE(g.exact_closure);
  CHECK(std::isfinite(g.value));
  CHECK(g.value > 0.0);
}

TEST_CASE("deterministic starts skip path-space bounds") {
  const auto gc = PotentialModel::gaussian_coupled(1, 1, 2, 1);
  const auto t = MeanForceTable::build_default(gc);
  const InitialSampler init(gc, InitialLaw::fixed({1, 0}), 1);
  const auto ens = run_coupled_ensemble(gc, EffectiveDrift::from_model(gc, t), init,
                                        NoisePlan::from_dt(1, 0.5, 1e-3), {16, 1});
  const auto rep = bound_report(gc, t, compute_constants(gc, t), &ens);
  CHECK(rep.find("sup_sq_error")->status == BoundStatus::Skipped);
}

TEST_CASE("scaling study plumbing") {
  const auto r = scaling_study("x", {1, 2, 4, 8}, [](double v) {
    ErrorEstimate e;
    e.value = 2.0 / std::sqrt(v);
    e.N = 2;
    return e;
  });
  CHECK(r.fit.slope == doctest::Approx(-0.5).epsilon(1e-14));
  std::ostringstream os;
  r.write_csv(os);
  CHECK(os.str().rfind("parameter,value,estimate,se,n,slope,slope_se\nx,1,2,0,2,", 0) == 0);
  CHECK_THROWS(scaling_study("x", {1, 2, 3}, [](double) { return ErrorEstimate{}; }));
}
