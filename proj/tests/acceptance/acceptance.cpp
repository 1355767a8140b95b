// Acceptance runner: `effdyn_acceptance [criterion...]` prints one line per
// criterion and exits nonzero if any of them fails. No argument runs all.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "effdyn/config.hpp"
#include "effdyn/constants.hpp"
#include "effdyn/error.hpp"
#include "effdyn/estimators.hpp"
#include "effdyn/poisson.hpp"
#include "effdyn/runner.hpp"

using namespace effdyn;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr int kPaths = 4096;

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PotentialModel gc(double k_b) { return PotentialModel::gaussian_coupled(1, 1, k_b, 1); }
PotentialModel tr() { return PotentialModel::tracking(ExprPotential1D::parse("x^2/2"), 1, 2, 1); }
PotentialModel dw() { return PotentialModel::double_well(1, 2, 1); }

Ensemble coupled(const PotentialModel& m, const MeanForceTable& t, const NoisePlan& plan) {
  const InitialSampler init(m, InitialLaw::equilibrium(), plan.seed);
  return run_coupled_ensemble(m, EffectiveDrift::from_model(m, t), init, plan, {kPaths, threads()});
}

Ensemble averaged(double eps, const NoisePlan& plan) {
  const auto m = tr();
  const auto t = MeanForceTable::build_default(m);
  const InitialSampler init(m, InitialLaw::equilibrium(), plan.seed);
  return run_two_scale_ensemble(
      m, EffectiveDrift::from_model(m, t), init, plan,
      TwoScaleConfig::uniform(eps, TwoScaleConfig::Integrator::Splitting), {kPaths, threads()});
}

// Shared settings of the path-space criteria.
const NoisePlan kPlan = NoisePlan::from_dt(kSeed, 1.0, 5e-4);
const std::vector<double> kEps{0.2, 0.1, 0.05, 0.025};
const NoisePlan kEpsPlan = NoisePlan::from_dt(kSeed, 1.0, 2.5e-4);
const std::vector<double> kRho4{1, 2, 4, 8};
const std::vector<double> kRho4b{2, 4, 8, 16};

// Criterion 1 statistics at a given table size and Poisson resolution.
struct GaussianStats {
  double b_err = 0.0;
  double kappa_sq = 0.0;
  double rho = 0.0;
  double f_sq = 0.0;
  double u_err = 0.0;
  double dirichlet = 0.0;
  double dirichlet_rhs = 0.0;
  std::vector<double> b_common;  // b at xi_min + 2 h k, shared by both grid sizes
};

GaussianStats gaussian_stats(int m, int poisson_points) {
  const auto model = gc(2);
  const auto t = MeanForceTable::build_default(model, m);
  GaussianStats s;
  const int stride = (m - 1) / 240;
  for (int j = 0; j < t.size(); ++j) {
    s.b_err = std::max(s.b_err, std::abs(t.b()[j] - t.xi()[j] / 2));
    if (j % stride == 0) s.b_common.push_back(t.b()[j]);
  }
  s.kappa_sq = kappa_sq(model, t).value;
  s.rho = poincare_constant(model).rho;
  s.f_sq = f_l2(model, t);
  const PoissonGrid grid{poisson_points, 8.0, std::nullopt};
  const auto sol = solve_poisson(model, t, 1.0, grid);
  for (std::size_t i = 0; i < sol.x2.size(); ++i) {
    s.u_err = std::max(s.u_err, std::abs(sol.u[i] - (sol.x2[i] + 0.5) / 2));
  }
  const auto entries = check_gradient_bounds(model, t, s.rho, s.kappa_sq, threads(), grid);
  s.dirichlet = entries.at(1).lhs;
  s.dirichlet_rhs = entries.at(1).rhs;
  return s;
}

Outcome criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = gaussian_stats(241, 2001);
  Outcome o;
  o.require(s.b_err <= 1e-8, "max|b - xi/2| = " + num(s.b_err));
  o.require(s.kappa_sq == 1.0, "kappa^2 = " + num(s.kappa_sq));
  o.require(s.rho == 2.0, "rho = " + num(s.rho));
  o.require(std::abs(s.f_sq - 0.5) <= 1e-4 && std::abs(s.f_sq - s.kappa_sq / s.rho) <= 1e-4,
            "int f^2 psi = " + num(s.f_sq));
  o.require(s.u_err <= 1e-6, "max|u(1,.) - (x2+0.5)/2| = " + num(s.u_err));
  o.require(std::abs(s.dirichlet - 0.25) <= 1e-3 && s.dirichlet_rhs == 0.25,
            "int |grad u|^2 psi = " + num(s.dirichlet) + " vs " + num(s.dirichlet_rhs));
  const double sec = elapsed(t0);
  o.require(sec < 10.0, "runtime " + num(sec) + " s");
  return o;
}

Outcome criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto model = PotentialModel::decoupled(ExprPotential1D::parse("x^4/4 - x^2/2"),
                                               {ExprPotential1D::parse("x^2/2 + x^4/4")}, 1);
  const auto t = MeanForceTable::build_default(model);
  Outcome o;
  auto check = [&](const InitialLaw& law, int n, const std::string& label) {
    const InitialSampler init(model, law, kSeed);
    const auto ens = run_coupled_ensemble(model, EffectiveDrift::from_model(model, t), init,
                                          NoisePlan::from_dt(kSeed, 1.0, 1e-3), {n, threads()});
    const bool zero = std::all_of(ens.paths.begin(), ens.paths.end(),
                                  [](const PathSummary& p) { return p.sup_abs_diff == 0.0; });
    o.require(zero, label + " N=" + std::to_string(n) + " sup error " +
                        num(pathwise_error(ens).value));
  };
  for (int n : {2, 64, kPaths}) check(InitialLaw::fixed({0.5, -0.3}), n, "fixed start");
  // MALA burn-in per path dominates the cost of equilibrium starts.
  check(InitialLaw::equilibrium(), 256, "equilibrium");
  const double sec = elapsed(t0);
  o.require(sec < 10.0, "runtime " + num(sec) + " s");
  return o;
}

ScalingResult epsilon_sweep(const NoisePlan& plan) {
  return scaling_study("epsilon", kEps,
                       [&](double eps) { return pathwise_error(averaged(eps, plan), 1.0); });
}

Outcome criterion_3() {
  const auto r = epsilon_sweep(kEpsPlan);
  Outcome o;
  std::string est;
  for (const auto& e : r.estimates) est += (est.empty() ? "" : ",") + num(e.value);
  o.require(r.fit.slope >= 0.4 && r.fit.slope <= 0.6,
            "slope " + num(r.fit.slope) + " +- " + num(r.fit.slope_se) + " (errors " + est + ")");
  return o;
}

ScalingResult rho_sweep(const std::vector<double>& k_b, const NoisePlan& plan) {
  return scaling_study("k_b", k_b, [&](double kb) {
    const auto m = gc(kb);
    return pathwise_error(coupled(m, MeanForceTable::build_default(m), plan), 1.0);
  });
}

Outcome rho_criterion(const std::vector<double>& k_b) {
  Outcome o;
  try {
    const auto r = rho_sweep(k_b, kPlan);
    std::string est;
    for (const auto& e : r.estimates) est += (est.empty() ? "" : ",") + num(e.value);
    o.require(r.fit.slope >= -1.2 && r.fit.slope <= -0.8,
              "slope " + num(r.fit.slope) + " +- " + num(r.fit.slope_se) + " (errors " + est + ")");
  } catch (const Error& e) {
    o.require(false, std::string("sweep cannot run: ") + e.what());
  }
  return o;
}

Outcome criterion_5() {
  Outcome o;
  const std::vector<std::pair<std::string, PotentialModel>> models{
      {"GC", gc(2)}, {"TR", tr()}, {"DW", dw()}};
  for (const auto& [name, m] : models) {
    const auto t = MeanForceTable::build_default(m);
    const auto ens = coupled(m, t, kPlan);
    const auto rep = bound_report(m, t, compute_constants(m, t), &ens, threads());
    for (const char* entry : {"sup_sq_error", "martingale_sup"}) {
      const BoundEntry* e = rep.find(entry);
      const bool ok = e && e->status == BoundStatus::Satisfied;
      o.require(ok, name + " " + entry +
                        (e ? " " + num(e->lhs) + "+-" + num(e->std_error) + " <= " + num(e->rhs)
                           : std::string(" missing")));
    }
  }
  return o;
}

Outcome criterion_6() {
  const auto m = dw();
  const auto t = MeanForceTable::build_default(m);
  const auto c = compute_constants(m, t);
  Outcome o;
  o.require(std::abs(c.lipschitz_b - 4.0) < 1e-2, "L_b = " + num(c.lipschitz_b));
  o.require(std::isfinite(c.c_alpha) && c.c_alpha > 0, "C_alpha = " + num(c.c_alpha));
  const auto ens = coupled(m, t, kPlan);
  const auto rep = bound_report(m, t, c, &ens, threads());
  std::string bad;
  for (const auto& e : rep.entries) {
    if (e.status == BoundStatus::Violated) bad += " " + e.name;
  }
  o.require(rep.all_satisfied(), "bounds satisfied" + (bad.empty() ? "" : " except" + bad));
  const auto g = gronwall_ratio(ens);
  o.require(std::isfinite(g.value) && g.value > 0, "gronwall_ratio = " + num(g.value));
  return o;
}

// Criterion 7: refinement sensitivity plus thread-count byte identity.
struct Change {
  Outcome* o;
  int failures = 0;
  int checked = 0;

  void operator()(const std::string& what, const ErrorEstimate& base, const ErrorEstimate& fine) {
    const Sensitivity s{what, base, fine};
    ++checked;
    if (!s.stable()) {
      ++failures;
      o->require(false, what + " changed " + num(s.change()) + " > " + num(s.tolerance()));
    }
  }
  void operator()(const std::string& what, double base, double fine) {
    ErrorEstimate a, b;
    a.value = base;
    b.value = fine;
    (*this)(what, a, b);
  }
};

Outcome criterion_7() {
  Outcome o;
  Change change{&o};

  // Grid doubling of the quadrature and Poisson statistics.
  const auto g1 = gaussian_stats(241, 2001), g2 = gaussian_stats(481, 4001);
  for (std::size_t j = 0; j < g1.b_common.size(); ++j) {
    change("GC b(xi_" + std::to_string(j) + ")", g1.b_common[j], g2.b_common[j]);
  }
  change("GC kappa^2", g1.kappa_sq, g2.kappa_sq);
  change("GC int f^2 psi", g1.f_sq, g2.f_sq);
  change("GC int |grad u|^2 psi", g1.dirichlet, g2.dirichlet);
  {
    const auto m = dw();
    const auto c1 = compute_constants(m, MeanForceTable::build_default(m, 241));
    const auto c2 = compute_constants(m, MeanForceTable::build_default(m, 481));
    change("DW L_b", c1.lipschitz_b, c2.lipschitz_b);
    change("DW C_alpha", c1.c_alpha, c2.c_alpha);
    change("DW rho", c1.rho, c2.rho);
  }

  // dt halving on the refined Brownian path, and grid doubling of the drift table.
  const std::vector<std::pair<std::string, PotentialModel>> models{
      {"GC", gc(2)}, {"TR", tr()}, {"DW", dw()}};
  for (const auto& [name, m] : models) {
    const auto t = MeanForceTable::build_default(m);
    const auto base = coupled(m, t, kPlan);
    const auto fine = coupled(m, t, kPlan.refined());
    const auto wide = coupled(m, MeanForceTable::build_default(m, 481), kPlan);
    change(name + " E sup|X1-xi| dt/2", pathwise_error(base, 1), pathwise_error(fine, 1));
    change(name + " E sup|X1-xi|^2 dt/2", pathwise_error(base, 2), pathwise_error(fine, 2));
    change(name + " E sup|e|^2 dt/2", martingale_sup(base), martingale_sup(fine));
    change(name + " E sup|X1-xi| grid x2", pathwise_error(base, 1), pathwise_error(wide, 1));
    change(name + " E sup|e|^2 grid x2", martingale_sup(base), martingale_sup(wide));
  }
  for (double eps : kEps) {
    change("TR eps=" + num(eps) + " dt/2", pathwise_error(averaged(eps, kEpsPlan), 1),
           pathwise_error(averaged(eps, kEpsPlan.refined()), 1));
  }
  for (double kb : kRho4b) {
    const auto m = gc(kb);
    const auto t = MeanForceTable::build_default(m);
    change("GC k_b=" + num(kb) + " dt/2", pathwise_error(coupled(m, t, kPlan), 1),
           pathwise_error(coupled(m, t, kPlan.refined()), 1));
  }
  o.require(change.failures == 0,
            std::to_string(change.checked - change.failures) + "/" +
                std::to_string(change.checked) + " statistics stable");

  // Byte identity across thread counts.
  ExperimentConfig cfg;
  cfg.study = "error";
  cfg.family = "DW";
  cfg.paths = 512;
  cfg.seed = kSeed;
  const auto ref = execute(cfg, {1, nullptr});
  for (int th : {2, 3, 8}) {
    const auto r = execute(cfg, {th, nullptr});
    bool same = r.files.size() == ref.files.size();
    for (std::size_t i = 0; same && i < r.files.size(); ++i) same = r.files[i] == ref.files[i];
    o.require(same, "threads=" + std::to_string(th) + " byte-identical");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<Outcome()>> criteria{
      {"1", criterion_1},
      {"2", criterion_2},
      {"3", criterion_3},
      {"4", [] { return rho_criterion(kRho4); }},
      {"4b", [] { return rho_criterion(kRho4b); }},
      {"5", criterion_5},
      {"6", criterion_6},
      {"7", criterion_7},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  if (wanted.empty()) {
    for (const auto& [k, _] : criteria) wanted.push_back(k);
  }
  int failed = 0;
  for (const auto& name : wanted) {
    const auto it = criteria.find(name);
    if (it == criteria.end()) {
      std::printf("criterion %s: FAIL (unknown criterion)\n", name.c_str());
      ++failed;
      continue;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o.require(false, std::string("error: ") + e.what());
    }
    std::printf("criterion %s: %s (%s)\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
