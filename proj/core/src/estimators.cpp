#include "effdyn/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "effdyn/csv.hpp"
#include "effdyn/error.hpp"

namespace effdyn {

namespace {

ErrorEstimate with_meta(ErrorEstimate e, const Ensemble& ens, double p) {
  e.p = p;
  e.T = ens.plan.T;
  e.dt = ens.plan.dt();
  e.seed = ens.plan.seed;
  return e;
}

}  // namespace

ErrorEstimate sample_mean(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw Error("an estimate needs at least 2 samples");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  ErrorEstimate e;
  e.value = mean;
  e.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  e.N = static_cast<int>(n);
  return e;
}

ErrorEstimate pathwise_error(const Ensemble& ensemble, double p) {
  if (ensemble.paths.empty()) throw Error("empty ensemble");
  std::vector<double> v(ensemble.paths.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = ensemble.paths[i].sup_abs_diff;
    v[i] = p == 1.0 ? s : p == 2.0 ? s * s : std::pow(s, p);
  }
  return with_meta(sample_mean(v), ensemble, p);
}

ErrorEstimate martingale_sup(const Ensemble& ensemble) {
  if (ensemble.paths.empty()) throw Error("empty ensemble");
  std::vector<double> v(ensemble.paths.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = ensemble.paths[i].sup_abs_fluct;
    v[i] = s * s;
  }
  return with_meta(sample_mean(v), ensemble, 2.0);
}

GronwallRatio gronwall_ratio(const Ensemble& ensemble) {
  const double num = pathwise_error(ensemble, 1.0).value;
  const double den = martingale_sup(ensemble).value;
  if (den == 0.0) {
    if (num != 0.0) throw Error("pathwise error is nonzero while the fluctuation integral vanishes");
    return {0.0, true};
  }
  return {num / std::sqrt(den), false};
}

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3) throw Error("log-log fit needs at least 3 matching points");
  LogLogFit fit;
  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
    fit.degenerate = true;
    return fit;
  }
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error("log-log fit needs positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw Error("log-log fit needs distinct sweep values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    rss += r * r;
  }
  fit.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  return fit;
}

void ScalingResult::write_csv(std::ostream& os, std::string_view provenance) const {
  write_provenance(os, provenance);
  os << "parameter,value,estimate,se,n,slope,slope_se\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    write_csv_row(os, {parameter, fmt17(values[i]), fmt17(estimates[i].value),
                       fmt17(estimates[i].std_error), std::to_string(estimates[i].N),
                       fmt17(fit.slope), fmt17(fit.slope_se)});
  }
}

void ScalingResult::write_summary(std::ostream& os, std::string_view provenance) const {
  write_provenance(os, provenance);
  os << "parameter: " << parameter << '\n'
     << "points: " << values.size() << '\n'
     << "slope: " << fmt17(fit.slope) << '\n'
     << "slope_se: " << fmt17(fit.slope_se) << '\n'
     << "intercept: " << fmt17(fit.intercept) << '\n'
     << "degenerate: " << (fit.degenerate ? "true" : "false") << '\n';
}

ScalingResult scaling_study(std::string parameter, std::vector<double> values,
                            const std::function<ErrorEstimate(double)>& evaluate) {
  if (values.size() < 4) throw ConfigError("a scaling study needs at least 4 sweep values");
  ScalingResult r;
  r.parameter = std::move(parameter);
  r.values = std::move(values);
  std::vector<double> y;
  for (double v : r.values) {
    r.estimates.push_back(evaluate(v));
    y.push_back(r.estimates.back().value);
  }
  r.fit = fit_loglog(r.values, y);
  return r;
}

BoundReport bound_report(const PotentialModel& model, const MeanForceTable& table,
                         const TheoryConstants& c, const Ensemble* ensemble, int threads) {
  BoundReport rep;
  const double beta = c.beta;
  rep.entries.push_back(check_f_bound(model, table));
  for (auto& e : check_gradient_bounds(model, table, c.rho, c.kappa_sq, threads)) {
    rep.entries.push_back(std::move(e));
  }

  const char* f_bb = "E sup_t |e_t|^2 <= m 8 T beta kappa^2 / rho^2";
  const char* f_sq = "E sup_t |X^1_t - xi_t|^2 <= m T exp((2 L_b + 1) T) kappa^2 / rho";
  const char* f_j = "E sup_t |X^1_t - xi_t| <= sqrt(m T exp((2 L_b + 1) T) kappa^2 / rho)";
  const char* f_main = "E sup_t |X^1_t - xi_t| <= C m sqrt(beta) kappa / rho";
  const std::pair<const char*, const char*> path_entries[] = {
      {"martingale_sup", f_bb}, {"sup_sq_error", f_sq}, {"sup_error_jensen", f_j},
      {"sup_error", f_main}};
  if (!ensemble || !ensemble->density_ratio_bound) {
    const std::string why = !ensemble
                                ? "no path ensemble in this study"
                                : "deterministic start has no bounded density ratio to equilibrium";
    for (const auto& [name, formula] : path_entries) {
      rep.entries.push_back(skipped_bound(name, formula, why));
    }
    return rep;
  }
  const double m = *ensemble->density_ratio_bound;
  const double T = ensemble->plan.T;
  const ErrorEstimate e1 = pathwise_error(*ensemble, 1.0);
  const ErrorEstimate e2 = pathwise_error(*ensemble, 2.0);
  const ErrorEstimate mg = martingale_sup(*ensemble);
  const double ratio = c.kappa_sq / c.rho;
  const double sq_rhs = m * T * std::exp((2.0 * c.lipschitz_b + 1.0) * T) * ratio;
  rep.entries.push_back(check_bound("martingale_sup", f_bb, mg.value, mg.std_error,
                                    m * 8.0 * T * beta * c.kappa_sq / (c.rho * c.rho)));
  rep.entries.push_back(check_bound("sup_sq_error", f_sq, e2.value, e2.std_error, sq_rhs));
  rep.entries.push_back(
      check_bound("sup_error_jensen", f_j, e1.value, e1.std_error, std::sqrt(sq_rhs)));
  rep.entries.push_back(informational_bound(
      "sup_error", f_main, e1.value, e1.std_error, m * std::sqrt(beta * c.kappa_sq) / c.rho,
      "rhs omits the non-explicit constant C; slack is the ratio rhs/lhs"));
  return rep;
}

}  // namespace effdyn
