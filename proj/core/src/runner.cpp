#include "effdyn/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "effdyn/constants.hpp"
#include "effdyn/csv.hpp"
#include "effdyn/error.hpp"
#include "effdyn/poisson.hpp"

#ifndef EFFDYN_VERSION_STRING
#define EFFDYN_VERSION_STRING "0.0.0"
#endif

namespace effdyn {

std::string version() { return EFFDYN_VERSION_STRING; }

std::string provenance(const ExperimentConfig& cfg) {
  return "effdyn " + version() + " config=" + config_hash(cfg);
}

double Sensitivity::change() const { return std::abs(refined.value - base.value); }

double Sensitivity::tolerance() const {
  return std::max(2.0 * base.std_error, 1e-3 * std::abs(base.value));
}

void write_sensitivity_csv(std::ostream& os, const std::vector<Sensitivity>& rows,
                           std::string_view prov) {
  write_provenance(os, prov);
  os << "statistic,value,se,value_half_dt,se_half_dt,change,tolerance,stable\n";
  for (const auto& r : rows) {
    write_csv_row(os, {r.statistic, fmt17(r.base.value), fmt17(r.base.std_error),
                       fmt17(r.refined.value), fmt17(r.refined.std_error), fmt17(r.change()),
                       fmt17(r.tolerance()), r.stable() ? "true" : "false"});
  }
}

MeanForceTable build_table(const ExperimentConfig& cfg, const PotentialModel& model) {
  if (cfg.grid_xi_min && cfg.grid_xi_max) {
    return MeanForceTable::build(model, *cfg.grid_xi_min, *cfg.grid_xi_max, cfg.grid_m);
  }
  return MeanForceTable::build_default(model, cfg.grid_m);
}

Ensemble run_ensemble(const ExperimentConfig& cfg, const PotentialModel& model,
                      const MeanForceTable& table, const NoisePlan& plan, int threads) {
  const EffectiveDrift drift = EffectiveDrift::from_model(model, table);
  const InitialSampler init(model, build_initial_law(cfg), cfg.seed);
  const EnsembleOptions opts{cfg.paths, threads};
  if (cfg.epsilon.empty()) return run_coupled_ensemble(model, drift, init, plan, opts);
  TwoScaleConfig ts;
  ts.epsilon = cfg.epsilon;
  ts.integrator = cfg.integrator == "plain" ? TwoScaleConfig::Integrator::Plain
                                            : TwoScaleConfig::Integrator::Splitting;
  return run_two_scale_ensemble(model, drift, init, plan, ts, opts);
}

namespace {

std::string constants_summary(const PotentialModel& model,
                              const MeanForceTable& table, const TheoryConstants& c,
                              const std::string& prov) {
  std::ostringstream os;
  write_provenance(os, prov);
  os << "model: " << model.describe() << '\n'
     << "beta: " << fmt17(c.beta) << '\n'
     << "kappa_sq: " << fmt17(c.kappa_sq) << '\n'
     << "kappa_sq_se: " << fmt17(c.kappa_sq_std_error) << '\n'
     << "rho: " << fmt17(c.rho) << '\n'
     << "rho_method: " << to_string(c.rho_method) << '\n'
     << "lipschitz_b: " << fmt17(c.lipschitz_b) << '\n'
     << "c_alpha: " << fmt17(c.c_alpha) << '\n';
  if (c.c_alpha_p) os << "c_alpha_p: " << fmt17(*c.c_alpha_p) << "\np: " << fmt17(c.p) << '\n';
  os << "grid_xi_min: " << fmt17(table.xi_min()) << '\n'
     << "grid_xi_max: " << fmt17(table.xi_max()) << '\n'
     << "grid_m: " << table.size() << '\n';
  if (const auto om = table.outside_mass()) os << "outside_mass: " << fmt17(*om) << '\n';
  return os.str();
}

void estimate_lines(std::ostream& os, const std::string& name, const ErrorEstimate& e) {
  os << name << ": " << fmt17(e.value) << '\n' << name << "_se: " << fmt17(e.std_error) << '\n';
}

std::vector<Sensitivity> ensemble_sensitivity(const Ensemble& base, const Ensemble& fine) {
  return {{"pathwise_error_p1", pathwise_error(base, 1.0), pathwise_error(fine, 1.0)},
          {"pathwise_error_p2", pathwise_error(base, 2.0), pathwise_error(fine, 2.0)},
          {"martingale_sup", martingale_sup(base), martingale_sup(fine)}};
}

}  // namespace

RunResult execute(const ExperimentConfig& cfg, const RunOptions& opts) {
  RunResult res;
  const auto diags = validate(cfg);
  if (!diags.empty()) {
    for (const auto& d : diags) res.messages.push_back(d.key + ": " + d.message);
    res.exit_code = kExitConfig;
    return res;
  }
  const std::string prov = provenance(cfg);
  auto emit = [&](std::string name, const auto& writer) {
    std::ostringstream os;
    writer(os);
    res.files.emplace_back(std::move(name), os.str());
  };

  const PotentialModel model = build_model(cfg);
  const MeanForceTable table = build_table(cfg, model);
  emit("mean_force.csv", [&](std::ostream& os) { table.write_csv(os, prov); });
  if (cfg.study == "mean-force") return res;

  const TheoryConstants consts =
      compute_constants(model, table, cfg.p != 1.0 ? std::optional(cfg.p) : std::nullopt);
  emit("constants.txt",
       [&](std::ostream& os) { os << constants_summary(model, table, consts, prov); });

  const NoisePlan plan = NoisePlan::from_dt(cfg.seed, cfg.T, cfg.dt);
  if (cfg.study == "error") {
    const Ensemble ens = run_ensemble(cfg, model, table, plan, opts.threads);
    res.report = bound_report(model, table, consts, &ens, opts.threads);
    const GronwallRatio gr = gronwall_ratio(ens);
    emit("estimates.txt", [&](std::ostream& os) {
      write_provenance(os, prov);
      os << "paths: " << ens.paths.size() << '\n'
         << "steps: " << plan.steps() << '\n'
         << "dt: " << fmt17(plan.dt()) << '\n';
      estimate_lines(os, "pathwise_error_p1", pathwise_error(ens, 1.0));
      estimate_lines(os, "pathwise_error_p2", pathwise_error(ens, 2.0));
      estimate_lines(os, "martingale_sup", martingale_sup(ens));
      os << "gronwall_ratio: " << fmt17(gr.value) << '\n'
         << "exact_closure: " << (gr.exact_closure ? "true" : "false") << '\n';
    });
    if (cfg.dt_halving) {
      const Ensemble fine = run_ensemble(cfg, model, table, plan.refined(), opts.threads);
      emit("sensitivity.csv", [&](std::ostream& os) {
        write_sensitivity_csv(os, ensemble_sensitivity(ens, fine), prov);
      });
    }
  } else if (cfg.study == "scaling") {
    std::vector<Sensitivity> sens;
    auto evaluate = [&](double value) {
      const ExperimentConfig point = with_parameter(cfg, cfg.sweep_parameter, value);
      const PotentialModel m = build_model(point);
      const MeanForceTable t = build_table(point, m);
      const NoisePlan pl = NoisePlan::from_dt(point.seed, point.T, point.dt);
      ErrorEstimate e = pathwise_error(run_ensemble(point, m, t, pl, opts.threads), cfg.p);
      if (cfg.dt_halving) {
        const ErrorEstimate fine =
            pathwise_error(run_ensemble(point, m, t, pl.refined(), opts.threads), cfg.p);
        sens.push_back({cfg.sweep_parameter + "=" + fmt17(value), e, fine});
      }
      e.model = m.describe();
      return e;
    };
    const ScalingResult sr = scaling_study(cfg.sweep_parameter, cfg.sweep_values, evaluate);
    emit("scaling.csv", [&](std::ostream& os) { sr.write_csv(os, prov); });
    emit("scaling.txt", [&](std::ostream& os) { sr.write_summary(os, prov); });
    if (cfg.dt_halving) {
      emit("sensitivity.csv", [&](std::ostream& os) { write_sensitivity_csv(os, sens, prov); });
    }
    res.report = bound_report(model, table, consts, nullptr, opts.threads);
  } else if (cfg.study == "poisson-check") {
    res.report = bound_report(model, table, consts, nullptr, opts.threads);
    const PoissonGrid grid{cfg.poisson_points, cfg.poisson_width_sd, std::nullopt};
    for (std::size_t i = 0; i < cfg.poisson_xi.size(); ++i) {
      const PoissonSolution sol = solve_poisson(model, table, cfg.poisson_xi[i], grid);
      res.report.entries.push_back(check_gradient_bound(sol, consts.rho));
      emit("poisson_" + std::to_string(i) + ".csv",
           [&](std::ostream& os) { sol.write_csv(os, prov); });
    }
  } else {
    res.report = bound_report(model, table, consts, nullptr, opts.threads);
  }

  emit("bounds.csv", [&](std::ostream& os) { res.report.write_csv(os, prov); });
  emit("bounds.txt", [&](std::ostream& os) { res.report.write_summary(os, prov); });
  res.exit_code = res.report.all_satisfied() ? kExitOk : kExitViolated;
  return res;
}

int run(const ExperimentConfig& cfg, const RunOptions& opts) {
  std::ostream& log = opts.log ? *opts.log : std::cerr;
  RunResult res;
  try {
    res = execute(cfg, opts);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (const auto& m : res.messages) log << m << '\n';
  if (res.exit_code == kExitConfig) return res.exit_code;
  try {
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : res.files) {
      std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
      out << content;
      if (!out) throw ConfigError("cannot write " + (dir / name).string());
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (const auto& e : res.report.entries) {
    if (e.status == BoundStatus::Violated) log << "violated: " << e.name << " (" << e.formula << ")\n";
  }
  return res.exit_code;
}

}  // namespace effdyn
