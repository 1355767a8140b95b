#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "effdyn/config.hpp"
#include "effdyn/error.hpp"
#include "effdyn/runner.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int threads = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "experiment config (key = value)");
  sub->add_option("--seed", c.seed, "master seed, overrides the config");
  sub->add_option("--out", c.out, "output directory, overrides the config");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

effdyn::ExperimentConfig load(const Common& c) {
  effdyn::ExperimentConfig cfg = c.config.empty() ? effdyn::ExperimentConfig{}
                                                  : effdyn::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.out) cfg.output_dir = *c.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"effective dynamics error studies for overdamped Langevin models"};
  app.set_version_flag("--version", effdyn::version());
  app.require_subcommand(1);

  Common common;
  struct Study {
    const char* name;
    const char* study;
    const char* help;
  };
  const Study studies[] = {
      {"constants", "constants", "kappa^2, rho, L_b, C_alpha and the quadrature bounds"},
      {"mean-force", "mean-force", "tabulate b, F and phi"},
      {"error-study", "error", "coupled ensemble, pathwise errors and all bounds"},
      {"scaling", "scaling", "error over a parameter sweep with a log-log fit"},
      {"poisson-check", "poisson-check", "solve the bath Poisson problem at chosen xi"},
  };
  for (const auto& s : studies) add_common(app.add_subcommand(s.name, s.help), common);
  CLI::App* val = app.add_subcommand("validate", "check a config without running it");
  add_common(val, common);

  CLI11_PARSE(app, argc, argv);

  effdyn::ExperimentConfig cfg;
  try {
    cfg = load(common);
  } catch (const effdyn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return effdyn::kExitConfig;
  }

  if (val->parsed()) {
    const auto diags = effdyn::validate(cfg);
    for (const auto& d : diags) std::cout << d.key << ": " << d.message << '\n';
    return diags.empty() ? effdyn::kExitOk : effdyn::kExitConfig;
  }
  for (const auto& s : studies) {
    if (app.got_subcommand(s.name)) cfg.study = s.study;
  }
  return effdyn::run(cfg, {common.threads, &std::cerr});
}
