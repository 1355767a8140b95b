#include "effdyn/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "effdyn/error.hpp"

namespace effdyn {

PathSummary summarize(const CoupledPair& pair) {
  PathSummary s;
  const int steps = pair.eff.steps();
  for (int j = 0; j <= steps; ++j) {
    s.sup_abs_diff = std::max(s.sup_abs_diff, std::abs(pair.full.at(j, 0) - pair.eff.at(j, 0)));
    s.sup_abs_fluct = std::max(s.sup_abs_fluct, std::abs(pair.fluct_integral[j]));
  }
  s.x1_T = pair.full.at(steps, 0);
  s.xi_T = pair.eff.at(steps, 0);
  s.e_T = pair.fluct_integral[steps];
  return s;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

Ensemble run(const PotentialModel& model, const EffectiveDrift& drift, const InitialSampler& init,
             const NoisePlan& plan, const TwoScaleConfig* cfg, const EnsembleOptions& opts) {
  if (opts.paths < 2) throw ConfigError("an ensemble needs at least 2 paths");
  if (cfg) cfg->validate(model, plan);
  Ensemble e{plan, std::vector<PathSummary>(static_cast<std::size_t>(opts.paths)),
             init.density_ratio_bound()};
  parallel_for(e.paths.size(), opts.threads, [&](std::size_t i) {
    const auto x0 = init.draw(i);
    const CoupledPair pair = cfg ? simulate_two_scale_coupled(model, drift, x0, plan, *cfg, i)
                                 : simulate_coupled(model, drift, x0, plan, i);
    e.paths[i] = summarize(pair);
  });
  return e;
}

}  // namespace

Ensemble run_coupled_ensemble(const PotentialModel& model, const EffectiveDrift& drift,
                              const InitialSampler& init, const NoisePlan& plan,
                              const EnsembleOptions& opts) {
  return run(model, drift, init, plan, nullptr, opts);
}

Ensemble run_two_scale_ensemble(const PotentialModel& model, const EffectiveDrift& drift,
                                const InitialSampler& init, const NoisePlan& plan,
                                const TwoScaleConfig& cfg, const EnsembleOptions& opts) {
  return run(model, drift, init, plan, &cfg, opts);
}

}  // namespace effdyn
