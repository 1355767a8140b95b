#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "effdyn/noise.hpp"
#include "effdyn/sampling.hpp"
#include "effdyn/sde.hpp"

namespace effdyn {

/// Grid-point statistics of one coupled path.
struct PathSummary {
  double sup_abs_diff = 0.0;   // max_j |X^1_j - xi_j|
  double sup_abs_fluct = 0.0;  // max_j |e_j|
  double x1_T = 0.0;
  double xi_T = 0.0;
  double e_T = 0.0;
};

PathSummary summarize(const CoupledPair& pair);

struct EnsembleOptions {
  int paths = 4096;
  int threads = 1;
};

/// Summaries in path-index order; independent of the thread count.
struct Ensemble {
  NoisePlan plan;
  std::vector<PathSummary> paths;
  std::optional<double> density_ratio_bound;  // m of the initial law, none for a fixed start
};

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Exceptions are
/// rethrown for the smallest failing index.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

Ensemble run_coupled_ensemble(const PotentialModel& model, const EffectiveDrift& drift,
                              const InitialSampler& init, const NoisePlan& plan,
                              const EnsembleOptions& opts);

/// Full system replaced by the two-scale system with configuration `cfg`.
Ensemble run_two_scale_ensemble(const PotentialModel& model, const EffectiveDrift& drift,
                                const InitialSampler& init, const NoisePlan& plan,
                                const TwoScaleConfig& cfg, const EnsembleOptions& opts);

}  // namespace effdyn
