#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effdyn/constants.hpp"
#include "effdyn/ensemble.hpp"
#include "effdyn/mean_force.hpp"
#include "effdyn/poisson.hpp"
#include "effdyn/potential.hpp"
#include "effdyn/report.hpp"

namespace effdyn {

struct ErrorEstimate {
  double value = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(N)
  int N = 0;
  double p = 1.0;
  std::string model;
  double T = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
};

/// Sample mean and standard error of `samples` (N >= 2).
ErrorEstimate sample_mean(std::span<const double> samples);

/// E[(max_j |X^1_j - xi_j|)^p].
ErrorEstimate pathwise_error(const Ensemble& ensemble, double p = 1.0);

/// E[(max_j |e_j|)^2].
ErrorEstimate martingale_sup(const Ensemble& ensemble);

struct GronwallRatio {
  double value = 0.0;
  bool exact_closure = false;  // both estimates vanish; value is left at 0
};

/// pathwise_error(p = 1) / sqrt(martingale_sup).
GronwallRatio gronwall_ratio(const Ensemble& ensemble);

/// Ordinary least squares of log y against log x.
struct LogLogFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  bool degenerate = false;  // every y is exactly 0; slope reported as 0
};

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct ScalingResult {
  std::string parameter;
  std::vector<double> values;
  std::vector<ErrorEstimate> estimates;
  LogLogFit fit;

  /// Columns parameter,value,estimate,se,n,slope,slope_se.
  void write_csv(std::ostream& os, std::string_view provenance = {}) const;
  void write_summary(std::ostream& os, std::string_view provenance = {}) const;
};

/// Evaluates the error at each sweep value (at least 4) and fits the rate.
ScalingResult scaling_study(std::string parameter, std::vector<double> values,
                            const std::function<ErrorEstimate(double)>& evaluate);

/// Every inequality in scope for the model. Path-space entries need an
/// ensemble; their right-hand sides are multiplied by the density ratio bound
/// m of the initial law and are skipped for a deterministic start.
BoundReport bound_report(const PotentialModel& model, const MeanForceTable& table,
                         const TheoryConstants& constants, const Ensemble* ensemble,
                         int threads = 1);

}  // namespace effdyn
