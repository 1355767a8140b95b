#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "effdyn/config.hpp"
#include "effdyn/ensemble.hpp"
#include "effdyn/estimators.hpp"
#include "effdyn/report.hpp"

namespace effdyn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitViolated = 3;

std::string version();

/// "effdyn <version> config=<hash>"
std::string provenance(const ExperimentConfig& cfg);

struct RunOptions {
  int threads = 1;  // speed only; never changes results
  std::ostream* log = nullptr;
};

/// One estimate at the configured dt and at dt/2 on the refined Brownian path.
struct Sensitivity {
  std::string statistic;
  ErrorEstimate base;
  ErrorEstimate refined;

  double change() const;
  /// max(2 std_error, 1e-3 |value|) of the base estimate.
  double tolerance() const;
  bool stable() const { return change() < tolerance() || change() == 0.0; }
};

void write_sensitivity_csv(std::ostream& os, const std::vector<Sensitivity>& rows,
                           std::string_view provenance = {});

struct RunResult {
  int exit_code = kExitOk;
  BoundReport report;
  std::vector<std::pair<std::string, std::string>> files;  // name, content
  std::vector<std::string> messages;
};

/// Runs the study in memory; nothing is written.
RunResult execute(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// execute() followed by writing every artifact into cfg.output_dir.
/// Exit 0 when every checked bound holds, 3 when one is violated, 2 on a
/// configuration or model error.
int run(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Coupled ensemble for a configuration: two-scale when two_scale.epsilon is set.
Ensemble run_ensemble(const ExperimentConfig& cfg, const PotentialModel& model,
                      const MeanForceTable& table, const NoisePlan& plan, int threads);

MeanForceTable build_table(const ExperimentConfig& cfg, const PotentialModel& model);

}  // namespace effdyn
