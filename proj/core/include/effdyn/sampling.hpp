#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "effdyn/noise.hpp"
#include "effdyn/potential.hpp"

namespace effdyn {

struct MalaOptions {
  double initial_step_scale = 1e-2;  // step = scale / beta before adaptation
  int burn_in = 10000;
  double target_acceptance = 0.574;
  double min_acceptance = 0.4;
  double max_acceptance = 0.8;
};

struct MalaDiagnostics {
  double step = 0.0;
  double acceptance = 0.0;  // pilot acceptance after adaptation
};

/// Draws from the Gibbs measure exp(-beta V) / Z.
///
/// Exact Gaussian draws when V is a quadratic form; otherwise one pilot MALA
/// chain adapts the step during its burn-in and checks the post-burn-in
/// acceptance, after which every path runs its own burn-in from the pilot
/// state with the adapted step.
class EquilibriumSampler {
 public:
  EquilibriumSampler(const PotentialModel& model, std::uint64_t seed, MalaOptions opts = {});

  bool exact() const noexcept { return exact_; }
  const std::optional<MalaDiagnostics>& mala() const noexcept { return mala_; }

  /// Draw for path `path`; a pure function of (seed, path).
  std::vector<double> draw(std::uint64_t path, double* acceptance = nullptr) const;

  /// Gaussian mean and covariance (exact case only).
  const Eigen::VectorXd& mean() const { return mean_; }
  Eigen::MatrixXd covariance() const { return chol_ * chol_.transpose(); }

 private:
  double mala_chain(std::vector<double>& x, double step, int steps, CounterRng& rng) const;

  const PotentialModel* model_;
  std::uint64_t seed_;
  MalaOptions opts_;
  bool exact_ = false;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd chol_;
  std::vector<double> start_;
  std::optional<MalaDiagnostics> mala_;
};

/// One draw using `rng`; builds a sampler per call, so prefer
/// EquilibriumSampler for ensembles.
std::vector<double> sample_equilibrium(const PotentialModel& model, CounterRng& rng);

/// Law of X_0 for an ensemble.
struct InitialLaw {
  enum class Kind { Equilibrium, Fixed, Custom };
  using Sampler = std::function<std::vector<double>(CounterRng&)>;

  Kind kind = Kind::Equilibrium;
  std::vector<double> x0;
  Sampler sampler;
  double density_ratio_bound = 1.0;  // m = sup psi_0 / psi for custom laws

  static InitialLaw equilibrium() { return {}; }
  static InitialLaw fixed(std::vector<double> x0);
  static InitialLaw custom(Sampler sampler, double m);
};

class InitialSampler {
 public:
  InitialSampler(const PotentialModel& model, InitialLaw law, std::uint64_t seed);

  std::vector<double> draw(std::uint64_t path) const;
  /// 1 at equilibrium, m for custom laws, none for a fixed start.
  std::optional<double> density_ratio_bound() const;
  const std::optional<EquilibriumSampler>& equilibrium() const noexcept { return eq_; }

 private:
  InitialLaw law_;
  std::uint64_t seed_;
  int dim_;
  std::optional<EquilibriumSampler> eq_;
};

}  // namespace effdyn
