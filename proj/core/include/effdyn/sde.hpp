#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "effdyn/mean_force.hpp"
#include "effdyn/noise.hpp"
#include "effdyn/potential.hpp"

namespace effdyn {

inline constexpr double kExplosionRadius = 1e6;

/// States on the uniform grid t_j = j dt, j = 0..steps, row-major.
struct Trajectory {
  double dt = 0.0;
  int dim = 0;
  std::vector<double> states;

  int steps() const noexcept { return static_cast<int>(states.size()) / dim - 1; }
  double time(int j) const noexcept { return j * dt; }
  std::span<const double> state(int j) const {
    return std::span<const double>(states).subspan(static_cast<std::size_t>(j) * dim, dim);
  }
  double at(int j, int c) const { return states[static_cast<std::size_t>(j) * dim + c]; }

  /// Columns t,x1..xn (or t,xi for a scalar path).
  void write_csv(std::ostream& os, std::string_view provenance = {}) const;
};

/// Full path, effective path on the same W^1, and e_t = int_0^t f(X_s) ds.
struct CoupledPair {
  Trajectory full;
  Trajectory eff;
  std::vector<double> fluct_integral;
};

/// Closed drift b of the effective dynamics.
class EffectiveDrift {
 public:
  using Fluctuation = std::function<double(std::span<const double>)>;

  /// Closed form when d_1 V ignores the bath (then b is d_1 V itself, bit for
  /// bit), the table spline otherwise.
  static EffectiveDrift from_model(const PotentialModel& model, const MeanForceTable& table);
  static EffectiveDrift from_function(std::function<double(double)> b);

  double operator()(double xi) const { return b_(xi); }

  /// Replace f(x) = b(x_1) - d_1 V(x) in the running integral.
  EffectiveDrift with_fluctuation(Fluctuation f) const;
  const Fluctuation& fluctuation_override() const noexcept { return f_; }

 private:
  std::function<double(double)> b_;
  Fluctuation f_;
};

/// Time-scale separation of the bath: a single epsilon or one per bath coordinate.
struct TwoScaleConfig {
  enum class Integrator { Plain, Splitting };

  std::vector<double> epsilon{1.0};
  Integrator integrator = Integrator::Plain;
  double dt_factor = 1e-2;  // plain integrator requires dt <= min(eps) * dt_factor

  static TwoScaleConfig uniform(double eps, Integrator integrator = Integrator::Plain);
  /// epsilon for bath coordinate i in [1, n-1].
  double eps(int i) const { return epsilon.size() == 1 ? epsilon[0] : epsilon[i - 1]; }
  void validate(const PotentialModel& model, const NoisePlan& plan) const;
};

/// Euler-Maruyama for dX = -grad V dt + sqrt(2/beta) dW. Path `path` of the plan.
Trajectory simulate_full(const PotentialModel& model, std::span<const double> x0,
                         const NoisePlan& plan, std::uint64_t path = 0);

/// Effective dynamics from xi0 on the W^1 of path `path`.
Trajectory simulate_effective(const PotentialModel& model, const EffectiveDrift& drift, double xi0,
                              const NoisePlan& plan, std::uint64_t path = 0);

CoupledPair simulate_coupled(const PotentialModel& model, const EffectiveDrift& drift,
                             std::span<const double> x0, const NoisePlan& plan,
                             std::uint64_t path = 0);
CoupledPair simulate_coupled(const PotentialModel& model, const MeanForceTable& table,
                             std::span<const double> x0, const NoisePlan& plan,
                             std::uint64_t path = 0);

/// Bath drift -d_i V / eps_i and bath noise sqrt(2 / (beta eps_i)); the slow
/// coordinate is unscaled.
Trajectory simulate_two_scale(const PotentialModel& model, std::span<const double> x0,
                              const NoisePlan& plan, const TwoScaleConfig& cfg,
                              std::uint64_t path = 0);

/// Two-scale system coupled to the effective dynamics through W^1.
CoupledPair simulate_two_scale_coupled(const PotentialModel& model, const EffectiveDrift& drift,
                                       std::span<const double> x0, const NoisePlan& plan,
                                       const TwoScaleConfig& cfg, std::uint64_t path = 0);

}  // namespace effdyn
