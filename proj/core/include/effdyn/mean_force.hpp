#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "effdyn/potential.hpp"
#include "effdyn/spline.hpp"

namespace effdyn {

/// b(xi) = E[d_1 V | x_1 = xi], by Gauss-Hermite quadrature against the
/// closed-form Gaussian conditional, or by the tabulated conditional otherwise.
double mean_force(const PotentialModel& model, double xi);

/// log of the unnormalized marginal, up to a xi-independent constant.
double log_marginal_unnormalized(const PotentialModel& model, double xi);

/// Location, spread and normalization of the marginal phi along x_1,
/// estimated by a pilot quadrature on an outward-grown window.
struct MarginalSummary {
  double mean = 0.0;
  double stddev = 0.0;
  double log_norm = 0.0;  // log of int exp(log_marginal_unnormalized)
};

MarginalSummary marginal_summary(const PotentialModel& model);

/// Normalized marginal density phi(xi).
double marginal_density(const PotentialModel& model, double xi);

/// F(xi) = -beta^-1 ln phi(xi) with phi normalized over R.
double free_energy(const PotentialModel& model, double xi);

/// Tabulated mean force, free energy and marginal on a uniform grid; the
/// closed drift of the effective dynamics.
///
/// b is interpolated by a natural cubic spline and continued linearly past
/// the grid. F is shifted so that F(xi_min) = 0 and phi is normalized with
/// the grid Simpson rule.
class MeanForceTable {
 public:
  static MeanForceTable build(const PotentialModel& model, double xi_min, double xi_max, int m);
  /// Grid [mu - 6 sd, mu + 6 sd] of the marginal.
  static MeanForceTable build_default(const PotentialModel& model, int m = 241);
  /// Table from explicit columns (phi renormalized over the grid).
  static MeanForceTable from_columns(double xi_min, double xi_max, std::vector<double> b,
                                     std::vector<double> free_energy, std::vector<double> phi,
                                     double beta);

  int size() const noexcept { return static_cast<int>(xi_.size()); }
  double xi_min() const noexcept { return xi_.front(); }
  double xi_max() const noexcept { return xi_.back(); }
  double spacing() const noexcept { return h_; }
  double beta() const noexcept { return beta_; }

  std::span<const double> xi() const noexcept { return xi_; }
  std::span<const double> b() const noexcept { return b_; }
  std::span<const double> free_energy() const noexcept { return f_; }
  std::span<const double> phi() const noexcept { return phi_; }

  double b_at(double xi) const { return spline_(xi); }

  /// b' at grid point j: centered differences inside, one-sided at the ends.
  double b_prime(int j) const;

  /// Grid Simpson integral of `values` (one per grid point).
  double integrate(std::span<const double> values) const;
  std::span<const double> weights() const noexcept { return w_; }

  /// Marginal mass outside the grid when the model's marginal is normalizable on R.
  std::optional<double> outside_mass() const noexcept { return outside_mass_; }

  /// CSV with columns xi,b,F,phi and 17 significant digits.
  void write_csv(std::ostream& os, std::string_view provenance = {}) const;

 private:
  MeanForceTable() = default;
  void finalize();

  double h_ = 0.0;
  double beta_ = 1.0;
  std::vector<double> xi_, b_, f_, phi_, w_;
  NaturalCubicSpline spline_;
  std::optional<double> outside_mass_;
};

/// f(x) = b(x_1) - d_1 V(x) with b interpolated from the table.
double fluctuation(const PotentialModel& model, const MeanForceTable& table,
                   std::span<const double> x);

}  // namespace effdyn
