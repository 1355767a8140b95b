#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "effdyn/expr.hpp"

namespace effdyn {

enum class Family {
  GaussianCoupled,  // GC(a, k_c, k_b), n = 2
  Tracking,         // TR(V1, k, n)
  DoubleWell,       // DW(k, n) = TR with V1 = (x^2 - 1)^2
  Decoupled,        // DEC(V1, W2..Wn)
  Zero,             // V = 0; test model, not confining
};

std::string family_tag(Family f);

/// Closed-form facts for models whose bath conditionals are Gaussian with a
/// bath Hessian independent of the bath coordinates. The law of x_2^n given
/// x_1 = xi is N(mean_slope * xi + mean_offset, covariance).
struct AnalyticFacts {
  Eigen::VectorXd mean_slope;
  Eigen::VectorXd mean_offset;
  Eigen::MatrixXd bath_hessian;  // constant Hessian of V in x_2^n
  Eigen::MatrixXd covariance;    // (beta * bath_hessian)^-1
  Eigen::VectorXd cross;         // constant cross derivative (d_i d_1 V)_{i >= 2}
  double kappa_sq = 0.0;
  double rho = 0.0;
};

/// Bath drift d_i V = rate_i * (x_i - slope_i * x_1 - offset_i); lets the
/// two-scale integrator take exact Ornstein-Uhlenbeck bath substeps.
struct LinearBath {
  std::vector<double> rate;
  std::vector<double> slope;
  std::vector<double> offset;
};

/// Overdamped Langevin potential V : R^n -> R with inverse temperature beta.
///
/// Evaluators are pure and the object is immutable after construction, so a
/// single model may be shared between any number of worker threads.
class PotentialModel {
 public:
  static PotentialModel gaussian_coupled(double a, double k_c, double k_b, double beta);
  static PotentialModel tracking(ExprPotential1D v1, double k, int n, double beta);
  static PotentialModel double_well(double k, int n, double beta);
  static PotentialModel decoupled(ExprPotential1D v1, std::vector<ExprPotential1D> bath,
                                  double beta);
  static PotentialModel zero(int n, double beta);

  Family family() const noexcept { return family_; }
  int dim() const noexcept { return n_; }
  int bath_dim() const noexcept { return n_ - 1; }
  double beta() const noexcept { return beta_; }

  double energy(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  std::vector<double> gradient(std::span<const double> x) const;
  /// energy(x) with gradient(x, out) in one pass; identical results.
  double energy_gradient(std::span<const double> x, std::span<double> out) const;
  double partial1(std::span<const double> x) const;
  /// (d_2 d_1 V, ..., d_n d_1 V)
  std::vector<double> cross(std::span<const double> x) const;
  /// Hessian of V restricted to the bath coordinates x_2^n.
  Eigen::MatrixXd bath_hessian(std::span<const double> x) const;

  const std::optional<AnalyticFacts>& analytic_facts() const noexcept { return facts_; }

  /// b(xi) in closed form when the family provides one. For families whose
  /// d_1 V does not depend on the bath this evaluates d_1 V itself, so the
  /// result is bitwise identical to the full drift.
  std::optional<double> closed_form_mean_force(double xi) const;

  /// True when d_1 V does not depend on x_2^n (kappa = 0 by structure).
  bool first_partial_bath_independent() const noexcept;

  std::optional<LinearBath> linear_bath() const;

  /// Potential of bath coordinate i (1-based over x_2..x_n, i.e. i in [2, n])
  /// when the conditional law factorizes over bath coordinates.
  bool bath_factorizes() const noexcept;
  Dual2 bath_factor(int i, double xi, double y) const;

  /// Full equilibrium exp(-beta V) is Gaussian (V is an exact quadratic form).
  bool gaussian_equilibrium() const;

  /// Heuristic confinement check: every 1-D part grows at least quadratically.
  bool is_confining() const;

  /// Lower bound on the smallest eigenvalue of the bath Hessian over the box
  /// [lo_i, hi_i] of bath coordinates (constant families ignore the box).
  double min_bath_curvature(std::span<const double> lo, std::span<const double> hi) const;

  std::string describe() const;

 private:
  struct GcParams {
    double a, k_c, k_b;
  };
  struct TrackParams {
    ExprPotential1D v1;
    double k;
  };
  struct DecParams {
    ExprPotential1D v1;
    std::vector<ExprPotential1D> bath;
  };
  struct ZeroParams {};

  using Params = std::variant<GcParams, TrackParams, DecParams, ZeroParams>;

  PotentialModel(Family family, int n, double beta, Params params);
  void check_dim(std::span<const double> x) const;
  void build_facts();

  Family family_;
  int n_;
  double beta_;
  Params params_;
  std::optional<AnalyticFacts> facts_;
};

}  // namespace effdyn
