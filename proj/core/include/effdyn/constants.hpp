#pragma once

#include <optional>
#include <string>

#include "effdyn/mean_force.hpp"
#include "effdyn/potential.hpp"
#include "effdyn/report.hpp"

namespace effdyn {

enum class RhoMethod { ExactGaussian, ConvexityLowerBound };

std::string to_string(RhoMethod m);

struct PoincareConstant {
  double rho = 0.0;
  RhoMethod method = RhoMethod::ExactGaussian;
};

struct KappaEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for closed-form and deterministic quadrature
  bool closed_form = false;
};

struct CAlphaEstimate {
  double value = 0.0;
  double p = 1.0;
  /// alpha(edge)^q times the marginal mass outside the grid, when known.
  std::optional<double> tail_estimate;
};

/// Every constant entering the error bounds.
struct TheoryConstants {
  double kappa_sq = 0.0;
  double kappa_sq_std_error = 0.0;
  double rho = 0.0;
  RhoMethod rho_method = RhoMethod::ExactGaussian;
  double lipschitz_b = 0.0;
  double c_alpha = 0.0;
  std::optional<double> c_alpha_p;
  double p = 1.0;
  double beta = 1.0;
};

/// kappa^2 = int |d_1 grad_bath V|^2 psi.
KappaEstimate kappa_sq(const PotentialModel& model, const MeanForceTable& table);
KappaEstimate kappa_sq(const PotentialModel& model);

/// Poincare constant of psi^xi in the normalization
/// Var(v) <= rho^-1 int |grad_bath v|^2 psi^xi. Exact 1/variance for
/// Gaussian conditionals; otherwise beta * inf lambda_min(bath Hessian) over
/// the truncated conditional support. Throws UnsupportedModel when that
/// infimum is not positive.
PoincareConstant poincare_constant(const PotentialModel& model);

/// max(0, sup over interior grid points of -b'), b' by centered differences.
double one_sided_lipschitz(const MeanForceTable& table);

/// int alpha(|xi|)^(2p/(2-p)) phi(xi) dxi with alpha(x) = sup_{|s|<=x} |b'(s)|,
/// alpha taken as a running maximum over the grid. p in [1, 2).
CAlphaEstimate c_alpha(const MeanForceTable& table, double p = 1.0);

/// int f^2 psi by conditional quadrature at each grid point, integrated against phi.
double f_l2(const PotentialModel& model, const MeanForceTable& table);

/// E[f(xi, .) | xi] at grid point j; zero up to quadrature error.
double fluctuation_conditional_mean(const PotentialModel& model, const MeanForceTable& table,
                                    int j);

/// int f^2 psi <= kappa^2 / rho, with a 1e-3 relative allowance.
BoundEntry check_f_bound(const PotentialModel& model, const MeanForceTable& table);
BoundEntry check_f_bound(const PotentialModel& model);

TheoryConstants compute_constants(const PotentialModel& model, const MeanForceTable& table,
                                  std::optional<double> p = std::nullopt);

}  // namespace effdyn
