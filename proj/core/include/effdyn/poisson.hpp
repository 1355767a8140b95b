#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "effdyn/mean_force.hpp"
#include "effdyn/potential.hpp"
#include "effdyn/report.hpp"

namespace effdyn {

struct PoissonGrid {
  int points = 2001;
  double width_sd = 8.0;              // half-width in conditional standard deviations
  std::optional<double> half_width;   // overrides width_sd when set
};

struct PoissonDiagnostics {
  double residual_norm = 0.0;   // max relative residual away from the two boundary cells
  double mean_u = 0.0;          // psi-mean of u
  double dirichlet = 0.0;       // int |u'|^2 psi^xi
  double f_sq = 0.0;            // int f^2 psi^xi
  double f_mean = 0.0;          // psi-mean of f before projection
};

/// Zero-mean solution of beta^-1 (e^{-beta V} u')' = f e^{-beta V} on a
/// uniform bath grid.
struct PoissonSolution {
  double xi = 0.0;
  double beta = 1.0;
  std::vector<double> x2;
  std::vector<double> u;
  std::vector<double> residual;  // relative residual of each cell balance
  PoissonDiagnostics diagnostics;

  /// Columns x2,u,residual.
  void write_csv(std::ostream& os, std::string_view provenance = {}) const;
};

/// Finite-volume solve on [center - w, center + w] with face conductances
/// exp(-beta U) at cell midpoints and exact cell integrals of f psi. The two
/// outer cells carry the tail mass beyond the grid, so the flux vanishes at
/// infinity rather than at the truncation points.
PoissonSolution solve_poisson(const std::function<double(double)>& bath_potential,
                              const std::function<double(double)>& f, double beta, double center,
                              double sd, const PoissonGrid& grid = {});

/// Solve with U(y) = V(xi, y) and f(xi, y) = b(xi) - d_1 V(xi, y). n = 2 only.
PoissonSolution solve_poisson(const PotentialModel& model, const MeanForceTable& table, double xi,
                              const PoissonGrid& grid = {});

/// int |u'|^2 psi^xi <= beta^2 / rho int f^2 psi^xi, with a 1e-3 relative allowance.
BoundEntry check_gradient_bound(const PoissonSolution& sol, double rho);

/// Per-grid-point and phi-weighted checks over every table grid point:
/// the worst pointwise ratio and int |grad u|^2 psi <= beta^2 kappa^2 / rho^2.
/// Bath dimension above 1 falls back to the closed form available for
/// Gaussian conditionals with constant cross derivative.
std::vector<BoundEntry> check_gradient_bounds(const PotentialModel& model,
                                              const MeanForceTable& table, double rho,
                                              double kappa_sq, int threads = 1,
                                              const PoissonGrid& grid = {});

}  // namespace effdyn
