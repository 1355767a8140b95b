#include "effdyn/poisson.hpp"

#include <algorithm>
#include <cmath>

#include "effdyn/conditional.hpp"
#include "effdyn/csv.hpp"
#include "effdyn/ensemble.hpp"
#include "effdyn/error.hpp"
#include "effdyn/quadrature.hpp"

namespace effdyn {

namespace {

double cell_integral(const std::function<double(double)>& g, double a, double b) {
  const QuadratureRule& gl = gauss_legendre(4);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t k = 0; k < gl.nodes.size(); ++k) s += gl.weights[k] * g(mid + half * gl.nodes[k]);
  return s * half;
}

}  // namespace

PoissonSolution solve_poisson(const std::function<double(double)>& bath_potential,
                              const std::function<double(double)>& f, double beta, double center,
                              double sd, const PoissonGrid& grid) {
  const int n = grid.points;
  if (n < 5) throw Error("Poisson grid needs at least 5 points");
  if (!(sd > 0.0)) throw Error("Poisson grid needs a positive conditional spread");
  const double w = grid.half_width ? *grid.half_width : grid.width_sd * sd;
  const double lo = center - w, h = 2.0 * w / (n - 1);
  const double u_ref = bath_potential(center);
  auto psi = [&](double y) { return std::exp(-beta * (bath_potential(y) - u_ref)); };
  auto fpsi = [&](double y) { return f(y) * psi(y); };
  auto ffpsi = [&](double y) {
    const double v = f(y);
    return v * v * psi(y);
  };

  PoissonSolution sol;
  sol.beta = beta;
  sol.x2.resize(n);
  for (int i = 0; i < n; ++i) sol.x2[i] = lo + i * h;

  // Cells [y_i - h/2, y_i + h/2] clipped to the grid, outer cells extended by
  // another half-width to carry the tails.
  std::vector<double> wt(n), rhs(n), c(n - 1);
  double f_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = i == 0 ? sol.x2[0] : sol.x2[i] - 0.5 * h;
    const double b = i == n - 1 ? sol.x2[n - 1] : sol.x2[i] + 0.5 * h;
    wt[i] = cell_integral(psi, a, b);
    rhs[i] = cell_integral(fpsi, a, b);
    f_sq += cell_integral(ffpsi, a, b);
  }
  const int tail_panels = 400;
  for (int side = 0; side < 2; ++side) {
    const double a = side == 0 ? lo - w : sol.x2[n - 1];
    const double b = side == 0 ? lo : sol.x2[n - 1] + w;
    const int i = side == 0 ? 0 : n - 1;
    wt[i] += panel_integral(psi, a, b, tail_panels);
    rhs[i] += panel_integral(fpsi, a, b, tail_panels);
    f_sq += panel_integral(ffpsi, a, b, tail_panels);
  }
  for (int i = 0; i + 1 < n; ++i) c[i] = psi(sol.x2[i] + 0.5 * h);

  double total_w = 0.0, total_r = 0.0;
  for (int i = 0; i < n; ++i) {
    total_w += wt[i];
    total_r += rhs[i];
  }
  if (!(total_w > 0.0) || !std::isfinite(total_w)) {
    throw QuadratureError("conditional density is not integrable on the Poisson grid");
  }
  sol.diagnostics.f_mean = total_r / total_w;
  sol.diagnostics.f_sq = f_sq / total_w;
  for (int i = 0; i < n; ++i) rhs[i] -= sol.diagnostics.f_mean * wt[i];

  // Face fluxes q_{i+1/2} = sum of cell sources to the left, or minus the sum
  // to the right past the density peak, to avoid cancellation in the tails.
  int peak = 0;
  for (int i = 1; i < n; ++i) {
    if (wt[i] > wt[peak]) peak = i;
  }
  std::vector<double> q(n - 1);
  double acc = 0.0;
  for (int i = 0; i < std::min(peak, n - 1); ++i) q[i] = (acc += rhs[i]);
  acc = 0.0;
  for (int i = n - 2; i >= peak; --i) q[i] = -(acc += rhs[i + 1]);

  sol.u.assign(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    if (!(c[i] > 0.0)) throw QuadratureError("Poisson system is singular (vanishing conductance)");
    sol.u[i + 1] = sol.u[i] + beta * h * q[i] / c[i];
  }
  double mean_u = 0.0;
  for (int i = 0; i < n; ++i) mean_u += wt[i] * sol.u[i];
  mean_u /= total_w;
  for (double& v : sol.u) v -= mean_u;
  double check = 0.0;
  for (int i = 0; i < n; ++i) check += wt[i] * sol.u[i];
  sol.diagnostics.mean_u = check / total_w;

  // Residual of every cell balance recomputed from u.
  double scale = 0.0;
  for (double r : rhs) scale = std::max(scale, std::abs(r));
  sol.residual.assign(n, 0.0);
  double dirichlet = 0.0;
  std::vector<double> flux(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    const double du = (sol.u[i + 1] - sol.u[i]) / h;
    flux[i] = c[i] * du / beta;
    dirichlet += c[i] * du * du * h;
  }
  sol.diagnostics.dirichlet = dirichlet / total_w;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double in = i > 0 ? flux[i - 1] : 0.0;
    const double out = i + 1 < n ? flux[i] : 0.0;
    sol.residual[i] = scale > 0.0 ? (out - in - rhs[i]) / scale : 0.0;
    if (i > 0 && i + 1 < n) worst = std::max(worst, std::abs(sol.residual[i]));
  }
  sol.diagnostics.residual_norm = worst;
  return sol;
}

PoissonSolution solve_poisson(const PotentialModel& model, const MeanForceTable& table, double xi,
                              const PoissonGrid& grid) {
  if (model.dim() != 2) {
    throw UnsupportedModel("the Poisson solver handles one bath coordinate (n = 2) only");
  }
  const ConditionalLaw law = conditional_law(model, xi);
  // Bath-independent d_1 V is its own mean force; f vanishes identically.
  const double b = model.first_partial_bath_independent() ? *model.closed_form_mean_force(xi)
                                                          : table.b_at(xi);
  auto energy = [&](double y) {
    const double x[2] = {xi, y};
    return model.energy(x);
  };
  auto f = [&](double y) {
    const double x[2] = {xi, y};
    return b - model.partial1(x);
  };
  PoissonSolution sol = solve_poisson(energy, f, model.beta(), law.mean()(0), law.stddev()(0), grid);
  sol.xi = xi;
  return sol;
}

void PoissonSolution::write_csv(std::ostream& os, std::string_view provenance) const {
  write_provenance(os, provenance);
  os << "x2,u,residual\n";
  for (std::size_t i = 0; i < x2.size(); ++i) write_csv_row(os, {x2[i], u[i], residual[i]});
}

BoundEntry check_gradient_bound(const PoissonSolution& sol, double rho) {
  const double rhs = sol.beta * sol.beta / rho * sol.diagnostics.f_sq;
  return check_bound("poisson_gradient_xi=" + fmt17(sol.xi),
                     "int |u'|^2 psi^xi <= beta^2/rho int f^2 psi^xi", sol.diagnostics.dirichlet,
                     0.0, rhs, 1e-3);
}

std::vector<BoundEntry> check_gradient_bounds(const PotentialModel& model,
                                              const MeanForceTable& table, double rho,
                                              double kappa_sq, int threads,
                                              const PoissonGrid& grid) {
  const double beta = model.beta();
  const double rhs = beta * beta * kappa_sq / (rho * rho);
  const char* pointwise = "max over xi of rho int |u'|^2 psi^xi / (beta^2 int f^2 psi^xi) <= 1";
  const char* aggregate = "int |grad u|^2 psi <= beta^2 kappa^2 / rho^2";
  if (model.dim() != 2) {
    const auto& facts = model.analytic_facts();
    if (!facts) {
      return {skipped_bound("poisson_gradient_pointwise", pointwise,
                            "no solver for bath dimension above 1"),
              skipped_bound("poisson_gradient", aggregate, "no solver for bath dimension above 1")};
    }
    // f is linear in the bath, so u is too, with grad u = H^-1 cross.
    const Eigen::VectorXd g = facts->bath_hessian.ldlt().solve(facts->cross);
    const double lhs = g.squaredNorm();
    return {skipped_bound("poisson_gradient_pointwise", pointwise,
                          "closed form used for bath dimension above 1"),
            check_bound("poisson_gradient", aggregate, lhs, 0.0, rhs, 1e-3)};
  }
  const int m = table.size();
  std::vector<double> dir(m), ratio(m);
  parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t j) {
    const PoissonSolution sol = solve_poisson(model, table, table.xi()[j], grid);
    dir[j] = sol.diagnostics.dirichlet;
    const double bound = beta * beta / rho * sol.diagnostics.f_sq;
    ratio[j] = bound > 0.0 ? dir[j] / bound : (dir[j] <= 1e-12 ? 0.0 : HUGE_VAL);
  });
  std::vector<double> weighted(m);
  for (int j = 0; j < m; ++j) weighted[j] = dir[j] * table.phi()[j];
  const double lhs = table.integrate(weighted);
  const double worst = *std::max_element(ratio.begin(), ratio.end());
  return {check_bound("poisson_gradient_pointwise", pointwise, worst, 0.0, 1.0, 1e-3),
          check_bound("poisson_gradient", aggregate, lhs, 0.0, rhs, 1e-3)};
}

}  // namespace effdyn
