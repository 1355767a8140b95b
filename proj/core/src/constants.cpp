#include "effdyn/constants.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "effdyn/conditional.hpp"
#include "effdyn/error.hpp"

namespace effdyn {

std::string to_string(RhoMethod m) {
  return m == RhoMethod::ExactGaussian ? "exact-gaussian" : "convexity-lower-bound";
}

namespace {

// Conditional expectation of g(x) at every grid point, x = (xi_j, bath).
template <class G>
std::vector<double> conditional_expectations(const PotentialModel& model,
                                             const MeanForceTable& table, G&& g) {
  std::vector<double> out(static_cast<std::size_t>(table.size()));
  std::vector<double> x(static_cast<std::size_t>(model.dim()));
  std::optional<ConditionalLaw> fixed;
  for (int j = 0; j < table.size(); ++j) {
    const double xi = table.xi()[j];
    std::optional<ConditionalLaw> local;
    const ConditionalLaw* law;
    if (model.family() == Family::Decoupled) {
      if (!fixed) fixed.emplace(conditional_law(model, xi));
      law = &*fixed;
    } else {
      local.emplace(conditional_law(model, xi));
      law = &*local;
    }
    x[0] = xi;
    out[j] = law->expect([&](std::span<const double> y) {
      std::copy(y.begin(), y.end(), x.begin() + 1);
      return g(j, std::span<const double>(x));
    });
  }
  return out;
}

}  // namespace

KappaEstimate kappa_sq(const PotentialModel& model, const MeanForceTable& table) {
  if (const auto& f = model.analytic_facts()) return {f->kappa_sq, 0.0, true};
  const auto e = conditional_expectations(model, table, [&](int, std::span<const double> x) {
    const auto c = model.cross(x);
    return std::inner_product(c.begin(), c.end(), c.begin(), 0.0);
  });
  std::vector<double> integrand(e.size());
  for (std::size_t j = 0; j < e.size(); ++j) integrand[j] = e[j] * table.phi()[j];
  const double value = table.integrate(integrand);
  // Tail growth test: the weighted integrand must have decayed at both grid ends.
  const double edge = std::max(integrand.front(), integrand.back()) *
                      (table.xi_max() - table.xi_min());
  if (value > 0.0 && edge > 1e-6 * value) {
    throw QuadratureError("kappa^2 integrand does not decay at the grid edge (divergent?)");
  }
  return {value, 0.0, false};
}

KappaEstimate kappa_sq(const PotentialModel& model) {
  if (const auto& f = model.analytic_facts()) return {f->kappa_sq, 0.0, true};
  return kappa_sq(model, MeanForceTable::build_default(model));
}

PoincareConstant poincare_constant(const PotentialModel& model) {
  if (const auto& f = model.analytic_facts()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f->covariance);
    return {1.0 / es.eigenvalues().maxCoeff(), RhoMethod::ExactGaussian};
  }
  const ConditionalLaw law = conditional_law(model, 0.0);
  const Eigen::VectorXd mean = law.mean();
  const Eigen::VectorXd sd = law.stddev();
  std::vector<double> lo(mean.size()), hi(mean.size());
  for (int i = 0; i < mean.size(); ++i) {
    lo[i] = mean(i) - 8.0 * sd(i);
    hi[i] = mean(i) + 8.0 * sd(i);
  }
  const double curvature = model.min_bath_curvature(lo, hi);
  if (!(curvature > 0.0)) {
    throw UnsupportedModel("conditional measure is not uniformly log-concave (min bath curvature " +
                           std::to_string(curvature) + ")");
  }
  return {model.beta() * curvature, RhoMethod::ConvexityLowerBound};
}

double one_sided_lipschitz(const MeanForceTable& table) {
  double l = 0.0;
  for (int j = 1; j + 1 < table.size(); ++j) l = std::max(l, -table.b_prime(j));
  return l;
}

CAlphaEstimate c_alpha(const MeanForceTable& table, double p) {
  if (!(p >= 1.0 && p < 2.0)) throw Error("c_alpha exponent p must lie in [1, 2)");
  const double q = 2.0 * p / (2.0 - p);
  const int m = table.size();
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(table.xi()[a]) < std::abs(table.xi()[b]);
  });
  std::vector<double> alpha(static_cast<std::size_t>(m));
  double running = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    // Points with equal |xi| share the same sup.
    std::size_t e = k;
    const double r = std::abs(table.xi()[order[k]]);
    while (e < order.size() && std::abs(table.xi()[order[e]]) == r) {
      running = std::max(running, std::abs(table.b_prime(order[e])));
      ++e;
    }
    for (std::size_t i = k; i < e; ++i) alpha[order[i]] = running;
    k = e;
  }
  std::vector<double> integrand(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) integrand[j] = std::pow(alpha[j], q) * table.phi()[j];
  CAlphaEstimate out;
  out.value = table.integrate(integrand);
  out.p = p;
  if (table.outside_mass()) out.tail_estimate = std::pow(running, q) * *table.outside_mass();
  return out;
}

double f_l2(const PotentialModel& model, const MeanForceTable& table) {
  const auto e = conditional_expectations(model, table, [&](int j, std::span<const double> x) {
    const double f = table.b()[j] - model.partial1(x);
    return f * f;
  });
  std::vector<double> integrand(e.size());
  for (std::size_t j = 0; j < e.size(); ++j) integrand[j] = e[j] * table.phi()[j];
  return table.integrate(integrand);
}

double fluctuation_conditional_mean(const PotentialModel& model, const MeanForceTable& table,
                                    int j) {
  const double xi = table.xi()[j];
  const ConditionalLaw law = conditional_law(model, xi);
  std::vector<double> x(static_cast<std::size_t>(model.dim()));
  x[0] = xi;
  const double b = table.b_at(xi);
  return law.expect([&](std::span<const double> y) {
    std::copy(y.begin(), y.end(), x.begin() + 1);
    return b - model.partial1(x);
  });
}

BoundEntry check_f_bound(const PotentialModel& model, const MeanForceTable& table) {
  const double lhs = f_l2(model, table);
  const double rhs = kappa_sq(model, table).value / poincare_constant(model).rho;
  return check_bound("fluctuation_l2", "int f^2 psi <= kappa^2/rho", lhs, 0.0, rhs, 1e-3);
}

BoundEntry check_f_bound(const PotentialModel& model) {
  return check_f_bound(model, MeanForceTable::build_default(model));
}

TheoryConstants compute_constants(const PotentialModel& model, const MeanForceTable& table,
                                  std::optional<double> p) {
  TheoryConstants c;
  const KappaEstimate k = kappa_sq(model, table);
  c.kappa_sq = k.value;
  c.kappa_sq_std_error = k.std_error;
  const PoincareConstant pc = poincare_constant(model);
  c.rho = pc.rho;
  c.rho_method = pc.method;
  c.lipschitz_b = one_sided_lipschitz(table);
  c.c_alpha = c_alpha(table, 1.0).value;
  if (p) {
    c.p = *p;
    c.c_alpha_p = c_alpha(table, *p).value;
  }
  c.beta = model.beta();
  return c;
}

}  // namespace effdyn
