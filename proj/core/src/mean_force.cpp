#include "effdyn/mean_force.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "effdyn/conditional.hpp"
#include "effdyn/csv.hpp"
#include "effdyn/error.hpp"
#include "effdyn/quadrature.hpp"

namespace effdyn {

namespace {

// DEC bath laws do not depend on xi; build them once per sweep.
class LawSource {
 public:
  explicit LawSource(const PotentialModel& model) : model_(model) {}

  const ConditionalLaw& at(double xi) {
    if (model_.first_partial_bath_independent() && model_.family() == Family::Decoupled) {
      if (!fixed_) fixed_.emplace(conditional_law(model_, xi));
      return *fixed_;
    }
    current_.emplace(conditional_law(model_, xi));
    return *current_;
  }

 private:
  const PotentialModel& model_;
  std::optional<ConditionalLaw> fixed_;
  std::optional<ConditionalLaw> current_;
};

double mean_force_with(const PotentialModel& model, const ConditionalLaw& law, double xi) {
  std::vector<double> x(static_cast<std::size_t>(model.dim()));
  x[0] = xi;
  // Constant in the bath: quadrature would only add rounding.
  if (model.first_partial_bath_independent()) return model.partial1(x);
  return law.expect([&](std::span<const double> y) {
    std::copy(y.begin(), y.end(), x.begin() + 1);
    return model.partial1(x);
  });
}

double log_marginal_with(const PotentialModel& model, const ConditionalLaw& law, double xi) {
  std::vector<double> x(static_cast<std::size_t>(model.dim()));
  x[0] = xi;
  if (const auto& f = model.analytic_facts()) {
    // V is quadratic in the bath with constant Hessian, so the bath integral
    // only contributes a xi-independent Gaussian normalization.
    const Eigen::VectorXd mu = f->mean_slope * xi + f->mean_offset;
    for (int i = 0; i < model.bath_dim(); ++i) x[i + 1] = mu(i);
    return -model.beta() * model.energy(x);
  }
  const auto& axes = law.tabulated().axes;
  const int d = static_cast<int>(axes.size());
  for (int i = 0; i < d; ++i) x[i + 1] = axes[i].mean;
  const double v_ref = model.energy(x);
  double sum = 0.0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    double g = 1.0;
    for (int i = 0; i < d; ++i) {
      x[i + 1] = axes[i].nodes[idx[i]];
      g *= axes[i].geometric[idx[i]];
    }
    sum += g * std::exp(-model.beta() * (model.energy(x) - v_ref));
    int k = 0;
    while (k < d && ++idx[k] == axes[k].nodes.size()) idx[k++] = 0;
    if (k == d) break;
  }
  return std::log(sum) - model.beta() * v_ref;
}

// Log-sum-exp Simpson integral of exp(logv) on a uniform grid.
double log_integral(std::span<const double> logv, double h) {
  const auto w = simpson_weights(static_cast<int>(logv.size()), h);
  const double top = *std::max_element(logv.begin(), logv.end());
  double s = 0.0;
  for (std::size_t i = 0; i < logv.size(); ++i) s += w[i] * std::exp(logv[i] - top);
  return top + std::log(s);
}

}  // namespace

double mean_force(const PotentialModel& model, double xi) {
  return mean_force_with(model, conditional_law(model, xi), xi);
}

double log_marginal_unnormalized(const PotentialModel& model, double xi) {
  if (model.analytic_facts()) {
    // The law is not needed on this path; skip building it.
    std::vector<double> x(static_cast<std::size_t>(model.dim()));
    const auto& f = *model.analytic_facts();
    x[0] = xi;
    const Eigen::VectorXd mu = f.mean_slope * xi + f.mean_offset;
    for (int i = 0; i < model.bath_dim(); ++i) x[i + 1] = mu(i);
    return -model.beta() * model.energy(x);
  }
  return log_marginal_with(model, conditional_law(model, xi), xi);
}

MarginalSummary marginal_summary(const PotentialModel& model) {
  constexpr int kScan = 4001;
  constexpr double kDrop = 60.0;
  LawSource laws(model);
  auto logphi = [&](double xi) { return log_marginal_with(model, laws.at(xi), xi); };

  double lo = -10.0, hi = 10.0;
  std::vector<double> lv(kScan);
  auto scan = [&] {
    for (int i = 0; i < kScan; ++i) lv[i] = logphi(lo + (hi - lo) * i / (kScan - 1));
  };
  for (;;) {
    scan();
    const double top = *std::max_element(lv.begin(), lv.end());
    if (!std::isfinite(top)) throw QuadratureError("marginal density is not finite");
    if (top - lv.front() > kDrop && top - lv.back() > kDrop) break;
    lo *= 2.0;
    hi *= 2.0;
    if (hi > 1e4) throw QuadratureError("marginal density is not normalizable on R");
  }

  MarginalSummary s;
  auto moments = [&] {
    const double h = (hi - lo) / (kScan - 1);
    const auto w = simpson_weights(kScan, h);
    const double top = *std::max_element(lv.begin(), lv.end());
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < kScan; ++i) {
      const double x = lo + h * i;
      const double p = w[i] * std::exp(lv[i] - top);
      m0 += p;
      m1 += p * x;
      m2 += p * x * x;
    }
    s.mean = m1 / m0;
    s.stddev = std::sqrt(std::max(0.0, m2 / m0 - s.mean * s.mean));
    s.log_norm = top + std::log(m0);
    return h;
  };
  const double h = moments();
  if (s.stddev < 40.0 * h) {
    // Narrow marginal: rescan around the bulk at a finer resolution.
    lo = s.mean - 20.0 * std::max(s.stddev, h);
    hi = s.mean + 20.0 * std::max(s.stddev, h);
    scan();
    moments();
  }
  return s;
}

double marginal_density(const PotentialModel& model, double xi) {
  const MarginalSummary s = marginal_summary(model);
  return std::exp(log_marginal_unnormalized(model, xi) - s.log_norm);
}

double free_energy(const PotentialModel& model, double xi) {
  return -std::log(marginal_density(model, xi)) / model.beta();
}

MeanForceTable MeanForceTable::build(const PotentialModel& model, double xi_min, double xi_max,
                                     int m) {
  if (m < 16) throw Error("mean-force table needs at least 16 grid points");
  if (!(xi_min < xi_max)) throw Error("mean-force grid needs xi_min < xi_max");
  MeanForceTable t;
  t.beta_ = model.beta();
  t.h_ = (xi_max - xi_min) / (m - 1);
  t.xi_.resize(m);
  t.b_.resize(m);
  std::vector<double> logphi(m);
  LawSource laws(model);
  for (int j = 0; j < m; ++j) {
    const double xi = (j == m - 1) ? xi_max : xi_min + t.h_ * j;
    const ConditionalLaw& law = laws.at(xi);
    t.xi_[j] = xi;
    t.b_[j] = mean_force_with(model, law, xi);
    logphi[j] = log_marginal_with(model, law, xi);
  }
  const double log_grid_mass = log_integral(logphi, t.h_);
  t.f_.resize(m);
  t.phi_.resize(m);
  for (int j = 0; j < m; ++j) {
    t.f_[j] = (logphi[0] - logphi[j]) / model.beta();
    t.phi_[j] = std::exp(logphi[j] - log_grid_mass);
  }
  try {
    const MarginalSummary s = marginal_summary(model);
    t.outside_mass_ = std::max(0.0, 1.0 - std::exp(log_grid_mass - s.log_norm));
  } catch (const QuadratureError&) {
    t.outside_mass_.reset();
  }
  t.finalize();
  return t;
}

MeanForceTable MeanForceTable::build_default(const PotentialModel& model, int m) {
  const MarginalSummary s = marginal_summary(model);
  // Pull each end inward until phi is representable; quartic tails otherwise
  // underflow to 0 well inside 6 sigma.
  constexpr double kFloor = -700.0;
  auto logphi = [&](double xi) { return log_marginal_unnormalized(model, xi) - s.log_norm; };
  auto trim = [&](double end) {
    if (logphi(end) >= kFloor) return end;
    double in = s.mean, out = end;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (in + out);
      (logphi(mid) >= kFloor ? in : out) = mid;
    }
    return in;
  };
  return build(model, trim(s.mean - 6.0 * s.stddev), trim(s.mean + 6.0 * s.stddev), m);
}

MeanForceTable MeanForceTable::from_columns(double xi_min, double xi_max, std::vector<double> b,
                                            std::vector<double> free_energy,
                                            std::vector<double> phi, double beta) {
  const auto m = b.size();
  if (m < 16 || free_energy.size() != m || phi.size() != m) {
    throw Error("table columns must have equal length >= 16");
  }
  MeanForceTable t;
  t.beta_ = beta;
  t.h_ = (xi_max - xi_min) / static_cast<double>(m - 1);
  t.xi_.resize(m);
  for (std::size_t j = 0; j < m; ++j) t.xi_[j] = xi_min + t.h_ * static_cast<double>(j);
  t.xi_.back() = xi_max;
  t.b_ = std::move(b);
  t.f_ = std::move(free_energy);
  t.phi_ = std::move(phi);
  t.finalize();
  const double mass = t.integrate(t.phi_);
  for (double& p : t.phi_) p /= mass;
  return t;
}

void MeanForceTable::finalize() {
  w_ = simpson_weights(size(), h_);
  spline_ = NaturalCubicSpline(xi_.front(), h_, b_);
}

double MeanForceTable::b_prime(int j) const {
  const int m = size();
  if (j <= 0) return (b_[1] - b_[0]) / h_;
  if (j >= m - 1) return (b_[m - 1] - b_[m - 2]) / h_;
  return (b_[j + 1] - b_[j - 1]) / (2.0 * h_);
}

double MeanForceTable::integrate(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != size()) throw DimensionError("integrand has wrong length");
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += w_[j] * values[j];
  return s;
}

void MeanForceTable::write_csv(std::ostream& os, std::string_view provenance) const {
  write_provenance(os, provenance);
  os << "xi,b,F,phi\n";
  for (int j = 0; j < size(); ++j) write_csv_row(os, {xi_[j], b_[j], f_[j], phi_[j]});
}

double fluctuation(const PotentialModel& model, const MeanForceTable& table,
                   std::span<const double> x) {
  return table.b_at(x[0]) - model.partial1(x);
}

}  // namespace effdyn
