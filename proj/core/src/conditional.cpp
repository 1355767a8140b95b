#include "effdyn/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "effdyn/error.hpp"

namespace effdyn {

namespace {

constexpr int kHermiteNodes = 64;
constexpr int kTensorBudget = kHermiteNodes * kHermiteNodes;

int hermite_nodes_for(int dim) {
  if (dim == 1) return kHermiteNodes;
  int n = static_cast<int>(std::floor(std::pow(static_cast<double>(kTensorBudget), 1.0 / dim) + 1e-9));
  return std::clamp(n, 2, kHermiteNodes);
}

}  // namespace

ConditionalLaw::ConditionalLaw(double xi, Gaussian g)
    : xi_(xi), dim_(static_cast<int>(g.mean.size())), repr_(std::move(g)) {
  Eigen::LLT<Eigen::MatrixXd> llt(std::get<Gaussian>(repr_).covariance);
  if (llt.info() != Eigen::Success) throw ModelError("conditional covariance is not positive definite");
  chol_ = llt.matrixL();
}

ConditionalLaw::ConditionalLaw(double xi, Tabulated t)
    : xi_(xi), dim_(static_cast<int>(t.axes.size())), repr_(std::move(t)) {}

Eigen::VectorXd ConditionalLaw::mean() const {
  if (is_gaussian()) return gaussian().mean;
  Eigen::VectorXd m(dim_);
  for (int i = 0; i < dim_; ++i) m(i) = tabulated().axes[i].mean;
  return m;
}

Eigen::VectorXd ConditionalLaw::stddev() const {
  if (is_gaussian()) return gaussian().covariance.diagonal().cwiseSqrt();
  Eigen::VectorXd s(dim_);
  for (int i = 0; i < dim_; ++i) s(i) = tabulated().axes[i].stddev;
  return s;
}

double ConditionalLaw::density(std::span<const double> bath) const {
  if (static_cast<int>(bath.size()) != dim_) throw DimensionError("bath point has wrong dimension");
  if (is_gaussian()) {
    const auto& g = gaussian();
    Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(bath.data(), dim_) - g.mean;
    const Eigen::VectorXd w = chol_.triangularView<Eigen::Lower>().solve(z);
    const double log_det = 2.0 * chol_.diagonal().array().log().sum();
    return std::exp(-0.5 * w.squaredNorm() - 0.5 * log_det -
                    0.5 * dim_ * std::log(2.0 * std::numbers::pi));
  }
  // Tabulated axes do not keep the potential; the density is only exposed
  // through the quadrature weights.
  throw UnsupportedModel("pointwise density is only available for Gaussian conditionals");
}

template <class Visit>
void ConditionalLaw::for_each_node(Visit&& visit) const {
  std::vector<double> y(static_cast<std::size_t>(dim_));
  if (is_gaussian()) {
    const int q = hermite_nodes_for(dim_);
    const QuadratureRule& gh = gauss_hermite(q);
    const double norm = std::pow(std::numbers::pi, -0.5 * dim_);
    std::vector<int> idx(static_cast<std::size_t>(dim_), 0);
    Eigen::VectorXd t(dim_);
    const auto& mean = gaussian().mean;
    for (;;) {
      double w = norm;
      for (int i = 0; i < dim_; ++i) {
        t(i) = std::numbers::sqrt2 * gh.nodes[idx[i]];
        w *= gh.weights[idx[i]];
      }
      const Eigen::VectorXd p = mean + chol_ * t;
      for (int i = 0; i < dim_; ++i) y[i] = p(i);
      visit(std::span<const double>(y), w);
      int k = 0;
      while (k < dim_ && ++idx[k] == q) idx[k++] = 0;
      if (k == dim_) break;
    }
    return;
  }
  const auto& axes = tabulated().axes;
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim_), 0);
  for (;;) {
    double w = 1.0;
    for (int i = 0; i < dim_; ++i) {
      y[i] = axes[i].nodes[idx[i]];
      w *= axes[i].prob[idx[i]];
    }
    visit(std::span<const double>(y), w);
    int k = 0;
    while (k < dim_ && ++idx[k] == axes[k].nodes.size()) idx[k++] = 0;
    if (k == dim_) break;
  }
}

double ConditionalLaw::expect(const Integrand& g) const {
  double sum = 0.0;
  for_each_node([&](std::span<const double> y, double w) {
    const double v = g(y);
    if (!std::isfinite(v)) throw QuadratureError("non-finite integrand in conditional expectation");
    sum += w * v;
  });
  return sum;
}

double ConditionalLaw::total_weight() const {
  double sum = 0.0;
  for_each_node([&](std::span<const double>, double w) { sum += w; });
  return sum;
}

int ConditionalLaw::nodes_per_axis() const {
  if (is_gaussian()) return hermite_nodes_for(dim_);
  return static_cast<int>(tabulated().axes.front().nodes.size());
}

ConditionalLaw conditional_law(const PotentialModel& model, double xi) {
  if (const auto& f = model.analytic_facts()) {
    ConditionalLaw::Gaussian g;
    g.mean = f->mean_slope * xi + f->mean_offset;
    g.covariance = f->covariance;
    return ConditionalLaw(xi, std::move(g));
  }
  if (!model.bath_factorizes()) {
    throw UnsupportedModel("conditional law needs a Gaussian or factorizing bath");
  }
  if (model.bath_dim() > 2) {
    throw QuadratureError("tabulated conditional quadrature supports bath dimension <= 2, got " +
                          std::to_string(model.bath_dim()));
  }
  ConditionalLaw::Tabulated t;
  for (int i = 2; i <= model.dim(); ++i) {
    t.axes.push_back(tabulate_density(
        [&model, i, xi](double y) { return model.bath_factor(i, xi, y).v; }, model.beta()));
  }
  return ConditionalLaw(xi, std::move(t));
}

}  // namespace effdyn
