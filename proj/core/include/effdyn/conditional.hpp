#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "effdyn/potential.hpp"
#include "effdyn/quadrature.hpp"

namespace effdyn {

/// Conditional law psi^xi of the bath coordinates given x_1 = xi.
///
/// Gaussian-conditional families carry the closed-form mean and covariance and
/// integrate with a tensor Gauss-Hermite rule (64 nodes per axis for one bath
/// coordinate). Other factorizing families carry one normalized quadrature
/// table per bath coordinate on a [mean +- 8 sd] truncation.
class ConditionalLaw {
 public:
  struct Gaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
  };
  struct Tabulated {
    std::vector<DensityTable1D> axes;
  };

  using Integrand = std::function<double(std::span<const double> bath)>;

  ConditionalLaw(double xi, Gaussian g);
  ConditionalLaw(double xi, Tabulated t);

  double xi() const noexcept { return xi_; }
  int bath_dim() const noexcept { return dim_; }
  bool is_gaussian() const noexcept { return std::holds_alternative<Gaussian>(repr_); }
  const Gaussian& gaussian() const { return std::get<Gaussian>(repr_); }
  const Tabulated& tabulated() const { return std::get<Tabulated>(repr_); }

  /// Mean and per-axis standard deviation of the bath coordinates.
  Eigen::VectorXd mean() const;
  Eigen::VectorXd stddev() const;

  /// Normalized density of psi^xi at a bath point.
  double density(std::span<const double> bath) const;

  /// E[g(Y)] for Y ~ psi^xi.
  double expect(const Integrand& g) const;

  /// Sum of the normalized quadrature weights (1 up to rounding).
  double total_weight() const;

  /// Number of quadrature nodes per bath axis.
  int nodes_per_axis() const;

 private:
  template <class Visit>
  void for_each_node(Visit&& visit) const;

  double xi_;
  int dim_;
  std::variant<Gaussian, Tabulated> repr_;
  Eigen::MatrixXd chol_;  // lower Cholesky factor of the covariance (Gaussian case)
};

/// psi^xi for a registered model. Throws QuadratureError when the law needs
/// tabulation and the bath dimension exceeds 2.
ConditionalLaw conditional_law(const PotentialModel& model, double xi);

}  // namespace effdyn
