#include "effdyn/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "effdyn/error.hpp"

namespace effdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_quadratic(const ExprPotential1D& e) {
  static constexpr double probes[] = {-7.3, -2.1, -0.4, 0.0, 0.9, 3.2, 11.5};
  const double ref = e.second_derivative(0.0);
  return std::all_of(std::begin(probes), std::end(probes), [&](double x) {
    return std::abs(e.second_derivative(x) - ref) <= 1e-12 * (1.0 + std::abs(ref));
  });
}

bool grows_quadratically(const ExprPotential1D& e) {
  for (double r : {1e2, 1e3}) {
    for (double x : {-r, r}) {
      const double v = e.value(x);
      if (!std::isfinite(v) && v > 0) continue;
      if (!(v / (r * r) > 1e-8)) return false;
    }
  }
  return true;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ModelError(std::string(name) + " must be a positive finite number");
  }
}

}  // namespace

std::string family_tag(Family f) {
  switch (f) {
    case Family::GaussianCoupled:
      return "GC";
    case Family::Tracking:
      return "TR";
    case Family::DoubleWell:
      return "DW";
    case Family::Decoupled:
      return "DEC";
    case Family::Zero:
      return "ZERO";
  }
  return "?";
}

PotentialModel::PotentialModel(Family family, int n, double beta, Params params)
    : family_(family), n_(n), beta_(beta), params_(std::move(params)) {
  require_positive(beta, "beta");
  if (n < 2) throw ModelError("dimension must be at least 2");
  build_facts();
}

PotentialModel PotentialModel::gaussian_coupled(double a, double k_c, double k_b, double beta) {
  require_positive(a, "a");
  require_positive(k_b, "k_b");
  if (!std::isfinite(k_c)) throw ModelError("k_c must be finite");
  if (!(a * k_b > k_c * k_c)) {
    throw ModelError("GC quadratic form is not positive definite (a*k_b <= k_c^2)");
  }
  return PotentialModel(Family::GaussianCoupled, 2, beta, GcParams{a, k_c, k_b});
}

PotentialModel PotentialModel::tracking(ExprPotential1D v1, double k, int n, double beta) {
  require_positive(k, "k");
  return PotentialModel(Family::Tracking, n, beta, TrackParams{std::move(v1), k});
}

PotentialModel PotentialModel::double_well(double k, int n, double beta) {
  require_positive(k, "k");
  return PotentialModel(Family::DoubleWell, n, beta,
                        TrackParams{ExprPotential1D::parse("(x^2-1)^2"), k});
}

PotentialModel PotentialModel::decoupled(ExprPotential1D v1, std::vector<ExprPotential1D> bath,
                                         double beta) {
  if (bath.empty()) throw ModelError("DEC needs at least one bath potential");
  const int n = static_cast<int>(bath.size()) + 1;
  return PotentialModel(Family::Decoupled, n, beta, DecParams{std::move(v1), std::move(bath)});
}

PotentialModel PotentialModel::zero(int n, double beta) {
  return PotentialModel(Family::Zero, n, beta, ZeroParams{});
}

void PotentialModel::check_dim(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) {
    throw DimensionError("point has dimension " + std::to_string(x.size()) + ", model has " +
                         std::to_string(n_));
  }
}

void PotentialModel::build_facts() {
  const int d = n_ - 1;
  std::visit(overloaded{
                 [&](const GcParams& p) {
                   AnalyticFacts f;
                   f.mean_slope = Eigen::VectorXd::Constant(1, -p.k_c / p.k_b);
                   f.mean_offset = Eigen::VectorXd::Zero(1);
                   f.bath_hessian = Eigen::MatrixXd::Constant(1, 1, p.k_b);
                   f.covariance = Eigen::MatrixXd::Constant(1, 1, 1.0 / (beta_ * p.k_b));
                   f.cross = Eigen::VectorXd::Constant(1, p.k_c);
                   f.kappa_sq = p.k_c * p.k_c;
                   f.rho = beta_ * p.k_b;
                   facts_ = std::move(f);
                 },
                 [&](const TrackParams& p) {
                   AnalyticFacts f;
                   f.mean_slope = Eigen::VectorXd::Ones(d);
                   f.mean_offset = Eigen::VectorXd::Zero(d);
                   f.bath_hessian = p.k * Eigen::MatrixXd::Identity(d, d);
                   f.covariance = Eigen::MatrixXd::Identity(d, d) / (beta_ * p.k);
                   f.cross = Eigen::VectorXd::Constant(d, -p.k);
                   f.kappa_sq = d * p.k * p.k;
                   f.rho = beta_ * p.k;
                   facts_ = std::move(f);
                 },
                 [](const DecParams&) {},
                 [](const ZeroParams&) {},
             },
             params_);
}

double PotentialModel::energy(std::span<const double> x) const {
  check_dim(x);
  return std::visit(overloaded{
                        [&](const GcParams& p) {
                          return 0.5 * p.a * x[0] * x[0] + p.k_c * x[0] * x[1] +
                                 0.5 * p.k_b * x[1] * x[1];
                        },
                        [&](const TrackParams& p) {
                          double s = 0.0;
                          for (int i = 1; i < n_; ++i) s += (x[i] - x[0]) * (x[i] - x[0]);
                          return p.v1.value(x[0]) + 0.5 * p.k * s;
                        },
                        [&](const DecParams& p) {
                          double s = p.v1.value(x[0]);
                          for (int i = 1; i < n_; ++i) s += p.bath[i - 1].value(x[i]);
                          return s;
                        },
                        [](const ZeroParams&) { return 0.0; },
                    },
                    params_);
}

void PotentialModel::gradient(std::span<const double> x, std::span<double> out) const {
  check_dim(x);
  if (static_cast<int>(out.size()) != n_) throw DimensionError("gradient buffer has wrong size");
  std::visit(overloaded{
                 [&](const GcParams& p) {
                   out[0] = p.a * x[0] + p.k_c * x[1];
                   out[1] = p.k_c * x[0] + p.k_b * x[1];
                 },
                 [&](const TrackParams& p) {
                   double s = 0.0;
                   for (int i = 1; i < n_; ++i) {
                     const double g = p.k * (x[i] - x[0]);
                     out[i] = g;
                     s += g;
                   }
                   out[0] = p.v1.derivative(x[0]) - s;
                 },
                 [&](const DecParams& p) {
                   out[0] = p.v1.derivative(x[0]);
                   for (int i = 1; i < n_; ++i) out[i] = p.bath[i - 1].derivative(x[i]);
                 },
                 [&](const ZeroParams&) { std::fill(out.begin(), out.end(), 0.0); },
             },
             params_);
}

double PotentialModel::energy_gradient(std::span<const double> x, std::span<double> out) const {
  if (const auto* p = std::get_if<TrackParams>(&params_)) {
    check_dim(x);
    if (static_cast<int>(out.size()) != n_) throw DimensionError("gradient buffer has wrong size");
    const Dual2 v1 = p->v1.eval(x[0]);
    double s = 0.0, sq = 0.0;
    for (int i = 1; i < n_; ++i) {
      const double g = p->k * (x[i] - x[0]);
      out[i] = g;
      s += g;
      sq += (x[i] - x[0]) * (x[i] - x[0]);
    }
    out[0] = v1.d1 - s;
    return v1.v + 0.5 * p->k * sq;
  }
  if (const auto* p = std::get_if<DecParams>(&params_)) {
    check_dim(x);
    if (static_cast<int>(out.size()) != n_) throw DimensionError("gradient buffer has wrong size");
    const Dual2 v1 = p->v1.eval(x[0]);
    double s = v1.v;
    out[0] = v1.d1;
    for (int i = 1; i < n_; ++i) {
      const Dual2 b = p->bath[i - 1].eval(x[i]);
      s += b.v;
      out[i] = b.d1;
    }
    return s;
  }
  gradient(x, out);
  return energy(x);
}

std::vector<double> PotentialModel::gradient(std::span<const double> x) const {
  std::vector<double> g(static_cast<std::size_t>(n_));
  gradient(x, g);
  return g;
}

double PotentialModel::partial1(std::span<const double> x) const {
  check_dim(x);
  return std::visit(overloaded{
                        [&](const GcParams& p) { return p.a * x[0] + p.k_c * x[1]; },
                        [&](const TrackParams& p) {
                          double s = 0.0;
                          for (int i = 1; i < n_; ++i) s += p.k * (x[i] - x[0]);
                          return p.v1.derivative(x[0]) - s;
                        },
                        [&](const DecParams& p) { return p.v1.derivative(x[0]); },
                        [](const ZeroParams&) { return 0.0; },
                    },
                    params_);
}

std::vector<double> PotentialModel::cross(std::span<const double> x) const {
  check_dim(x);
  std::vector<double> c(static_cast<std::size_t>(n_ - 1), 0.0);
  std::visit(overloaded{
                 [&](const GcParams& p) { c[0] = p.k_c; },
                 [&](const TrackParams& p) { std::fill(c.begin(), c.end(), -p.k); },
                 [](const DecParams&) {},
                 [](const ZeroParams&) {},
             },
             params_);
  return c;
}

Eigen::MatrixXd PotentialModel::bath_hessian(std::span<const double> x) const {
  check_dim(x);
  const int d = n_ - 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  std::visit(overloaded{
                 [&](const GcParams& p) { h(0, 0) = p.k_b; },
                 [&](const TrackParams& p) { h.diagonal().setConstant(p.k); },
                 [&](const DecParams& p) {
                   for (int i = 0; i < d; ++i) h(i, i) = p.bath[i].second_derivative(x[i + 1]);
                 },
                 [](const ZeroParams&) {},
             },
             params_);
  return h;
}

std::optional<double> PotentialModel::closed_form_mean_force(double xi) const {
  return std::visit(overloaded{
                        [&](const GcParams& p) -> std::optional<double> {
                          return (p.a - p.k_c * p.k_c / p.k_b) * xi;
                        },
                        [&](const TrackParams& p) -> std::optional<double> {
                          return p.v1.derivative(xi);
                        },
                        [&](const DecParams& p) -> std::optional<double> {
                          return p.v1.derivative(xi);
                        },
                        [](const ZeroParams&) -> std::optional<double> { return 0.0; },
                    },
                    params_);
}

bool PotentialModel::first_partial_bath_independent() const noexcept {
  return family_ == Family::Decoupled || family_ == Family::Zero;
}

std::optional<LinearBath> PotentialModel::linear_bath() const {
  const auto d = static_cast<std::size_t>(n_ - 1);
  return std::visit(
      overloaded{
          [&](const GcParams& p) -> std::optional<LinearBath> {
            return LinearBath{{p.k_b}, {-p.k_c / p.k_b}, {0.0}};
          },
          [&](const TrackParams& p) -> std::optional<LinearBath> {
            return LinearBath{std::vector<double>(d, p.k), std::vector<double>(d, 1.0),
                              std::vector<double>(d, 0.0)};
          },
          [&](const DecParams& p) -> std::optional<LinearBath> {
            LinearBath lb;
            for (const auto& w : p.bath) {
              if (!is_quadratic(w)) return std::nullopt;
              const double r = w.second_derivative(0.0);
              if (!(r > 0.0)) return std::nullopt;
              lb.rate.push_back(r);
              lb.slope.push_back(0.0);
              lb.offset.push_back(-w.derivative(0.0) / r);
            }
            return lb;
          },
          [](const ZeroParams&) -> std::optional<LinearBath> { return std::nullopt; },
      },
      params_);
}

bool PotentialModel::bath_factorizes() const noexcept {
  return family_ == Family::Tracking || family_ == Family::DoubleWell ||
         family_ == Family::Decoupled || family_ == Family::GaussianCoupled;
}

Dual2 PotentialModel::bath_factor(int i, double xi, double y) const {
  if (i < 2 || i > n_) throw DimensionError("bath coordinate index out of range");
  return std::visit(overloaded{
                        [&](const GcParams& p) -> Dual2 {
                          return {p.k_c * xi * y + 0.5 * p.k_b * y * y, p.k_c * xi + p.k_b * y,
                                  p.k_b};
                        },
                        [&](const TrackParams& p) -> Dual2 {
                          const double z = y - xi;
                          return {0.5 * p.k * z * z, p.k * z, p.k};
                        },
                        [&](const DecParams& p) -> Dual2 { return p.bath[i - 2].eval(y); },
                        [](const ZeroParams&) -> Dual2 {
                          throw UnsupportedModel("zero potential has no bath factorization");
                        },
                    },
                    params_);
}

bool PotentialModel::gaussian_equilibrium() const {
  return std::visit(overloaded{
                        [](const GcParams&) { return true; },
                        [&](const TrackParams& p) {
                          return family_ == Family::Tracking && is_quadratic(p.v1) &&
                                 p.v1.second_derivative(0.0) > 0.0;
                        },
                        [](const DecParams& p) {
                          if (!is_quadratic(p.v1) || !(p.v1.second_derivative(0.0) > 0.0)) {
                            return false;
                          }
                          return std::all_of(p.bath.begin(), p.bath.end(), [](const auto& w) {
                            return is_quadratic(w) && w.second_derivative(0.0) > 0.0;
                          });
                        },
                        [](const ZeroParams&) { return false; },
                    },
                    params_);
}

bool PotentialModel::is_confining() const {
  return std::visit(overloaded{
                        [](const GcParams&) { return true; },
                        [](const TrackParams& p) { return grows_quadratically(p.v1); },
                        [](const DecParams& p) {
                          return grows_quadratically(p.v1) &&
                                 std::all_of(p.bath.begin(), p.bath.end(),
                                             [](const auto& w) { return grows_quadratically(w); });
                        },
                        [](const ZeroParams&) { return false; },
                    },
                    params_);
}

double PotentialModel::min_bath_curvature(std::span<const double> lo,
                                          std::span<const double> hi) const {
  return std::visit(
      overloaded{
          [](const GcParams& p) { return p.k_b; },
          [](const TrackParams& p) { return p.k; },
          [&](const DecParams& p) {
            if (lo.size() != p.bath.size() || hi.size() != p.bath.size()) {
              throw DimensionError("curvature box has wrong dimension");
            }
            constexpr int kScan = 4001;
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < p.bath.size(); ++i) {
              for (int j = 0; j < kScan; ++j) {
                const double y = lo[i] + (hi[i] - lo[i]) * j / (kScan - 1);
                m = std::min(m, p.bath[i].second_derivative(y));
              }
            }
            return m;
          },
          [](const ZeroParams&) { return 0.0; },
      },
      params_);
}

std::string PotentialModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << family_tag(family_) << '(';
  std::visit(overloaded{
                 [&](const GcParams& p) {
                   os << "a=" << p.a << ", k_c=" << p.k_c << ", k_b=" << p.k_b;
                 },
                 [&](const TrackParams& p) {
                   if (family_ == Family::Tracking) os << "V1=" << p.v1.source() << ", ";
                   os << "k=" << p.k << ", n=" << n_;
                 },
                 [&](const DecParams& p) {
                   os << "V1=" << p.v1.source();
                   for (const auto& w : p.bath) os << ", " << w.source();
                 },
                 [&](const ZeroParams&) { os << "n=" << n_; },
             },
             params_);
  os << "), beta=" << beta_;
  return os.str();
}

}  // namespace effdyn
