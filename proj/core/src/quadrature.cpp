#include "effdyn/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "effdyn/error.hpp"

namespace effdyn {

namespace {

// Golub-Welsch for a symmetric tridiagonal Jacobi matrix with zero diagonal.
QuadratureRule golub_welsch(int n, const std::function<double(int)>& offdiag, double mu0) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    j(i, i - 1) = j(i - 1, i) = offdiag(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  // Symmetrize: the rules are exactly symmetric about 0.
  for (int i = 0; i < n / 2; ++i) {
    const int k = n - 1 - i;
    const double x = 0.5 * (rule.nodes[k] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[k] + rule.weights[i]);
    rule.nodes[i] = -x;
    rule.nodes[k] = x;
    rule.weights[i] = rule.weights[k] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Newton polish of Hermite nodes on the orthonormal recurrence; the
// eigen-solver alone loses relative accuracy in the smallest weights.
void polish_hermite(QuadratureRule& rule) {
  const int n = static_cast<int>(rule.nodes.size());
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i];
    double dp = 0.0;
    for (int it = 0; it < 8; ++it) {
      double p1 = std::pow(std::numbers::pi, -0.25);
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = x * std::sqrt(2.0 / j) * p2 - std::sqrt(static_cast<double>(j - 1) / j) * p3;
      }
      dp = std::sqrt(2.0 * n) * p2;
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / (dp * dp);
  }
}

}  // namespace

const QuadratureRule& gauss_hermite(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw QuadratureError("Gauss-Hermite rule needs at least one node");
  QuadratureRule rule = golub_welsch(
      n, [](int i) { return std::sqrt(0.5 * i); }, std::sqrt(std::numbers::pi));
  polish_hermite(rule);
  return cache.emplace(n, std::move(rule)).first->second;
}

const QuadratureRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw QuadratureError("Gauss-Legendre rule needs at least one node");
  QuadratureRule rule = golub_welsch(
      n, [](int i) { return i / std::sqrt(4.0 * i * i - 1.0); }, 2.0);
  return cache.emplace(n, std::move(rule)).first->second;
}

std::vector<double> simpson_weights(int m, double h) {
  if (m < 2) throw QuadratureError("Simpson rule needs at least two points");
  std::vector<double> w(static_cast<std::size_t>(m), 0.0);
  if (m == 2) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  // Simpson panels over the first `simpson_end` intervals, closing 3/8 panel otherwise.
  const int intervals = m - 1;
  const int simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
  for (int i = 0; i < simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (simpson_end != intervals) {
    const int s = simpson_end;
    w[s] += 3.0 * h / 8.0;
    w[s + 1] += 9.0 * h / 8.0;
    w[s + 2] += 9.0 * h / 8.0;
    w[s + 3] += 3.0 * h / 8.0;
  }
  return w;
}

double panel_integral(const std::function<double(double)>& g, double a, double b, int panels,
                      int order) {
  const QuadratureRule& gl = gauss_legendre(order);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double s = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) s += gl.weights[k] * g(mid + 0.5 * h * gl.nodes[k]);
    sum += 0.5 * h * s;
  }
  return sum;
}

namespace {

struct Moments {
  double mass, mean, var;
};

Moments moments_on(const std::function<double(double)>& potential, double beta, double u_ref,
                   double lo, double hi, int panels, std::vector<double>* nodes,
                   std::vector<double>* geometric) {
  const QuadratureRule& gl = gauss_legendre(4);
  const double h = (hi - lo) / panels;
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  if (nodes) {
    nodes->clear();
    geometric->clear();
  }
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double y = mid + 0.5 * h * gl.nodes[k];
      const double w = 0.5 * h * gl.weights[k];
      const double u = potential(y);
      if (!std::isfinite(u)) throw QuadratureError("non-finite potential in density table");
      const double rho = std::exp(-beta * (u - u_ref));
      m0 += w * rho;
      m1 += w * rho * y;
      m2 += w * rho * y * y;
      if (nodes) {
        nodes->push_back(y);
        geometric->push_back(w);
      }
    }
  }
  const double mean = m1 / m0;
  return {m0, mean, std::max(0.0, m2 / m0 - mean * mean)};
}

}  // namespace

DensityTable1D tabulate_density(const std::function<double(double)>& potential, double beta) {
  constexpr double kDrop = 60.0;  // support edge: exp(-kDrop) relative to the mode
  // Locate the minimum on a coarse scan and grow the window until both ends drop.
  double r = 10.0;
  double lo = -r, hi = r;
  double u_ref = 0.0;
  for (;;) {
    constexpr int kScan = 4001;
    double umin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kScan; ++i) {
      const double y = -r + 2.0 * r * i / (kScan - 1);
      const double u = potential(y);
      if (std::isfinite(u)) umin = std::min(umin, u);
    }
    if (!std::isfinite(umin)) throw QuadratureError("density potential is not finite");
    u_ref = umin;
    const bool left_ok = beta * (potential(-r) - umin) > kDrop;
    const bool right_ok = beta * (potential(r) - umin) > kDrop;
    if (left_ok && right_ok) break;
    r *= 2.0;
    if (r > 1e5) throw QuadratureError("density is not normalizable (no confinement found)");
  }
  lo = -r;
  hi = r;

  // Pilot moments on the wide window, then truncate to mean +- 8 sd.
  Moments pilot{};
  double prev_mass = 0.0;
  for (int panels = 256;; panels *= 2) {
    pilot = moments_on(potential, beta, u_ref, lo, hi, panels, nullptr, nullptr);
    if (panels > 256 && std::abs(pilot.mass - prev_mass) <= 1e-10 * pilot.mass) break;
    prev_mass = pilot.mass;
    if (panels > (1 << 16)) throw QuadratureError("pilot quadrature did not converge");
  }
  DensityTable1D t;
  t.mean = pilot.mean;
  t.stddev = std::sqrt(pilot.var);
  if (!(t.stddev > 0.0)) throw QuadratureError("degenerate density");
  t.lo = t.mean - 8.0 * t.stddev;
  t.hi = t.mean + 8.0 * t.stddev;
  t.u_ref = u_ref;

  Moments prev{};
  bool converged = false;
  for (int panels = 32; panels <= (1 << 14); panels *= 2) {
    const Moments cur = moments_on(potential, beta, u_ref, t.lo, t.hi, panels, &t.nodes, &t.geometric);
    if (panels > 32 && std::abs(cur.mass - prev.mass) <= 1e-12 * cur.mass &&
        std::abs(cur.mean - prev.mean) <= 1e-12 * (t.stddev + std::abs(cur.mean)) &&
        std::abs(cur.var - prev.var) <= 1e-12 * cur.var) {
      converged = true;
      prev = cur;
      break;
    }
    prev = cur;
  }
  if (!converged) throw QuadratureError("adaptive density quadrature did not converge");
  t.log_norm = std::log(prev.mass);
  t.prob.resize(t.nodes.size());
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    t.prob[i] = t.geometric[i] * std::exp(-beta * (potential(t.nodes[i]) - u_ref)) / prev.mass;
  }
  return t;
}

}  // namespace effdyn
