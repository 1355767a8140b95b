#pragma once

#include <functional>
#include <span>
#include <vector>

namespace effdyn {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for integrals of g(t) exp(-t^2) over R
/// (Golub-Welsch eigen-decomposition of the Jacobi matrix).
const QuadratureRule& gauss_hermite(int n);

/// Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre(int n);

/// Composite Simpson weights for m equally spaced points with spacing h.
/// Even m closes with a 3/8 panel; m = 2 falls back to the trapezoid rule.
std::vector<double> simpson_weights(int m, double h);

/// Integral of g over [a, b] split into `panels` Gauss-Legendre panels of
/// `order` points each.
double panel_integral(const std::function<double(double)>& g, double a, double b, int panels,
                      int order = 4);

/// Normalized one-dimensional density proportional to exp(-beta U(y)),
/// tabulated as a quadrature rule on [mean - 8 sd, mean + 8 sd].
///
/// Support is found by an outward scan; the panel count doubles until the
/// normalization, mean and variance are stable to 1e-12 relative.
struct DensityTable1D {
  double mean = 0.0;
  double stddev = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double log_norm = 0.0;           // log of int exp(-beta (U - u_ref)) over [lo, hi]
  double u_ref = 0.0;              // reference energy subtracted before exponentiating
  std::vector<double> nodes;
  std::vector<double> geometric;   // plain quadrature weights on [lo, hi]
  std::vector<double> prob;        // normalized probability weights, sum = 1
};

DensityTable1D tabulate_density(const std::function<double(double)>& potential, double beta);

}  // namespace effdyn
