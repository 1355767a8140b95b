#include "effdyn/sampling.hpp"

#include <cmath>
#include <sstream>

#include "effdyn/error.hpp"
#include "effdyn/mean_force.hpp"
#include "effdyn/conditional.hpp"

namespace effdyn {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

EquilibriumSampler::EquilibriumSampler(const PotentialModel& model, std::uint64_t seed,
                                       MalaOptions opts)
    : model_(&model), seed_(seed), opts_(opts) {
  const int n = model.dim();
  if (model.gaussian_equilibrium()) {
    // Quadratic V: the Hessian column i is grad V(e_i) - grad V(0).
    std::vector<double> x(n, 0.0);
    const auto g0 = model.gradient(x);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      x.assign(n, 0.0);
      x[i] = 1.0;
      const auto gi = model.gradient(x);
      for (int r = 0; r < n; ++r) a(r, i) = gi[r] - g0[r];
    }
    a = 0.5 * (a + a.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw ModelError("quadratic potential is not positive definite");
    mean_ = -llt.solve(Eigen::Map<const Eigen::VectorXd>(g0.data(), n));
    Eigen::LLT<Eigen::MatrixXd> cov((model.beta() * a).inverse());
    chol_ = cov.matrixL();
    exact_ = true;
    return;
  }

  // Pilot chain from the marginal mean and the conditional mean there.
  const double mu = marginal_summary(model).mean;
  const ConditionalLaw law = conditional_law(model, mu);
  start_.assign(n, mu);
  const Eigen::VectorXd cm = law.mean();
  for (int i = 1; i < n; ++i) start_[i] = cm(i - 1);

  CounterRng rng(seed, 0, StreamTag::Mala, 1);
  double log_step = std::log(opts.initial_step_scale / model.beta());
  for (int k = 0; k < opts.burn_in; ++k) {
    const double acc = mala_chain(start_, std::exp(log_step), 1, rng);
    log_step += (acc - opts.target_acceptance) / std::pow(k + 1.0, 0.6);
  }
  const double step = std::exp(log_step);
  const double acc = mala_chain(start_, step, opts.burn_in, rng);
  mala_ = MalaDiagnostics{step, acc};
  if (acc < opts.min_acceptance || acc > opts.max_acceptance) {
    std::ostringstream os;
    os << "MALA burn-in diagnostic failed: acceptance " << acc << " outside ["
       << opts.min_acceptance << ", " << opts.max_acceptance << "]";
    throw Error(os.str());
  }
}

// Runs `steps` MALA transitions in place; returns the mean acceptance probability.
double EquilibriumSampler::mala_chain(std::vector<double>& x, double step, int steps,
                                      CounterRng& rng) const {
  const int n = model_->dim();
  const double beta = model_->beta();
  const double s = std::sqrt(2.0 * step / beta);
  std::vector<double> gx(n), y(n), gy(n), fwd(n), bwd(n);
  double vx = model_->energy_gradient(x, gx);
  double accepted = 0.0;
  for (int k = 0; k < steps; ++k) {
    for (int i = 0; i < n; ++i) y[i] = x[i] - step * gx[i] + s * rng.normal();
    const double vy = model_->energy_gradient(y, gy);
    for (int i = 0; i < n; ++i) {
      fwd[i] = x[i] - step * gx[i];
      bwd[i] = y[i] - step * gy[i];
    }
    const double log_a = -beta * (vy - vx) - beta * sq_dist(x, bwd) / (4.0 * step) +
                         beta * sq_dist(y, fwd) / (4.0 * step);
    const double a = std::isfinite(log_a) ? std::min(1.0, std::exp(log_a)) : 0.0;
    if (rng.uniform() <= a) {
      x.swap(y);
      gx.swap(gy);
      vx = vy;
    }
    accepted += a;
  }
  return accepted / steps;
}

std::vector<double> EquilibriumSampler::draw(std::uint64_t path, double* acceptance) const {
  const int n = model_->dim();
  if (exact_) {
    CounterRng rng(seed_, path, StreamTag::Initial);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    const Eigen::VectorXd x = mean_ + chol_ * z;
    if (acceptance) *acceptance = 1.0;
    return {x.data(), x.data() + n};
  }
  CounterRng rng(seed_, path, StreamTag::Mala);
  std::vector<double> x = start_;
  const double acc = mala_chain(x, mala_->step, opts_.burn_in, rng);
  if (acceptance) *acceptance = acc;
  return x;
}

std::vector<double> sample_equilibrium(const PotentialModel& model, CounterRng& rng) {
  const std::uint64_t seed = (static_cast<std::uint64_t>(rng.uniform() * 0x1.0p32) << 32) ^
                             static_cast<std::uint64_t>(rng.uniform() * 0x1.0p32);
  return EquilibriumSampler(model, seed).draw(0);
}

InitialLaw InitialLaw::fixed(std::vector<double> x0) {
  InitialLaw l;
  l.kind = Kind::Fixed;
  l.x0 = std::move(x0);
  return l;
}

InitialLaw InitialLaw::custom(Sampler sampler, double m) {
  if (!(m >= 1.0)) throw ConfigError("density ratio bound m must be >= 1");
  InitialLaw l;
  l.kind = Kind::Custom;
  l.sampler = std::move(sampler);
  l.density_ratio_bound = m;
  return l;
}

InitialSampler::InitialSampler(const PotentialModel& model, InitialLaw law, std::uint64_t seed)
    : law_(std::move(law)), seed_(seed), dim_(model.dim()) {
  switch (law_.kind) {
    case InitialLaw::Kind::Equilibrium:
      eq_.emplace(model, seed);
      break;
    case InitialLaw::Kind::Fixed:
      if (static_cast<int>(law_.x0.size()) != dim_) {
        throw DimensionError("initial point has wrong dimension");
      }
      break;
    case InitialLaw::Kind::Custom:
      if (!law_.sampler) throw ConfigError("custom initial law needs a sampler");
      break;
  }
}

std::vector<double> InitialSampler::draw(std::uint64_t path) const {
  switch (law_.kind) {
    case InitialLaw::Kind::Equilibrium:
      return eq_->draw(path);
    case InitialLaw::Kind::Fixed:
      return law_.x0;
    case InitialLaw::Kind::Custom: {
      CounterRng rng(seed_, path, StreamTag::Initial, 1);
      auto x = law_.sampler(rng);
      if (static_cast<int>(x.size()) != dim_) {
        throw DimensionError("custom initial sampler returned wrong dimension");
      }
      return x;
    }
  }
  return {};
}

std::optional<double> InitialSampler::density_ratio_bound() const {
  switch (law_.kind) {
    case InitialLaw::Kind::Equilibrium:
      return 1.0;
    case InitialLaw::Kind::Custom:
      return law_.density_ratio_bound;
    case InitialLaw::Kind::Fixed:
      break;
  }
  return std::nullopt;
}

}  // namespace effdyn
