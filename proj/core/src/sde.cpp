#include "effdyn/sde.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "effdyn/csv.hpp"
#include "effdyn/error.hpp"

namespace effdyn {

namespace {

// One Euler-Maruyama update; shared by every integrator so that identical
// inputs give identical bits.
inline double em(double x, double drift, double dt, double s, double g) {
  return x - drift * dt + s * g;
}

void guard(std::span<const double> x, int step) {
  for (double v : x) {
    if (!(std::abs(v) <= kExplosionRadius)) {
      throw ExplosionError("state left the box |x| <= 1e6", step);
    }
  }
}

struct Scales {
  std::vector<double> eps_of;  // per coordinate, 1 for the slow one
  std::vector<double> noise;    // sqrt(2 dt / (beta eps))
};

Scales make_scales(const PotentialModel& model, const NoisePlan& plan,
                   const TwoScaleConfig* cfg) {
  const int n = model.dim();
  const double dt = plan.dt();
  Scales s{std::vector<double>(n, 1.0), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    const double eps = (cfg && i > 0) ? cfg->eps(i) : 1.0;
    s.eps_of[i] = eps;
    s.noise[i] = std::sqrt(2.0 * dt / (model.beta() * eps));
  }
  return s;
}

// Integrates the (possibly two-scale) full system. `on_step(j, x, grad)` sees
// the state before step j together with its gradient.
template <class OnStep>
Trajectory integrate(const PotentialModel& model, std::span<const double> x0,
                     const NoisePlan& plan, const TwoScaleConfig* cfg,
                     std::span<const double> noise, OnStep&& on_step) {
  const int n = model.dim();
  if (static_cast<int>(x0.size()) != n) throw DimensionError("initial point has wrong dimension");
  const int steps = plan.steps();
  const double dt = plan.dt();
  const Scales sc = make_scales(model, plan, cfg);
  const bool split = cfg && cfg->integrator == TwoScaleConfig::Integrator::Splitting;
  std::optional<LinearBath> lb;
  std::vector<double> decay, ou_sd;
  if (split) {
    lb = model.linear_bath();
    if (!lb) throw UnsupportedModel("splitting integrator needs a bath drift linear in x_i");
    for (int i = 1; i < n; ++i) {
      const double r = lb->rate[i - 1];
      const double a = std::exp(-r * dt / cfg->eps(i));
      decay.push_back(a);
      ou_sd.push_back(std::sqrt(-std::expm1(-2.0 * r * dt / cfg->eps(i)) / (model.beta() * r)));
    }
  }

  Trajectory tr{dt, n, std::vector<double>(static_cast<std::size_t>(steps + 1) * n)};
  std::copy(x0.begin(), x0.end(), tr.states.begin());
  std::vector<double> g(n);
  for (int j = 0; j < steps; ++j) {
    const double* x = tr.states.data() + static_cast<std::size_t>(j) * n;
    double* y = tr.states.data() + static_cast<std::size_t>(j + 1) * n;
    const double* G = noise.data() + static_cast<std::size_t>(j) * n;
    const std::span<const double> xs(x, n);
    model.gradient(xs, g);
    on_step(j, xs, std::span<const double>(g));
    if (split) {
      for (int i = 1; i < n; ++i) {
        const double m = lb->slope[i - 1] * x[0] + lb->offset[i - 1];
        y[i] = m + (x[i] - m) * decay[i - 1] + ou_sd[i - 1] * G[i];
      }
      y[0] = x[0];
      const double g1 = model.partial1(std::span<const double>(y, n));
      y[0] = em(x[0], g1, dt, sc.noise[0], G[0]);
    } else {
      y[0] = em(x[0], g[0], dt, sc.noise[0], G[0]);
      for (int i = 1; i < n; ++i) {
        const double drift = cfg ? g[i] / sc.eps_of[i] : g[i];
        y[i] = em(x[i], drift, dt, sc.noise[i], G[i]);
      }
    }
    guard(std::span<const double>(y, n), j + 1);
  }
  return tr;
}

CoupledPair coupled(const PotentialModel& model, const EffectiveDrift& drift,
                    std::span<const double> x0, const NoisePlan& plan, std::uint64_t path,
                    const TwoScaleConfig* cfg) {
  const int n = model.dim();
  const int steps = plan.steps();
  const double dt = plan.dt();
  const auto noise = brownian_normals(plan, path, n);
  const double s = std::sqrt(2.0 * dt / model.beta());

  CoupledPair out;
  out.eff = Trajectory{dt, 1, std::vector<double>(static_cast<std::size_t>(steps) + 1)};
  out.fluct_integral.assign(static_cast<std::size_t>(steps) + 1, 0.0);
  out.eff.states[0] = x0.empty() ? 0.0 : x0[0];
  const auto& f_override = drift.fluctuation_override();
  out.full = integrate(model, x0, plan, cfg, noise,
                       [&](int j, std::span<const double> x, std::span<const double> g) {
                         const double f = f_override ? f_override(x) : drift(x[0]) - g[0];
                         out.fluct_integral[j + 1] = out.fluct_integral[j] + f * dt;
                         const double xi = out.eff.states[j];
                         const double next =
                             em(xi, drift(xi), dt, s, noise[static_cast<std::size_t>(j) * n]);
                         if (!(std::abs(next) <= kExplosionRadius)) {
                           throw ExplosionError("effective path exploded", j + 1);
                         }
                         out.eff.states[j + 1] = next;
                       });
  return out;
}

}  // namespace

void Trajectory::write_csv(std::ostream& os, std::string_view provenance) const {
  if (!provenance.empty()) write_provenance(os, provenance);
  std::vector<std::string> head{"t"};
  if (dim == 1) {
    head.emplace_back("xi");
  } else {
    for (int c = 0; c < dim; ++c) head.push_back("x" + std::to_string(c + 1));
  }
  write_csv_row(os, head);
  std::vector<std::string> row(static_cast<std::size_t>(dim) + 1);
  for (int j = 0; j <= steps(); ++j) {
    row[0] = fmt17(time(j));
    for (int c = 0; c < dim; ++c) row[c + 1] = fmt17(at(j, c));
    write_csv_row(os, row);
  }
}

EffectiveDrift EffectiveDrift::from_model(const PotentialModel& model,
                                          const MeanForceTable& table) {
  if (model.first_partial_bath_independent()) {
    const PotentialModel* m = &model;
    return from_function([m](double xi) { return *m->closed_form_mean_force(xi); });
  }
  const MeanForceTable* t = &table;
  return from_function([t](double xi) { return t->b_at(xi); });
}

EffectiveDrift EffectiveDrift::from_function(std::function<double(double)> b) {
  EffectiveDrift d;
  d.b_ = std::move(b);
  return d;
}

EffectiveDrift EffectiveDrift::with_fluctuation(Fluctuation f) const {
  EffectiveDrift d = *this;
  d.f_ = std::move(f);
  return d;
}

TwoScaleConfig TwoScaleConfig::uniform(double eps, Integrator integrator) {
  TwoScaleConfig c;
  c.epsilon = {eps};
  c.integrator = integrator;
  return c;
}

void TwoScaleConfig::validate(const PotentialModel& model, const NoisePlan& plan) const {
  if (epsilon.empty()) throw ConfigError("epsilon must not be empty");
  if (epsilon.size() != 1 && static_cast<int>(epsilon.size()) != model.bath_dim()) {
    throw DimensionError("epsilon vector must have one entry per bath coordinate");
  }
  for (double e : epsilon) {
    if (!(e > 0.0)) throw ConfigError("epsilon must be positive");
  }
  if (integrator == Integrator::Plain) {
    const double min_eps = *std::min_element(epsilon.begin(), epsilon.end());
    if (plan.dt() > min_eps * dt_factor) {
      std::ostringstream os;
      os << "stiffness guard: dt " << plan.dt() << " exceeds " << dt_factor
         << " * min epsilon for the plain integrator";
      throw ConfigError(os.str());
    }
  }
}

Trajectory simulate_full(const PotentialModel& model, std::span<const double> x0,
                         const NoisePlan& plan, std::uint64_t path) {
  const auto noise = brownian_normals(plan, path, model.dim());
  return integrate(model, x0, plan, nullptr, noise,
                   [](int, std::span<const double>, std::span<const double>) {});
}

Trajectory simulate_effective(const PotentialModel& model, const EffectiveDrift& drift, double xi0,
                              const NoisePlan& plan, std::uint64_t path) {
  const int steps = plan.steps();
  const double dt = plan.dt();
  const double s = std::sqrt(2.0 * dt / model.beta());
  std::vector<double> g(static_cast<std::size_t>(steps));
  brownian_normals(plan, path, 0, g);
  Trajectory tr{dt, 1, std::vector<double>(static_cast<std::size_t>(steps) + 1)};
  tr.states[0] = xi0;
  for (int j = 0; j < steps; ++j) {
    const double xi = tr.states[j];
    tr.states[j + 1] = em(xi, drift(xi), dt, s, g[j]);
    if (!(std::abs(tr.states[j + 1]) <= kExplosionRadius)) {
      throw ExplosionError("effective path exploded", j + 1);
    }
  }
  return tr;
}

CoupledPair simulate_coupled(const PotentialModel& model, const EffectiveDrift& drift,
                             std::span<const double> x0, const NoisePlan& plan,
                             std::uint64_t path) {
  return coupled(model, drift, x0, plan, path, nullptr);
}

CoupledPair simulate_coupled(const PotentialModel& model, const MeanForceTable& table,
                             std::span<const double> x0, const NoisePlan& plan,
                             std::uint64_t path) {
  return coupled(model, EffectiveDrift::from_model(model, table), x0, plan, path, nullptr);
}

Trajectory simulate_two_scale(const PotentialModel& model, std::span<const double> x0,
                              const NoisePlan& plan, const TwoScaleConfig& cfg,
                              std::uint64_t path) {
  cfg.validate(model, plan);
  const auto noise = brownian_normals(plan, path, model.dim());
  return integrate(model, x0, plan, &cfg, noise,
                   [](int, std::span<const double>, std::span<const double>) {});
}

CoupledPair simulate_two_scale_coupled(const PotentialModel& model, const EffectiveDrift& drift,
                                       std::span<const double> x0, const NoisePlan& plan,
                                       const TwoScaleConfig& cfg, std::uint64_t path) {
  cfg.validate(model, plan);
  return coupled(model, drift, x0, plan, path, &cfg);
}

}  // namespace effdyn
