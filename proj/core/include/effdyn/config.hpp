#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "effdyn/potential.hpp"
#include "effdyn/sampling.hpp"
#include "effdyn/sde.hpp"

namespace effdyn {

/// Experiment description in flat `key = value` form with dotted keys, e.g.
///
///   study = error
///   model.family = GC
///   model.k_b = 2
///   sweep.values = 1, 2, 4, 8
struct ExperimentConfig {
  std::string study = "constants";  // constants | mean-force | error | scaling | poisson-check

  std::string family = "GC";  // GC | TR | DW | DEC
  double a = 1.0;
  double k_c = 1.0;
  double k_b = 2.0;
  double k = 1.0;
  int n = 2;
  std::string v1 = "x^2/2";
  std::vector<std::string> bath{"x^2/2"};  // DEC; one entry is broadcast over the bath

  double beta = 1.0;
  double T = 1.0;
  double dt = 5e-4;
  int paths = 4096;
  std::uint64_t seed = 1;
  double p = 1.0;  // moment of the scaling estimate and C_alpha exponent

  int grid_m = 241;
  std::optional<double> grid_xi_min;
  std::optional<double> grid_xi_max;

  std::string init = "equilibrium";  // equilibrium | fixed
  std::vector<double> x0;

  std::vector<double> epsilon;  // empty: no time-scale separation
  std::string integrator = "splitting";

  std::string sweep_parameter;  // epsilon | a | k_c | k_b | k | beta
  std::vector<double> sweep_values;

  std::vector<double> poisson_xi;  // empty: every table grid point
  int poisson_points = 2001;
  double poisson_width_sd = 8.0;

  bool dt_halving = true;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

struct Diagnostic {
  std::string key;  // config key, or "line N" for syntax problems
  std::string message;
};

/// Throws ConfigError naming the offending line.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Empty for a valid configuration.
std::vector<Diagnostic> validate(const ExperimentConfig& cfg);

PotentialModel build_model(const ExperimentConfig& cfg);
InitialLaw build_initial_law(const ExperimentConfig& cfg);
/// Copy of `cfg` with the sweep parameter set to `value`.
ExperimentConfig with_parameter(ExperimentConfig cfg, std::string_view name, double value);

}  // namespace effdyn
