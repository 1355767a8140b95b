#include "effdyn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "effdyn/error.hpp"
#include "effdyn/expr.hpp"

namespace effdyn {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("expected a number");
  return v;
}

template <class Int>
Int to_int(std::string_view s) {
  s = trim(s);
  Int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("expected an integer");
  return v;
}

std::vector<double> to_list(std::string_view s) {
  std::vector<double> out;
  for (auto part : split(s, ',')) out.push_back(to_double(part));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s;
}

using C = ExperimentConfig;

struct Field {
  const char* key;
  std::function<std::optional<std::string>(const C&)> get;  // nullopt: omitted
  std::function<void(C&, std::string_view)> set;
};

Field real(const char* key, double C::*m) {
  return {key, [m](const C& c) { return std::optional(num(c.*m)); },
          [m](C& c, std::string_view v) { c.*m = to_double(v); }};
}
Field integer(const char* key, int C::*m) {
  return {key, [m](const C& c) { return std::optional(std::to_string(c.*m)); },
          [m](C& c, std::string_view v) { c.*m = to_int<int>(v); }};
}
Field text(const char* key, std::string C::*m) {
  return {key, [m](const C& c) { return std::optional(c.*m); },
          [m](C& c, std::string_view v) { c.*m = std::string(v); }};
}
Field list(const char* key, std::vector<double> C::*m) {
  return {key, [m](const C& c) { return std::optional(join(c.*m)); },
          [m](C& c, std::string_view v) { c.*m = to_list(v); }};
}
Field maybe(const char* key, std::optional<double> C::*m) {
  return {key,
          [m](const C& c) { return (c.*m) ? std::optional(num(*(c.*m))) : std::nullopt; },
          [m](C& c, std::string_view v) { c.*m = to_double(v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      text("study", &C::study),
      text("model.family", &C::family),
      real("model.a", &C::a),
      real("model.k_c", &C::k_c),
      real("model.k_b", &C::k_b),
      real("model.k", &C::k),
      integer("model.n", &C::n),
      text("model.v1", &C::v1),
      {"model.bath",
       [](const C& c) {
         std::string s;
         for (std::size_t i = 0; i < c.bath.size(); ++i) s += (i ? "; " : "") + c.bath[i];
         return std::optional(s);
       },
       [](C& c, std::string_view v) {
         c.bath.clear();
         for (auto part : split(v, ';')) c.bath.emplace_back(part);
       }},
      real("beta", &C::beta),
      real("T", &C::T),
      real("dt", &C::dt),
      integer("paths", &C::paths),
      {"seed", [](const C& c) { return std::optional(std::to_string(c.seed)); },
       [](C& c, std::string_view v) { c.seed = to_int<std::uint64_t>(v); }},
      real("p", &C::p),
      integer("grid.m", &C::grid_m),
      maybe("grid.xi_min", &C::grid_xi_min),
      maybe("grid.xi_max", &C::grid_xi_max),
      text("init.mode", &C::init),
      list("init.x0", &C::x0),
      list("two_scale.epsilon", &C::epsilon),
      text("two_scale.integrator", &C::integrator),
      text("sweep.parameter", &C::sweep_parameter),
      list("sweep.values", &C::sweep_values),
      list("poisson.xi", &C::poisson_xi),
      integer("poisson.points", &C::poisson_points),
      real("poisson.width_sd", &C::poisson_width_sd),
      {"hygiene.dt_halving",
       [](const C& c) { return std::optional<std::string>(c.dt_halving ? "true" : "false"); },
       [](C& c, std::string_view v) {
         if (v == "true") {
           c.dt_halving = true;
         } else if (v == "false") {
           c.dt_halving = false;
         } else {
           throw ConfigError("expected true or false");
         }
       }},
      text("output.dir", &C::output_dir),
  };
  return f;
}

const std::vector<std::string> kStudies{"constants", "mean-force", "error", "scaling",
                                        "poisson-check"};
const std::vector<std::string> kSweepParams{"epsilon", "a", "k_c", "k_b", "k", "beta"};

bool one_of(const std::string& v, const std::vector<std::string>& set) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

}  // namespace

ExperimentConfig parse_config(std::string_view input) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= input.size()) {
    const auto nl = input.find('\n', pos);
    std::string_view line = input.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? input.size() + 1 : nl + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& fs = fields();
    const auto it = std::find_if(fs.begin(), fs.end(), [&](const Field& f) { return key == f.key; });
    if (it == fs.end()) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
    }
    try {
      it->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + std::string(key) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) {
    if (const auto v = f.get(cfg)) out += std::string(f.key) + " = " + *v + "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<Diagnostic> validate(const ExperimentConfig& c) {
  std::vector<Diagnostic> d;
  auto need = [&](bool ok, const char* key, std::string msg) {
    if (!ok) d.push_back({key, std::move(msg)});
  };
  need(one_of(c.study, kStudies), "study", "unknown study kind '" + c.study + "'");
  need(c.beta > 0.0, "beta", "beta must be positive");
  need(c.T > 0.0, "T", "T must be positive");
  need(c.dt > 0.0, "dt", "dt must be positive");
  if (c.dt > 0.0 && c.T > 0.0) need(c.dt <= c.T, "dt", "dt must not exceed T");
  need(c.paths >= 2, "paths", "paths must be at least 2");
  need(c.p >= 1.0 && c.p < 2.0, "p", "p must lie in [1, 2)");
  need(c.grid_m >= 16, "grid.m", "grid.m must be at least 16");
  need(c.grid_xi_min.has_value() == c.grid_xi_max.has_value(), "grid.xi_min",
       "grid.xi_min and grid.xi_max must be given together");
  if (c.grid_xi_min && c.grid_xi_max) {
    need(*c.grid_xi_min < *c.grid_xi_max, "grid.xi_min", "grid.xi_min must be below grid.xi_max");
  }
  need(c.n >= 2, "model.n", "model.n must be at least 2");

  auto check_expr = [&](const char* key, const std::string& src) {
    try {
      ExprPotential1D::parse(src);
    } catch (const SyntaxError& e) {
      d.push_back({key, e.what()});
    }
  };
  if (c.family == "GC") {
    need(c.n == 2, "model.n", "GC is defined for n = 2");
    need(c.k_b > 0.0 && c.a * c.k_b > c.k_c * c.k_c, "model.k_b",
         "quadratic form is not positive definite (need a k_b > k_c^2)");
  } else if (c.family == "TR" || c.family == "DW") {
    need(c.k > 0.0, "model.k", "model.k must be positive");
    if (c.family == "TR") check_expr("model.v1", c.v1);
  } else if (c.family == "DEC") {
    check_expr("model.v1", c.v1);
    need(c.bath.size() == 1 || static_cast<int>(c.bath.size()) == c.n - 1, "model.bath",
         "model.bath needs one expression or one per bath coordinate");
    for (const auto& b : c.bath) check_expr("model.bath", b);
  } else {
    d.push_back({"model.family", "unknown model family '" + c.family + "'"});
  }

  if (c.init == "fixed") {
    need(static_cast<int>(c.x0.size()) == c.n, "init.x0", "init.x0 must have model.n entries");
  } else {
    need(c.init == "equilibrium", "init.mode", "init.mode must be equilibrium or fixed");
  }
  for (double e : c.epsilon) need(e > 0.0, "two_scale.epsilon", "epsilon must be positive");
  need(c.epsilon.size() <= 1 || static_cast<int>(c.epsilon.size()) == c.n - 1,
       "two_scale.epsilon", "two_scale.epsilon needs one value or one per bath coordinate");
  need(c.integrator == "splitting" || c.integrator == "plain", "two_scale.integrator",
       "two_scale.integrator must be splitting or plain");

  if (c.study == "scaling") {
    need(one_of(c.sweep_parameter, kSweepParams), "sweep.parameter",
         "sweep.parameter must be one of epsilon, a, k_c, k_b, k, beta");
    need(c.sweep_values.size() >= 4, "sweep.values", "a sweep needs at least 4 values");
    for (double v : c.sweep_values) need(v > 0.0, "sweep.values", "sweep values must be positive");
    if (c.family == "GC" && (c.sweep_parameter == "a" || c.sweep_parameter == "k_c" ||
                             c.sweep_parameter == "k_b")) {
      for (double v : c.sweep_values) {
        const auto w = with_parameter(c, c.sweep_parameter, v);
        need(w.k_b > 0.0 && w.a * w.k_b > w.k_c * w.k_c, "sweep.values",
             "sweep value " + num(v) + " makes the quadratic form not positive definite");
      }
    }
  }
  if (c.study == "poisson-check") {
    need(c.n == 2, "model.n", "poisson-check needs model.n = 2");
    need(c.poisson_points >= 5, "poisson.points", "poisson.points must be at least 5");
    need(c.poisson_width_sd > 0.0, "poisson.width_sd", "poisson.width_sd must be positive");
  }
  need(!c.output_dir.empty(), "output.dir", "output.dir must not be empty");
  return d;
}

PotentialModel build_model(const ExperimentConfig& c) {
  if (c.family == "GC") {
    if (c.n != 2) throw ModelError("GC is defined for n = 2");
    return PotentialModel::gaussian_coupled(c.a, c.k_c, c.k_b, c.beta);
  }
  if (c.family == "TR") return PotentialModel::tracking(ExprPotential1D::parse(c.v1), c.k, c.n, c.beta);
  if (c.family == "DW") return PotentialModel::double_well(c.k, c.n, c.beta);
  if (c.family == "DEC") {
    std::vector<ExprPotential1D> bath;
    for (int i = 0; i < c.n - 1; ++i) {
      bath.push_back(ExprPotential1D::parse(c.bath.size() == 1 ? c.bath[0] : c.bath.at(i)));
    }
    return PotentialModel::decoupled(ExprPotential1D::parse(c.v1), std::move(bath), c.beta);
  }
  throw ConfigError("unknown model family '" + c.family + "'");
}

InitialLaw build_initial_law(const ExperimentConfig& c) {
  return c.init == "fixed" ? InitialLaw::fixed(c.x0) : InitialLaw::equilibrium();
}

ExperimentConfig with_parameter(ExperimentConfig c, std::string_view name, double value) {
  if (name == "epsilon") {
    c.epsilon = {value};
  } else if (name == "a") {
    c.a = value;
  } else if (name == "k_c") {
    c.k_c = value;
  } else if (name == "k_b") {
    c.k_b = value;
  } else if (name == "k") {
    c.k = value;
  } else if (name == "beta") {
    c.beta = value;
  } else {
    throw ConfigError("unknown sweep parameter '" + std::string(name) + "'");
  }
  return c;
}

}  // namespace effdyn
