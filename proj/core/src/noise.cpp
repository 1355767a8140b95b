#include "effdyn/noise.hpp"

#include <cmath>
#include <numbers>

#include "effdyn/error.hpp"

namespace effdyn {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform on (0, 1].
inline double to_unit(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t m = (static_cast<std::uint64_t>(a) << 21) ^ (b >> 11);
  return (static_cast<double>(m & ((1ull << 53) - 1)) + 1.0) * 0x1.0p-53;
}

inline std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
inline std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

std::uint32_t stream_word(int level, int coord, StreamTag tag) {
  if (level < 0 || level > 255) throw Error("noise refinement level out of range");
  if (coord < 0 || coord > 0xFFFF) throw Error("noise coordinate out of range");
  return static_cast<std::uint32_t>(level) | (static_cast<std::uint32_t>(coord) << 8) |
         (static_cast<std::uint32_t>(tag) << 24);
}

// Box-Muller pair from one Philox block.
inline void normal_pair(const Philox4x32::Counter& r, double& z0, double& z1) {
  const double u1 = to_unit(r[0], r[1]);
  const double u2 = to_unit(r[2], r[3]);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  z0 = rad * std::cos(th);
  z1 = rad * std::sin(th);
}

void stream_normals(std::uint64_t seed, std::uint64_t path, int level, int coord,
                    std::span<double> out) {
  const Philox4x32::Key key{lo32(seed), hi32(seed)};
  Philox4x32::Counter ctr{0, stream_word(level, coord, StreamTag::Dynamics), lo32(path),
                          hi32(path)};
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; i += 2) {
    ctr[0] = static_cast<std::uint32_t>(i >> 1);
    double z0, z1;
    normal_pair(Philox4x32::generate(ctr, key), z0, z1);
    out[i] = z0;
    if (i + 1 < n) out[i + 1] = z1;
  }
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t path, StreamTag tag,
                       std::uint16_t substream)
    : key_{lo32(seed), hi32(seed)},
      base_{0, stream_word(0, substream, tag), lo32(path), hi32(path)} {}

std::uint32_t CounterRng::next_word() {
  if (used_ == 4) {
    Philox4x32::Counter c = base_;
    c[0] = block_++;
    buf_ = Philox4x32::generate(c, key_);
    used_ = 0;
  }
  return buf_[used_++];
}

double CounterRng::uniform() {
  const std::uint32_t a = next_word();
  return to_unit(a, next_word());
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  Philox4x32::Counter r;
  for (auto& w : r) w = next_word();
  double z0;
  normal_pair(r, z0, spare_);
  has_spare_ = true;
  return z0;
}

NoisePlan NoisePlan::from_dt(std::uint64_t seed, double T, double dt) {
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  const double s = std::round(T / dt);
  if (s < 1.0 || s > 1e9) throw ConfigError("T/dt gives an unusable step count");
  return NoisePlan{seed, T, static_cast<int>(s), 0};
}

NoisePlan NoisePlan::refined(int levels) const {
  NoisePlan p = *this;
  p.refinement += levels;
  if (p.refinement < 0 || p.refinement > 20) throw Error("noise refinement level out of range");
  return p;
}

double counter_normal(std::uint64_t seed, std::uint64_t path, int level, int coord,
                      StreamTag tag, std::uint64_t index) {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index >> 1),
                                stream_word(level, coord, tag), lo32(path), hi32(path)};
  double z0, z1;
  normal_pair(Philox4x32::generate(ctr, {lo32(seed), hi32(seed)}), z0, z1);
  return (index & 1) ? z1 : z0;
}

void brownian_normals(const NoisePlan& plan, std::uint64_t path, int coord,
                      std::span<double> out) {
  if (static_cast<int>(out.size()) != plan.steps()) {
    throw DimensionError("noise buffer does not match the plan's step count");
  }
  const std::size_t n0 = static_cast<std::size_t>(plan.base_steps);
  stream_normals(plan.seed, path, 0, coord, out.first(n0));
  std::vector<double> z;
  for (int level = 1; level <= plan.refinement; ++level) {
    // Each parent interval splits in two; in units of the child sqrt(dt):
    // G_left = (G + Z) / sqrt 2, G_right = (G - Z) / sqrt 2.
    const std::size_t parents = n0 << (level - 1);
    z.resize(parents);
    stream_normals(plan.seed, path, level, coord, z);
    for (std::size_t k = parents; k-- > 0;) {
      const double g = out[k];
      out[2 * k] = (g + z[k]) * std::numbers::sqrt2 * 0.5;
      out[2 * k + 1] = (g - z[k]) * std::numbers::sqrt2 * 0.5;
    }
  }
}

std::vector<double> brownian_normals(const NoisePlan& plan, std::uint64_t path, int dim) {
  const std::size_t steps = static_cast<std::size_t>(plan.steps());
  std::vector<double> out(steps * static_cast<std::size_t>(dim));
  std::vector<double> col(steps);
  for (int c = 0; c < dim; ++c) {
    brownian_normals(plan, path, c, col);
    for (std::size_t j = 0; j < steps; ++j) out[j * dim + c] = col[j];
  }
  return out;
}

}  // namespace effdyn
