#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace effdyn {

/// Philox4x32-10 block cipher (Salmon et al. counter-based generator).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Independent sub-streams of one master seed.
enum class StreamTag : std::uint8_t {
  Dynamics = 1,
  Initial = 2,
  Mala = 3,
};

/// Sequential generator over a (seed, path, tag, substream) stream. Each
/// instance is cheap and owns its position, so one per path and per purpose.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t path, StreamTag tag, std::uint16_t substream = 0);

  double normal();
  /// Uniform on (0, 1].
  double uniform();

 private:
  std::uint32_t next_word();

  Philox4x32::Key key_;
  Philox4x32::Counter base_;
  std::uint32_t block_ = 0;
  Philox4x32::Counter buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Time discretization plus the Brownian increments of every path.
///
/// The base grid has `base_steps` steps; each refinement level halves dt and
/// refines the same Brownian path by midpoint bridge sampling, so a plan and
/// its refinement are driven by one underlying W.
struct NoisePlan {
  std::uint64_t seed = 0;
  double T = 1.0;
  int base_steps = 2000;
  int refinement = 0;

  /// steps = round(T / dt).
  static NoisePlan from_dt(std::uint64_t seed, double T, double dt);

  int steps() const noexcept { return base_steps << refinement; }
  double dt() const noexcept { return T / steps(); }
  NoisePlan refined(int levels = 1) const;
};

/// Standard normal G with W(t_{j+1}) - W(t_j) = sqrt(dt) G for coordinate
/// `coord` of path `path`; out.size() must equal plan.steps().
void brownian_normals(const NoisePlan& plan, std::uint64_t path, int coord,
                      std::span<double> out);

/// All coordinates, row-major (step, coord): out[j * dim + c].
std::vector<double> brownian_normals(const NoisePlan& plan, std::uint64_t path, int dim);

/// The normal consumed at position `index` of the (level, coord, tag) stream.
double counter_normal(std::uint64_t seed, std::uint64_t path, int level, int coord,
                      StreamTag tag, std::uint64_t index);

}  // namespace effdyn
