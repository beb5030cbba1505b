#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace rmtlab {

struct Seed {
  std::uint64_t value = 0;
  friend bool operator==(Seed, Seed) = default;
};

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Pure function of (counter, key).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Identifies one independent substream under a master seed.
struct StreamId {
  std::uint64_t trial = 0;
  std::uint32_t stream = 0;
};

/// Counter-based random stream. The sequence depends only on (seed, trial,
/// stream), so trials can be generated in any order or on any thread.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(Seed seed, StreamId id) noexcept
      : key_{static_cast<std::uint32_t>(seed.value),
             static_cast<std::uint32_t>(seed.value >> 32)},
        id_(id) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (lane_ == 2) refill();
    const auto lo = buffer_[2 * lane_];
    const auto hi = buffer_[2 * lane_ + 1];
    ++lane_;
    return (std::uint64_t{hi} << 32) | lo;
  }

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  StreamId id() const noexcept { return id_; }

 private:
  void refill() noexcept {
    // 2^32 blocks (2^33 draws) per substream before the block word wraps.
    buffer_ = Philox4x32::block({block_, id_.stream, static_cast<std::uint32_t>(id_.trial),
                                 static_cast<std::uint32_t>(id_.trial >> 32)},
                                key_);
    ++block_;
    lane_ = 0;
  }

  Philox4x32::Key key_;
  StreamId id_;
  std::uint32_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int lane_ = 2;
};

/// Standard normal draw by Box-Muller (one draw per two uniforms, no caching,
/// so draws never leak across calls).
template <class Rng>
double standard_normal(Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rmtlab
