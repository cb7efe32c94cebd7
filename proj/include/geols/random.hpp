#pragma once

// Counter-based random numbers (Philox4x32-10). A stream is identified by a
// 64-bit key; replicate r of a run with seed s draws from
// RandomStream(derive_seed(s, r)), so results do not depend on scheduling.

#include <array>
#include <cstddef>
#include <cstdint>

namespace geols {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds.
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// splitmix64 finalizer applied to seed and index; used to name substreams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class RandomStream {
public:
  explicit RandomStream(std::uint64_t key);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal by Box-Muller.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Unbiased integer in [0, n).
  std::size_t uniform_index(std::size_t n);

  RandomStream substream(std::uint64_t index) const { return RandomStream(derive_seed(key_, index)); }

private:
  void refill();

  std::uint64_t key_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace geols
