#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace sanid {

/// Deterministic xoshiro256** generator whose 256-bit state is expanded from
/// a 64-bit seed with splitmix64. Every derived quantity (uniform reals,
/// bounded integers, shuffles) is computed here rather than through
/// <random> distributions, so a seed yields the same stream on every
/// platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Independent stream keyed by (seed, stream); does not advance *this.
  Rng fork(std::uint64_t stream) const;

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
};

std::uint64_t splitmix64(std::uint64_t& x) noexcept;

}  // namespace sanid
