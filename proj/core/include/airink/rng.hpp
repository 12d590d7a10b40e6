#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace airink {

/// Seed derivation: deterministic, order-independent child seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Counter-based random stream: draw i is mix(key, i), so a stream's output
/// depends only on its key and how many values were drawn from it.
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key) : key_(key) {}
  RandomStream(std::uint64_t run_seed, std::string_view component)
      : key_(derive_seed(run_seed, component)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Fisher-Yates shuffle driven by a RandomStream; stable across standard
/// library implementations, unlike std::shuffle.
template <typename It>
void shuffle(It first, It last, RandomStream& rng) {
  auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    auto j = rng.below(i);
    std::swap(first[i - 1], first[j]);
  }
}

}  // namespace airink
