#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace excir {

/// Counter-based 64-bit generator.
///
/// A stream is identified by (seed, stream). Draw number i (starting at 0) is
///
///     key   = mix64(seed ^ mix64(stream * G + S))
///     out_i = mix64(key + (i + 1) * G)
///
/// with G = 0x9E3779B97F4A7C15, S = 0xD1B54A32D192ED03 and mix64 the
/// SplitMix64 finalizer:
///
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     z =  z ^ (z >> 31)
///
/// All arithmetic is modulo 2^64. Because each output depends only on
/// (seed, stream, i), any port that follows the formula reproduces the stream
/// bit for bit, and independent workers can own disjoint streams.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1): the top 53 bits of the next draw times 2^-53.
  double uniform() noexcept;

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) noexcept;

  /// Uniform integer in [0, bound) by 128-bit multiply-high. bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Bernoulli(p): uniform() < p.
  bool bernoulli(double p) noexcept;

  /// Standard normal via Box-Muller (one draw pair per call, the sine branch
  /// is discarded so the counter advances by exactly two).
  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

  static std::uint64_t mix64(std::uint64_t z) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates shuffle driven by CounterRng::below, from the back.
template <typename T>
void shuffle(std::span<T> values, CounterRng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(values[i - 1], values[j]);
  }
}

/// Sorted sample of `count` distinct indices from [0, n), by partial shuffle.
std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t count,
                                                    CounterRng& rng);

}  // namespace excir
