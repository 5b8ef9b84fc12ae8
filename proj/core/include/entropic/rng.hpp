#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace entropic {

/// Counter-based generator: output i is a bijective mix of (key, i).
///
/// The whole state is two integers, so copies are cheap and a run is
/// reproducible from its seed alone. split() derives an independent child
/// stream without advancing the parent's output counter.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  Rng split() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; consumes exactly two outputs.
  double normal() noexcept;
  double normal(double mean, double sigma) noexcept { return mean + sigma * normal(); }
  /// Unbiased integer in [0, n).
  std::size_t index(std::size_t n);

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  Rng(std::uint64_t key, std::uint64_t counter, std::uint64_t splits) noexcept
      : key_(key), counter_(counter), splits_(splits) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::uint64_t splits_ = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace entropic
