#include "entropic/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace entropic {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSplitSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  // splitmix64 finalizer
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

Rng::Rng(std::uint64_t seed) noexcept : key_(mix64(seed + kGolden)) {}

Rng::result_type Rng::operator()() noexcept {
  const std::uint64_t c = counter_++;
  return mix64(key_ ^ mix64(c * kGolden + kSplitSalt));
}

Rng Rng::split() noexcept {
  const std::uint64_t s = ++splits_;
  return Rng(mix64(key_ + s * kSplitSalt) ^ kGolden, 0, 0);
}

double Rng::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index: empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t x;
  do {
    x = (*this)();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

}  // namespace entropic
