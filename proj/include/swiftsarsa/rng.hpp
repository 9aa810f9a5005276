#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace swiftsarsa {

// Counter-based PRNG: the SplitMix64 finalizer applied to seed + k*golden
// ratio for draw counter k. Chosen over std engines because the output
// stream is fixed by this header alone, so runs reproduce across builds
// and the (seed, counter) pair serializes losslessly.
class Rng {
 public:
  Rng() = default;
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t x = seed_ + kGolden * ++counter_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n); n > 0. Lemire multiply-shift.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Uniform integer in [lo, hi], both endpoints included.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Box-Muller without caching: every call consumes exactly two draws.
  double gaussian(double stddev) {
    double u1 = uniform_pos();
    double u2 = uniform();
    return stddev * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643 * u2);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }
  void restore(std::uint64_t seed, std::uint64_t counter) {
    seed_ = seed;
    counter_ = counter;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

/// Stable, order-sensitive seed mix used to give sweep cells and subsystems
/// independent streams. Two SplitMix64 finalizes (the first component passes
/// through one before the second folds in), so mix(a, b) != mix(b, a) and the
/// value is identical on every platform.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  auto finalize = [](std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return finalize(finalize(a + 0x9e3779b97f4a7c15ULL) +
                  0x9e3779b97f4a7c15ULL * b);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(mix_seed(master, a), b), c);
}

}  // namespace swiftsarsa
