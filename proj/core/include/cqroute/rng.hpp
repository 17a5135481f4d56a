#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cqroute {

/// Seeded pseudo-random stream.
///
/// Sampling is implemented on top of the raw 64-bit engine output rather than
/// the <random> distributions, whose algorithms are implementation-defined, so
/// a seed reproduces the same trajectory on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream derived from this stream's seed and `label`. The
  /// result depends only on (seed, label), never on how far this stream has
  /// been consumed.
  Rng fork(std::string_view label) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  double normal(double mean, double stddev);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);
/// 64-bit FNV-1a.
std::uint64_t hash_label(std::string_view label);
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

}  // namespace cqroute
