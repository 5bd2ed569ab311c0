#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>

namespace stlrl {

/// Seedable random stream used everywhere randomness enters the system.
///
/// One master seed fans out into independent named streams through
/// `derive_seed`, so a run is reproducible bit for bit on one machine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  std::uint64_t next() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

  // The normal distribution caches its spare deviate, so it is part of the state.
  void save(std::ostream& os) const;
  void load(std::istream& is);

  bool operator==(const Rng& other) const {
    return engine_ == other.engine_ && normal_ == other.normal_;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Derive the seed of a named sub-stream from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

/// Derive the seed of the i-th member of an indexed family of streams.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index);

}  // namespace stlrl
