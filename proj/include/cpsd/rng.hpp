#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cpsd {

/// Seedable, splittable pseudo-random generator: an mt19937_64 whose state is
/// expanded from the root seed with splitmix64. split(stream) derives an
/// independent child generator from (root seed, stream id) only, so per-item
/// streams are identical no matter how work is scheduled across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng split(std::uint64_t stream) const;

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform();

  /// Standard normal via Box-Muller (platform-stable given one libm).
  double gaussian();

  /// Samples an index from the distribution whose cumulative weights are
  /// `cumulative` (nondecreasing, last entry = total mass > 0).
  std::size_t categorical(const std::vector<double>& cumulative);

  std::uint64_t root_seed() const { return root_; }

 private:
  std::uint64_t root_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cpsd
