#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace tfs {

/// Counter-based pseudo-random stream keyed by (seed, stream_id).
///
/// The k-th draw is a pure function of (seed, stream_id, k), so any two
/// streams built from the same pair emit the same sequence no matter which
/// thread owns them or in which order they are consumed. Satisfies
/// UniformRandomBitGenerator, so the standard distributions can be used on it.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Standard normal deviate.
  double normal();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);
  /// +1 or -1 with equal probability.
  double sign();

  /// Independent child stream; depends only on (seed, stream_id, child_id).
  RandomStream substream(std::uint64_t child_id) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

}  // namespace tfs
