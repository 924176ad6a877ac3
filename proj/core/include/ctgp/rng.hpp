#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace ctgp {

/// Counter-based pseudorandom stream.
///
/// Output i of a stream is a pure function of (key, i), so a stream can be
/// split into independent sub-streams by deriving new keys, and two streams
/// constructed from the same seed produce identical sequences on every
/// platform. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Independent sub-stream identified by `stream_id`.
  [[nodiscard]] Rng split(std::uint64_t stream_id) const;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal(double mean, double stddev);

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_;
};

/// Canonical sub-stream ids used by a single run.
namespace streams {
inline constexpr std::uint64_t kPolicy = 1;
inline constexpr std::uint64_t kAdversary = 2;
inline constexpr std::uint64_t kNoise = 3;
inline constexpr std::uint64_t kObjective = 4;
}  // namespace streams

}  // namespace ctgp
