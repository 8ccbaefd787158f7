#pragma once

#include <cstdint>
#include <random>

namespace isoeb {

/// Seeded RNG with independent substreams.
///
/// Each (seed, stream_id) pair defines a reproducible stream; distinct
/// stream_ids are decorrelated by a SplitMix64 key schedule, so Monte Carlo
/// replicates can run concurrently without sharing state. Normal deviates use
/// Box-Muller without a cached spare, so the stream position depends only on
/// the number of values drawn.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  /// Uniform on (0, 1].
  double uniform();
  /// Standard normal deviate.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  std::uint64_t next_u64() { return gen_(); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 gen_;
};

}  // namespace isoeb
