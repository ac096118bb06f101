#pragma once

#include "snc/core.hpp"

#include <cstdint>
#include <random>

namespace snc {

/// Which of the two scores a measurement iteration belongs to.
enum class Measure { steadiness, cohesiveness };

/// Reproducible random stream identified by (seed, stream_id).
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the C++
/// standard. All derived draws (uniform reals, bounded integers, normals) are
/// computed here rather than through <random> distributions, which are
/// implementation-defined, so a stream yields the same values on every
/// platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Stream for one measurement iteration. Throws ConfigError when iteration is
/// outside [0, config.iterations).
RngStream derive_stream(const MetricConfig& config, int iteration);

/// Measure-specific stream. Steadiness and Cohesiveness use disjoint stream
/// ids; `config.swap_streams` exchanges them.
RngStream derive_stream(const MetricConfig& config, int iteration, Measure measure);

}  // namespace snc
