#include "snc/rng.hpp"

#include <cmath>
#include <numbers>

namespace snc {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream_id ^ 0xD1B54A32D192ED03ULL))) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw ConfigError("uniform_index requires n > 0");
  // Rejection sampling over the largest multiple of n.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double RngStream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStream derive_stream(const MetricConfig& config, int iteration) {
  if (iteration < 0 || iteration >= config.iterations) {
    throw ConfigError("iteration " + std::to_string(iteration) + " outside [0, " +
                      std::to_string(config.iterations) + ")");
  }
  return RngStream(config.seed, static_cast<std::uint64_t>(iteration));
}

RngStream derive_stream(const MetricConfig& config, int iteration, Measure measure) {
  const RngStream base = derive_stream(config, iteration);
  bool second = measure == Measure::cohesiveness;
  if (config.swap_streams) second = !second;
  const std::uint64_t channel = second ? 1ULL : 0ULL;
  return RngStream(config.seed, base.stream_id() | (channel << 32));
}

}  // namespace snc
