#pragma once

#include "snc/clusterers.hpp"
#include "snc/core.hpp"
#include "snc/rng.hpp"
#include "snc/snn_space.hpp"

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace snc {

/// compress feeds Steadiness (False Groups), stretch feeds Cohesiveness
/// (Missing Groups).
enum class DistortionKind { compress, stretch };

constexpr DistortionKind distortion_kind(Measure m) noexcept {
  return m == Measure::steadiness ? DistortionKind::compress : DistortionKind::stretch;
}

/// mu for one cluster pair: the positive part of (delta_high - delta_low)
/// for compression, of (delta_low - delta_high) for stretching.
double distortion_mu(double delta_high, double delta_low, DistortionKind kind) noexcept;

/// (mu - lo) / (hi - lo) clamped to [0, 1]; 0 when hi <= lo.
double normalize_distortion(double mu, double lo, double hi) noexcept;

struct PairDistortion {
  double delta_high = 0.0;
  double delta_low = 0.0;
  double mu = 0.0;
  double m = 0.0;
  double w = 0.0;
};

/// Distortion of one cluster pair. Cluster distances are taken in both spaces
/// in the units of the normalized distance matrices; m is normalized by the
/// extrema of d_plus (compress) or d_minus (stretch).
PairDistortion partial_distortion_pair(const IdSet& ci, const IdSet& cj,
                                       const PairedEmbedding& embedding, const SpaceIndex& high,
                                       const SpaceIndex& low, const DistortionMatrices& dm,
                                       DistortionKind kind, const MetricConfig& config);

/// One partial distortion. The two clusters are identified by their position
/// in the partition of the iteration that produced the record.
struct PartialDistortionRecord {
  std::uint32_t cluster_i = 0;
  std::uint32_t cluster_j = 0;
  double mu = 0.0;
  double m = 0.0;
  double w = 0.0;
  DistortionKind kind = DistortionKind::compress;
  int iteration = 0;
};

struct IterationResult {
  int iteration = 0;
  Measure measure = Measure::steadiness;
  ExtractedCluster extracted;
  ClusterPartition partition;
  std::vector<PartialDistortionRecord> records;

  const IdSet& cluster(std::uint32_t i) const { return partition.clusters[i]; }
};

/// One extraction in the measure's source space (projected for Steadiness,
/// original for Cohesiveness), one partition in the opposite space, one
/// record per unordered pair of partition clusters.
IterationResult run_iteration(const PairedEmbedding& embedding, const SpaceIndex& high,
                              const SpaceIndex& low, const DistortionMatrices& dm, Measure measure,
                              RngStream& rng, const MetricConfig& config, int iteration = 0);

struct MetricScores {
  double steadiness = 1.0;
  double cohesiveness = 1.0;
  std::int64_t n_pairs_steadiness = 0;
  std::int64_t n_pairs_cohesiveness = 0;
  // Set when no record entered the average, in which case the score is 1.
  bool steadiness_undetermined = false;
  bool cohesiveness_undetermined = false;
};

/// Running weighted average 1 - sum(w m) / sum(w) in record order.
class ScoreAccumulator {
 public:
  explicit ScoreAccumulator(bool include_zero_sign_pairs = true)
      : include_zero_(include_zero_sign_pairs) {}

  void add(const PartialDistortionRecord& r) noexcept {
    if (!include_zero_ && r.mu == 0.0) return;
    weighted_ += r.w * r.m;
    weights_ += r.w;
    ++pairs_;
  }
  double score() const noexcept { return weights_ > 0.0 ? 1.0 - weighted_ / weights_ : 1.0; }
  std::int64_t pairs() const noexcept { return pairs_; }
  bool empty() const noexcept { return weights_ <= 0.0; }

 private:
  bool include_zero_;
  double weighted_ = 0.0;
  double weights_ = 0.0;
  std::int64_t pairs_ = 0;
};

MetricScores aggregate(std::span<const PartialDistortionRecord> records_compress,
                       std::span<const PartialDistortionRecord> records_stretch,
                       bool include_zero_sign_pairs = true);

struct Registration {
  PointId target = 0;
  double strength = 0.0;

  friend bool operator==(const Registration&, const Registration&) = default;
};

/// Per-point distortion on both channels plus the averaged registrations
/// behind them.
struct PointwiseDistortionField {
  Vector<double> steadiness;    // compress channel
  Vector<double> cohesiveness;  // stretch channel
  std::vector<std::vector<Registration>> registration_compress;
  std::vector<std::vector<Registration>> registration_stretch;

  Index size() const noexcept { return steadiness.size(); }
};

/// Registers, for every record over (Ci, Cj), each p in Cj to each q in Ci
/// and vice versa with strength m * w. Repeated registrations of the same
/// target are averaged at finalize.
class PointwiseAccumulator {
 public:
  explicit PointwiseAccumulator(Index n, bool include_zero_sign_pairs = true);

  void add(const IterationResult& result);
  std::int64_t registrations(DistortionKind kind) const noexcept {
    return kind == DistortionKind::compress ? count_compress_ : count_stretch_;
  }
  PointwiseDistortionField finalize() const;

 private:
  struct Sum {
    double total = 0.0;
    std::int64_t count = 0;
  };
  using Table = std::vector<std::unordered_map<PointId, Sum>>;

  Index n_;
  bool include_zero_;
  Table compress_;
  Table stretch_;
  std::int64_t count_compress_ = 0;
  std::int64_t count_stretch_ = 0;
};

PointwiseDistortionField accumulate_pointwise(std::span<const IterationResult> results, Index n,
                                              bool include_zero_sign_pairs = true);

struct SncDiagnostics {
  std::vector<std::int64_t> records_per_iteration_steadiness;
  std::vector<std::int64_t> records_per_iteration_cohesiveness;
  std::vector<std::int64_t> members_per_iteration_steadiness;
  std::vector<std::int64_t> members_per_iteration_cohesiveness;
  double max_plus = 0.0;
  double max_minus = 0.0;
  double seconds_index = 0.0;
  double seconds_iterations = 0.0;
};

struct SncResult {
  MetricScores scores;
  PointwiseDistortionField field;  // empty unless config.collect_pointwise
  SncDiagnostics diagnostics;
};

/// Steadiness and Cohesiveness of a projection, config.iterations extractions
/// per measure. Iterations run concurrently; results do not depend on the
/// worker count.
SncResult compute_snc(const PairedEmbedding& embedding, const MetricConfig& config);

}  // namespace snc
