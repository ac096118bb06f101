#include "snc/metrics.hpp"

#include "snc/parallel.hpp"

#include <algorithm>
#include <chrono>

namespace snc {

double distortion_mu(double delta_high, double delta_low, DistortionKind kind) noexcept {
  const double diff = kind == DistortionKind::compress ? delta_high - delta_low : delta_low - delta_high;
  return diff > 0.0 ? diff : 0.0;
}

double normalize_distortion(double mu, double lo, double hi) noexcept {
  if (!(hi > lo)) return 0.0;
  return std::clamp((mu - lo) / (hi - lo), 0.0, 1.0);
}

PairDistortion partial_distortion_pair(const IdSet& ci, const IdSet& cj,
                                       const PairedEmbedding& embedding, const SpaceIndex& high,
                                       const SpaceIndex& low, const DistortionMatrices& dm,
                                       DistortionKind kind, const MetricConfig& config) {
  PairDistortion out;
  out.delta_high = cluster_pair_distance(ci, cj, high, config.distance, embedding.original());
  out.delta_low = cluster_pair_distance(ci, cj, low, config.distance, embedding.projected());
  out.mu = distortion_mu(out.delta_high, out.delta_low, kind);
  out.m = kind == DistortionKind::compress ? normalize_distortion(out.mu, dm.min_plus, dm.max_plus)
                                           : normalize_distortion(out.mu, dm.min_minus, dm.max_minus);
  out.w = static_cast<double>(ci.size()) * static_cast<double>(cj.size());
  return out;
}

IterationResult run_iteration(const PairedEmbedding& embedding, const SpaceIndex& high,
                              const SpaceIndex& low, const DistortionMatrices& dm, Measure measure,
                              RngStream& rng, const MetricConfig& config, int iteration) {
  const bool steadiness = measure == Measure::steadiness;
  const Space source = steadiness ? Space::projected : Space::original;
  const SpaceIndex& source_index = steadiness ? low : high;
  const SpaceIndex& target_index = steadiness ? high : low;

  IterationResult result;
  result.iteration = iteration;
  result.measure = measure;
  const auto seed = static_cast<PointId>(rng.uniform_index(static_cast<std::uint64_t>(embedding.size())));
  result.extracted = extract_cluster(source_index, seed, rng, config, source);
  result.partition = cluster_in_opposite_space(result.extracted.members, target_index,
                                               embedding.coords(opposite(source)), config, rng,
                                               opposite(source));

  const auto kind = distortion_kind(measure);
  const auto& clusters = result.partition.clusters;
  const auto count = static_cast<std::uint32_t>(clusters.size());
  result.records.reserve(static_cast<std::size_t>(count) * (count - 1) / 2);
  for (std::uint32_t i = 0; i < count; ++i) {
    for (std::uint32_t j = i + 1; j < count; ++j) {
      const PairDistortion pd =
          partial_distortion_pair(clusters[i], clusters[j], embedding, high, low, dm, kind, config);
      result.records.push_back({i, j, pd.mu, pd.m, pd.w, kind, iteration});
    }
  }
  return result;
}

MetricScores aggregate(std::span<const PartialDistortionRecord> records_compress,
                       std::span<const PartialDistortionRecord> records_stretch,
                       bool include_zero_sign_pairs) {
  ScoreAccumulator st(include_zero_sign_pairs);
  ScoreAccumulator co(include_zero_sign_pairs);
  for (const auto& r : records_compress) st.add(r);
  for (const auto& r : records_stretch) co.add(r);
  MetricScores scores;
  scores.steadiness = st.score();
  scores.cohesiveness = co.score();
  scores.n_pairs_steadiness = st.pairs();
  scores.n_pairs_cohesiveness = co.pairs();
  scores.steadiness_undetermined = st.empty();
  scores.cohesiveness_undetermined = co.empty();
  return scores;
}

PointwiseAccumulator::PointwiseAccumulator(Index n, bool include_zero_sign_pairs)
    : n_(n),
      include_zero_(include_zero_sign_pairs),
      compress_(static_cast<std::size_t>(n)),
      stretch_(static_cast<std::size_t>(n)) {}

void PointwiseAccumulator::add(const IterationResult& result) {
  for (const auto& r : result.records) {
    if (!include_zero_ && r.mu == 0.0) continue;
    const bool compress = r.kind == DistortionKind::compress;
    Table& table = compress ? compress_ : stretch_;
    std::int64_t& counter = compress ? count_compress_ : count_stretch_;
    const double strength = r.m * r.w;
    const IdSet& ci = result.cluster(r.cluster_i);
    const IdSet& cj = result.cluster(r.cluster_j);
    for (PointId q : ci) {
      for (PointId p : cj) {
        Sum& forward = table[static_cast<std::size_t>(q)][p];
        forward.total += strength;
        ++forward.count;
        Sum& backward = table[static_cast<std::size_t>(p)][q];
        backward.total += strength;
        ++backward.count;
        counter += 2;
      }
    }
  }
}

PointwiseDistortionField PointwiseAccumulator::finalize() const {
  PointwiseDistortionField field;
  auto finish = [this](const Table& table, Vector<double>& totals,
                       std::vector<std::vector<Registration>>& lists) {
    totals = Vector<double>::Zero(n_);
    lists.assign(static_cast<std::size_t>(n_), {});
    for (Index i = 0; i < n_; ++i) {
      auto& list = lists[static_cast<std::size_t>(i)];
      for (const auto& [target, sum] : table[static_cast<std::size_t>(i)]) {
        list.push_back({target, sum.total / static_cast<double>(sum.count)});
      }
      std::sort(list.begin(), list.end(),
                [](const Registration& a, const Registration& b) { return a.target < b.target; });
      double total = 0.0;
      for (const auto& reg : list) total += reg.strength;
      totals(i) = total;
    }
  };
  finish(compress_, field.steadiness, field.registration_compress);
  finish(stretch_, field.cohesiveness, field.registration_stretch);
  return field;
}

PointwiseDistortionField accumulate_pointwise(std::span<const IterationResult> results, Index n,
                                              bool include_zero_sign_pairs) {
  PointwiseAccumulator acc(n, include_zero_sign_pairs);
  for (const auto& r : results) acc.add(r);
  return acc.finalize();
}

SncResult compute_snc(const PairedEmbedding& embedding, const MetricConfig& config) {
  config.validate(embedding.size());
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const SpaceIndex high = build_space_index(embedding.original(), config);
  const SpaceIndex low = build_space_index(embedding.projected(), config);
  const DistortionMatrices dm = build_distortion_matrices(high, low);
  const auto t1 = Clock::now();

  SncResult out;
  auto& diag = out.diagnostics;
  diag.max_plus = dm.max_plus;
  diag.max_minus = dm.max_minus;

  ScoreAccumulator st(config.include_zero_sign_pairs);
  ScoreAccumulator co(config.include_zero_sign_pairs);
  std::optional<PointwiseAccumulator> pointwise;
  if (config.collect_pointwise) pointwise.emplace(embedding.size(), config.include_zero_sign_pairs);

  // Iterations are computed in parallel batches and folded in iteration
  // order, so sums are independent of scheduling.
  const int total = config.iterations;
  const int batch = std::max(1, worker_count() * 4);
  std::vector<IterationResult> results;
  for (int start = 0; start < total; start += batch) {
    const int count = std::min(batch, total - start);
    results.assign(static_cast<std::size_t>(2 * count), {});
    parallel_for(2 * count, [&](std::ptrdiff_t slot) {
      const int it = start + static_cast<int>(slot / 2);
      const Measure measure = slot % 2 == 0 ? Measure::steadiness : Measure::cohesiveness;
      RngStream rng = derive_stream(config, it, measure);
      results[static_cast<std::size_t>(slot)] =
          run_iteration(embedding, high, low, dm, measure, rng, config, it);
    });
    for (const auto& r : results) {
      const bool steady = r.measure == Measure::steadiness;
      ScoreAccumulator& acc = steady ? st : co;
      for (const auto& rec : r.records) acc.add(rec);
      (steady ? diag.records_per_iteration_steadiness : diag.records_per_iteration_cohesiveness)
          .push_back(static_cast<std::int64_t>(r.records.size()));
      (steady ? diag.members_per_iteration_steadiness : diag.members_per_iteration_cohesiveness)
          .push_back(static_cast<std::int64_t>(r.extracted.members.size()));
      if (pointwise) pointwise->add(r);
    }
  }

  out.scores.steadiness = st.score();
  out.scores.cohesiveness = co.score();
  out.scores.n_pairs_steadiness = st.pairs();
  out.scores.n_pairs_cohesiveness = co.pairs();
  out.scores.steadiness_undetermined = st.empty();
  out.scores.cohesiveness_undetermined = co.empty();
  if (pointwise) out.field = pointwise->finalize();
  const auto t2 = Clock::now();
  diag.seconds_index = std::chrono::duration<double>(t1 - t0).count();
  diag.seconds_iterations = std::chrono::duration<double>(t2 - t1).count();
  return out;
}

}  // namespace snc
