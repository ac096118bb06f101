#include <doctest.h>

#include "oracles/suite.hpp"
#include "snc/metrics.hpp"

#include <cstdlib>

using namespace snc;

namespace {

PairedEmbedding random_embedding(std::uint64_t seed, Index n, Index dim_high, Index dim_low) {
  RngStream rng(seed, 0);
  return make_paired_embedding(oracle::random_matrix(rng, n, dim_high), oracle::random_matrix(rng, n, dim_low));
}

PartialDistortionRecord record(double m, double w, double mu = 1.0) {
  PartialDistortionRecord r;
  r.m = m;
  r.w = w;
  r.mu = mu;
  return r;
}

}  // namespace

TEST_CASE("mu and m formulas") {
  CHECK(distortion_mu(0.5, 0.5, DistortionKind::compress) == 0.0);
  CHECK(distortion_mu(0.5, 0.5, DistortionKind::stretch) == 0.0);
  CHECK(distortion_mu(0.9, 0.3, DistortionKind::compress) == doctest::Approx(0.6));
  CHECK(normalize_distortion(distortion_mu(0.9, 0.3, DistortionKind::compress), 0.0, 0.8) == doctest::Approx(0.75));
  CHECK(distortion_mu(0.3, 0.9, DistortionKind::compress) == 0.0);
  CHECK(distortion_mu(0.3, 0.9, DistortionKind::stretch) == doctest::Approx(0.6));
  CHECK(normalize_distortion(0.0, 0.0, 0.8) == 0.0);
  // Degenerate range: no distortion of that sign anywhere.
  CHECK(normalize_distortion(0.4, 0.0, 0.0) == 0.0);
  // Overshoot is clamped.
  CHECK(normalize_distortion(0.9, 0.0, 0.8) == 1.0);
}

TEST_CASE("partial distortion pair on a self-projection is zero") {
  const auto base = random_embedding(1, 40, 3, 3);
  const auto e = make_paired_embedding(base.original(), base.original());
  MetricConfig c;
  c.k_snn = 6;
  const SpaceIndex h = build_space_index(e.original(), c);
  const SpaceIndex l = build_space_index(e.projected(), c);
  const auto dm = build_distortion_matrices(h, l);
  for (auto kind : {DistortionKind::compress, DistortionKind::stretch}) {
    const auto p = partial_distortion_pair({0, 1, 2}, {5, 9}, e, h, l, dm, kind, c);
    CHECK(p.delta_high == p.delta_low);
    CHECK(p.mu == 0.0);
    CHECK(p.m == 0.0);
    CHECK(p.w == 6.0);
  }
}

TEST_CASE("run_iteration emits one record per cluster pair") {
  const auto e = random_embedding(2, 120, 5, 2);
  MetricConfig c;
  c.k_snn = 10;
  c.iterations = 30;
  const SpaceIndex h = build_space_index(e.original(), c);
  const SpaceIndex l = build_space_index(e.projected(), c);
  const auto dm = build_distortion_matrices(h, l);
  for (int it = 0; it < 30; ++it) {
    for (auto measure : {Measure::steadiness, Measure::cohesiveness}) {
      RngStream r1 = derive_stream(c, it, measure);
      RngStream r2 = derive_stream(c, it, measure);
      const auto a = run_iteration(e, h, l, dm, measure, r1, c, it);
      const auto b = run_iteration(e, h, l, dm, measure, r2, c, it);
      const std::size_t n = a.partition.clusters.size();
      CHECK(a.records.size() == n * (n - 1) / 2);
      CHECK(a.extracted.source == (measure == Measure::steadiness ? Space::projected : Space::original));
      CHECK(a.partition.target == opposite(a.extracted.source));
      REQUIRE(b.records.size() == a.records.size());
      for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].m == b.records[i].m);
        CHECK(a.records[i].w == b.records[i].w);
        CHECK(a.records[i].kind == distortion_kind(measure));
        CHECK(a.records[i].m >= 0.0);
        CHECK(a.records[i].m <= 1.0);
        CHECK(a.records[i].w == double(a.cluster(a.records[i].cluster_i).size() *
                                       a.cluster(a.records[i].cluster_j).size()));
      }
    }
  }
}

TEST_CASE("aggregate examples") {
  const std::vector<PartialDistortionRecord> zeros{record(0, 3, 0), record(0, 5, 0)};
  auto s = aggregate(zeros, zeros);
  CHECK(s.steadiness == 1.0);
  CHECK(s.cohesiveness == 1.0);

  const std::vector<PartialDistortionRecord> half{record(0.5, 17)};
  CHECK(aggregate(half, {}).steadiness == doctest::Approx(0.5));

  const std::vector<PartialDistortionRecord> two{record(0.2, 1), record(0.8, 3)};
  s = aggregate({}, two);
  CHECK(s.cohesiveness == doctest::Approx(0.35));
  CHECK(s.steadiness == 1.0);
  CHECK(s.steadiness_undetermined);
  CHECK_FALSE(s.cohesiveness_undetermined);
  CHECK(s.n_pairs_cohesiveness == 2);
}

TEST_CASE("zero-sign pairs can be excluded") {
  const std::vector<PartialDistortionRecord> recs{record(0.5, 1, 0.3), record(0.0, 3, 0.0)};
  CHECK(aggregate(recs, {}, true).steadiness == doctest::Approx(1.0 - 0.5 / 4.0));
  CHECK(aggregate(recs, {}, false).steadiness == doctest::Approx(0.5));
  CHECK(aggregate(recs, {}, false).n_pairs_steadiness == 1);
}

TEST_CASE("pointwise registration examples") {
  IterationResult it;
  it.partition.clusters = {{0}, {1}};
  PartialDistortionRecord r;
  r.cluster_i = 0;
  r.cluster_j = 1;
  r.m = 0.5;
  r.w = 4.0;
  r.mu = 0.2;
  r.kind = DistortionKind::compress;
  it.records = {r};

  const auto empty = accumulate_pointwise({}, 3);
  CHECK(empty.steadiness.isZero());
  CHECK(empty.cohesiveness.isZero());

  std::vector<IterationResult> one{it};
  auto f = accumulate_pointwise(one, 3);
  CHECK(f.steadiness(0) == 2.0);
  CHECK(f.steadiness(1) == 2.0);
  CHECK(f.steadiness(2) == 0.0);
  CHECK(f.cohesiveness.isZero());
  REQUIRE(f.registration_compress[0].size() == 1);
  CHECK(f.registration_compress[0][0] == Registration{1, 2.0});
  CHECK(f.registration_compress[1][0] == Registration{0, 2.0});

  // Same pair registered again at strength 4: averaged to 3.
  IterationResult again = it;
  again.records[0].m = 1.0;
  std::vector<IterationResult> twice{it, again};
  f = accumulate_pointwise(twice, 3);
  CHECK(f.registration_compress[0][0].strength == 3.0);
  CHECK(f.steadiness(0) == 3.0);
}

TEST_CASE("pointwise registrations conserve mass") {
  const auto e = random_embedding(3, 100, 4, 2);
  MetricConfig c;
  c.k_snn = 8;
  c.iterations = 20;
  const SpaceIndex h = build_space_index(e.original(), c);
  const SpaceIndex l = build_space_index(e.projected(), c);
  const auto dm = build_distortion_matrices(h, l);
  PointwiseAccumulator acc(e.size());
  std::int64_t expected = 0;
  std::vector<IterationResult> results;
  for (int it = 0; it < 20; ++it) {
    RngStream rng = derive_stream(c, it, Measure::cohesiveness);
    results.push_back(run_iteration(e, h, l, dm, Measure::cohesiveness, rng, c, it));
    for (const auto& r : results.back().records) {
      expected += 2 * static_cast<std::int64_t>(results.back().cluster(r.cluster_i).size() *
                                                results.back().cluster(r.cluster_j).size());
    }
    acc.add(results.back());
  }
  CHECK(acc.registrations(DistortionKind::stretch) == expected);
  CHECK(acc.registrations(DistortionKind::compress) == 0);
  const auto f = acc.finalize();
  for (Index i = 0; i < e.size(); ++i) {
    double total = 0.0;
    for (const auto& reg : f.registration_stretch[i]) total += reg.strength;
    CHECK(f.cohesiveness(i) == doctest::Approx(total));
  }
}

TEST_CASE("self-projection scores exactly one") {
  const auto base = random_embedding(4, 150, 6, 6);
  const auto e = make_paired_embedding(base.original(), base.original());
  MetricConfig c;
  c.k_snn = 12;
  c.iterations = 40;
  const auto r = compute_snc(e, c);
  CHECK(r.scores.steadiness == 1.0);
  CHECK(r.scores.cohesiveness == 1.0);
  CHECK(r.field.steadiness.isZero());
  CHECK(r.field.cohesiveness.isZero());
  CHECK(r.diagnostics.records_per_iteration_steadiness.size() == 40);
}

TEST_CASE("scores lie in [0, 1] under every configuration") {
  const auto e = random_embedding(5, 120, 5, 2);
  for (const char* alg : {"hdbscan", "kmeans:20", "xmeans"}) {
    for (auto dist : {DistanceChoice::snn, DistanceChoice::euclidean}) {
      for (auto ex : {ExtractionChoice::probabilistic, ExtractionChoice::deterministic}) {
        MetricConfig c;
        c.k_snn = 10;
        c.iterations = 15;
        c.clustering = parse_clustering(alg);
        c.distance = dist;
        c.extraction = ex;
        const auto r = compute_snc(e, c);
        CHECK(r.scores.steadiness >= 0.0);
        CHECK(r.scores.steadiness <= 1.0);
        CHECK(r.scores.cohesiveness >= 0.0);
        CHECK(r.scores.cohesiveness <= 1.0);
      }
    }
  }
}

TEST_CASE("swapping spaces and streams exchanges the scores exactly") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto e = random_embedding(10 + seed, 100, 4, 2);
    MetricConfig c;
    c.k_snn = 9;
    c.iterations = 25;
    c.seed = seed;
    const auto a = compute_snc(e, c);
    MetricConfig m = c;
    m.swap_streams = true;
    const auto b = compute_snc(e.swapped(), m);
    CHECK(a.scores.steadiness == b.scores.cohesiveness);
    CHECK(a.scores.cohesiveness == b.scores.steadiness);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const auto e = random_embedding(6, 150, 5, 2);
  MetricConfig c;
  c.k_snn = 10;
  c.iterations = 30;
  setenv("SNC_THREADS", "1", 1);
  const auto one = compute_snc(e, c);
  setenv("SNC_THREADS", "3", 1);
  const auto three = compute_snc(e, c);
  unsetenv("SNC_THREADS");
  CHECK(one.scores.steadiness == three.scores.steadiness);
  CHECK(one.scores.cohesiveness == three.scores.cohesiveness);
  CHECK(one.field.steadiness == three.field.steadiness);
  CHECK(one.field.registration_stretch == three.field.registration_stretch);
}

TEST_CASE("metric pipeline matches the oracles on small instances") {
  const auto results = oracle::check_metric_oracles(oracle::small_instances(20, 99), 1e-10);
  for (const auto& r : results) {
    INFO(r.name << " max error " << r.max_error);
    CHECK(r.ok);
    CHECK(r.comparisons > 0);
  }
}
