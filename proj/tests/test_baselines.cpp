#include <doctest.h>

#include "oracles/oracles.hpp"
#include "oracles/suite.hpp"
#include "snc/baselines.hpp"

#include <numeric>

using namespace snc;

namespace {

Matrix<double> line(const std::vector<double>& xs) {
  Matrix<double> m(static_cast<Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) m(static_cast<Index>(i), 0) = xs[i];
  return m;
}

}  // namespace

TEST_CASE("rank table rows are permutations") {
  RngStream rng(1, 0);
  const Matrix<double> x = oracle::random_matrix(rng, 30, 3);
  const RankTable t = build_rank_table(x);
  for (Index i = 0; i < 30; ++i) {
    std::vector<int> ranks;
    for (Index j = 0; j < 30; ++j) {
      if (j == i) {
        CHECK(t.rank(i, j) == 0);
        continue;
      }
      ranks.push_back(t.rank(i, j));
      CHECK(t.order(i, t.rank(i, j) - 1) == j);
    }
    std::sort(ranks.begin(), ranks.end());
    std::vector<int> expected(29);
    std::iota(expected.begin(), expected.end(), 1);
    CHECK(ranks == expected);
  }
}

TEST_CASE("self-projection reaches every maximum") {
  RngStream rng(2, 0);
  const Matrix<double> x = oracle::random_matrix(rng, 101, 4);
  const auto e = make_paired_embedding(x, x);
  for (int k : {1, 5, 10, 25}) {
    CHECK(trustworthiness(e, k) == 1.0);
    CHECK(continuity(e, k) == 1.0);
    CHECK(mrre_false(e, k) == 1.0);
    CHECK(mrre_missing(e, k) == 1.0);
    CHECK(mrre_false(e, k, MrreOrientation::error) == 0.0);
  }
  CHECK(lcmc(e, 10) == doctest::Approx(0.9));
}

TEST_CASE("four points with one swapped neighbor pair") {
  // Original order 0,1,2,3 on a line; the projection swaps 1 and 2.
  const Matrix<double> high = line({0.0, 1.0, 2.0, 3.0});
  const Matrix<double> low = line({0.0, 2.0, 1.0, 3.0});
  const auto e = make_paired_embedding(high, low);
  const double t = trustworthiness(e, 1);
  CHECK(t == oracle::trustworthiness(high, low, 1));
  CHECK(continuity(e, 1) == oracle::continuity(high, low, 1));
  CHECK(t < 1.0);
  // Projected nearest neighbors 2, 2, 0, 1 sit at original ranks 2, 2, 3, 2:
  // penalties 1 + 1 + 2 + 1 = 5. Normalizer 2/(4*1*(8-3-1)) = 1/8.
  CHECK(t == doctest::Approx(1.0 - 5.0 / 8.0));
  CHECK(mrre_false(e, 1) == oracle::mrre_false(high, low, 1));
  CHECK(mrre_missing(e, 1) == oracle::mrre_missing(high, low, 1));
  CHECK(lcmc(e, 1) == oracle::lcmc(high, low, 1));
}

TEST_CASE("range preconditions") {
  RngStream rng(3, 0);
  const auto e = make_paired_embedding(oracle::random_matrix(rng, 10, 3), oracle::random_matrix(rng, 10, 2));
  CHECK_NOTHROW(trustworthiness(e, 4));
  CHECK_THROWS_AS(trustworthiness(e, 5), ConfigError);
  CHECK_THROWS_AS(continuity(e, 5), ConfigError);
  CHECK_THROWS_AS(trustworthiness(e, 0), ConfigError);
  CHECK_NOTHROW(mrre_false(e, 9));
  CHECK_THROWS_AS(mrre_false(e, 10), ConfigError);
  CHECK_THROWS_AS(mrre_missing(e, 10), ConfigError);
  CHECK_THROWS_AS(lcmc(e, 10), ConfigError);
}

TEST_CASE("LCMC with disjoint neighborhoods") {
  // Original pairs (0,1),(2,3),(4,5); projected pairs (0,2),(1,4),(3,5).
  const Matrix<double> high = line({0.0, 0.1, 10.0, 10.1, 20.0, 20.1});
  const Matrix<double> low = line({0.0, 10.0, 0.1, 20.0, 10.1, 20.1});
  const double v = lcmc(make_paired_embedding(high, low), 1);
  CHECK(v == doctest::Approx(-1.0 / 5.0));
  CHECK(v == oracle::lcmc(high, low, 1));
}

TEST_CASE("baselines match exhaustive rank oracles for N <= 12, k <= 3") {
  const auto r = oracle::check_baseline_oracles(oracle::small_instances(60, 17));
  INFO("max error " << r.max_error);
  CHECK(r.ok);
  CHECK(r.comparisons > 500);
}

TEST_CASE("baselines are invariant under relabeling") {
  RngStream rng(4, 0);
  const Matrix<double> high = oracle::random_matrix(rng, 60, 5);
  const Matrix<double> low = oracle::random_matrix(rng, 60, 2);
  std::vector<int> perm(60);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = 59; i > 0; --i) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(60);
  for (int i = 0; i < 60; ++i) p.indices()(i) = perm[i];
  const auto a = local_scores(build_rank_table(high), build_rank_table(low), 7);
  const auto b = local_scores(build_rank_table(p * high), build_rank_table(p * low), 7);
  CHECK(a.trustworthiness == doctest::Approx(b.trustworthiness).epsilon(1e-14));
  CHECK(a.continuity == doctest::Approx(b.continuity).epsilon(1e-14));
  CHECK(a.mrre_false == doctest::Approx(b.mrre_false).epsilon(1e-14));
  CHECK(a.mrre_missing == doctest::Approx(b.mrre_missing).epsilon(1e-14));
  CHECK(a.lcmc == doctest::Approx(b.lcmc).epsilon(1e-14));
}
