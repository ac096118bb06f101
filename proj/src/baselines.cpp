#include "snc/baselines.hpp"

#include "snc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace snc {
namespace {

void check_tables(const RankTable& high, const RankTable& low) {
  if (high.size() != low.size()) throw ConfigError("rank tables cover different point counts");
}

void check_half_range(Index n, int k) {
  if (k < 1 || 2 * static_cast<Index>(k) >= n) {
    throw ConfigError("k must satisfy 1 <= k < N/2 (k=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");
  }
}

void check_range(Index n, int k) {
  if (k < 1 || k >= n) {
    throw ConfigError("k must satisfy 1 <= k < N (k=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");
  }
}

// Sum over i of sum over j in the k-neighborhood of `nbhd` with rank in
// `other` above k, of (rank_other - k). Exact in 64-bit integers.
std::int64_t intrusion_sum(const RankTable& nbhd, const RankTable& other, int k) {
  std::int64_t total = 0;
  for (Index i = 0; i < nbhd.size(); ++i) {
    for (int r = 0; r < k; ++r) {
      const PointId j = nbhd.order(i, r);
      const std::int32_t ro = other.rank(i, j);
      if (ro > k) total += ro - k;
    }
  }
  return total;
}

double mrre_normalizer(Index n, int k) {
  double h = 0.0;
  for (int r = 1; r <= k; ++r) h += std::abs(static_cast<double>(n) - 2.0 * r + 1.0) / r;
  return static_cast<double>(n) * h;
}

// Sum over the k-neighborhood of `nbhd`, visited in rank order, of
// |rank_nbhd - rank_other| / rank_nbhd.
double relative_rank_error(const RankTable& nbhd, const RankTable& other, int k) {
  double total = 0.0;
  for (Index i = 0; i < nbhd.size(); ++i) {
    double row = 0.0;
    for (int r = 1; r <= k; ++r) {
      const PointId j = nbhd.order(i, r - 1);
      row += std::abs(static_cast<double>(r) - other.rank(i, j)) / r;
    }
    total += row;
  }
  return total;
}

double t_or_c(const RankTable& nbhd, const RankTable& other, int k) {
  const double n = static_cast<double>(nbhd.size());
  const double kd = k;
  const double scale = 2.0 / (n * kd * (2.0 * n - 3.0 * kd - 1.0));
  return 1.0 - scale * static_cast<double>(intrusion_sum(nbhd, other, k));
}

}  // namespace

RankTable build_rank_table(const Matrix<double>& coords) {
  const Index n = coords.rows();
  const Matrix<double> points = coords.transpose();
  RankTable table;
  table.order.resize(n, n - 1);
  table.rank.resize(n, n);
  parallel_for(n, [&](std::ptrdiff_t i) {
    std::vector<std::pair<double, PointId>> row;
    row.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j) {
      if (j != i) row.emplace_back((points.col(i) - points.col(j)).squaredNorm(), static_cast<PointId>(j));
    }
    std::sort(row.begin(), row.end());
    table.rank(i, i) = 0;
    for (Index r = 0; r < n - 1; ++r) {
      const PointId j = row[static_cast<std::size_t>(r)].second;
      table.order(i, r) = j;
      table.rank(i, j) = static_cast<std::int32_t>(r + 1);
    }
  });
  return table;
}

double trustworthiness(const RankTable& high, const RankTable& low, int k) {
  check_tables(high, low);
  check_half_range(high.size(), k);
  // False neighbors: projected kNN members ranked beyond k in the original.
  return t_or_c(low, high, k);
}

double continuity(const RankTable& high, const RankTable& low, int k) {
  check_tables(high, low);
  check_half_range(high.size(), k);
  return t_or_c(high, low, k);
}

double mrre_false(const RankTable& high, const RankTable& low, int k, MrreOrientation orientation) {
  check_tables(high, low);
  check_range(high.size(), k);
  const double error = relative_rank_error(low, high, k) / mrre_normalizer(high.size(), k);
  return orientation == MrreOrientation::quality ? 1.0 - error : error;
}

double mrre_missing(const RankTable& high, const RankTable& low, int k, MrreOrientation orientation) {
  check_tables(high, low);
  check_range(high.size(), k);
  const double error = relative_rank_error(high, low, k) / mrre_normalizer(high.size(), k);
  return orientation == MrreOrientation::quality ? 1.0 - error : error;
}

double lcmc(const RankTable& high, const RankTable& low, int k) {
  check_tables(high, low);
  check_range(high.size(), k);
  const Index n = high.size();
  std::int64_t overlap = 0;
  for (Index i = 0; i < n; ++i) {
    for (int r = 0; r < k; ++r) {
      if (low.rank(i, high.order(i, r)) <= k) ++overlap;
    }
  }
  const double nd = static_cast<double>(n);
  return static_cast<double>(overlap) / (nd * k) - k / (nd - 1.0);
}

LocalScores local_scores(const RankTable& high, const RankTable& low, int k) {
  LocalScores s;
  s.trustworthiness = trustworthiness(high, low, k);
  s.continuity = continuity(high, low, k);
  s.mrre_missing = mrre_missing(high, low, k);
  s.mrre_false = mrre_false(high, low, k);
  s.lcmc = lcmc(high, low, k);
  return s;
}

double trustworthiness(const PairedEmbedding& e, int k) {
  return trustworthiness(build_rank_table(e.original()), build_rank_table(e.projected()), k);
}
double continuity(const PairedEmbedding& e, int k) {
  return continuity(build_rank_table(e.original()), build_rank_table(e.projected()), k);
}
double mrre_false(const PairedEmbedding& e, int k, MrreOrientation o) {
  return mrre_false(build_rank_table(e.original()), build_rank_table(e.projected()), k, o);
}
double mrre_missing(const PairedEmbedding& e, int k, MrreOrientation o) {
  return mrre_missing(build_rank_table(e.original()), build_rank_table(e.projected()), k, o);
}
double lcmc(const PairedEmbedding& e, int k) {
  return lcmc(build_rank_table(e.original()), build_rank_table(e.projected()), k);
}

}  // namespace snc
