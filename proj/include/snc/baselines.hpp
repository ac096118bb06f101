#pragma once

#include "snc/core.hpp"

#include <cstdint>

namespace snc {

/// Full neighbor ranking of every point in one space. Distances are
/// Euclidean; ties go to the lower id.
struct RankTable {
  // Row i: the other N-1 ids, nearest first.
  Eigen::Matrix<PointId, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> order;
  // rank(i, j): 1-based position of j in row i of `order`; rank(i, i) = 0.
  Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rank;

  Index size() const noexcept { return rank.rows(); }
};

RankTable build_rank_table(const Matrix<double>& coords);

/// Whether MRRE is reported as a quality (1 - error, higher is better) or as
/// the raw normalized error.
enum class MrreOrientation { quality, error };

// Trustworthiness and Continuity (Venna & Kaski). Require 1 <= k < N/2.
double trustworthiness(const RankTable& high, const RankTable& low, int k);
double continuity(const RankTable& high, const RankTable& low, int k);

// Mean relative rank errors (Lee & Verleysen), normalized by
// N * sum_{r=1..k} |N - 2r + 1| / r. The False variant sums over each point's
// projected kNN, the Missing variant over its original kNN. Require 1 <= k < N.
double mrre_false(const RankTable& high, const RankTable& low, int k,
                  MrreOrientation orientation = MrreOrientation::quality);
double mrre_missing(const RankTable& high, const RankTable& low, int k,
                    MrreOrientation orientation = MrreOrientation::quality);

/// Local continuity meta-criterion (Chen & Buja). Requires 1 <= k < N.
double lcmc(const RankTable& high, const RankTable& low, int k);

struct LocalScores {
  double trustworthiness = 0.0;
  double continuity = 0.0;
  double mrre_missing = 0.0;
  double mrre_false = 0.0;
  double lcmc = 0.0;
};

/// All five at one k (T&C need k < N/2).
LocalScores local_scores(const RankTable& high, const RankTable& low, int k);

// Convenience overloads building the rank tables from an embedding.
double trustworthiness(const PairedEmbedding& e, int k);
double continuity(const PairedEmbedding& e, int k);
double mrre_false(const PairedEmbedding& e, int k, MrreOrientation o = MrreOrientation::quality);
double mrre_missing(const PairedEmbedding& e, int k, MrreOrientation o = MrreOrientation::quality);
double lcmc(const PairedEmbedding& e, int k);

}  // namespace snc
