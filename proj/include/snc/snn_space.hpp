#pragma once

#include "snc/core.hpp"
#include "snc/parallel.hpp"

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

namespace snc {

/// Row i holds the ids of point i's k nearest neighbors, nearest first.
using NeighborLists = Eigen::Matrix<PointId, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Exact Euclidean kNN. Ties in distance go to the lower id. The point itself
/// is never its own neighbor.
template <typename Derived>
NeighborLists build_knn(const Eigen::MatrixBase<Derived>& coords, Index k) {
  const Index n = coords.rows();
  if (k < 1 || k >= n) {
    throw ConfigError("kNN size must satisfy 1 <= k < N (k=" + std::to_string(k) +
                      ", N=" + std::to_string(n) + ")");
  }
  // Points as columns so each distance reads two contiguous vectors.
  const Matrix<double> points = coords.transpose().template cast<double>();
  NeighborLists knn(n, k);
  parallel_for(n, [&](std::ptrdiff_t i) {
    std::vector<std::pair<double, PointId>> candidates;
    candidates.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      candidates.emplace_back((points.col(i) - points.col(j)).squaredNorm(),
                              static_cast<PointId>(j));
    }
    std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end());
    for (Index r = 0; r < k; ++r) knn(i, r) = candidates[static_cast<std::size_t>(r)].second;
  });
  return knn;
}

/// Dense matrix of pairwise Euclidean distances between rows.
template <typename Derived>
Matrix<double> pairwise_distances(const Eigen::MatrixBase<Derived>& coords) {
  const Index n = coords.rows();
  const Matrix<double> points = coords.transpose().template cast<double>();
  Matrix<double> dist = Matrix<double>::Zero(n, n);
  parallel_for(n, [&](std::ptrdiff_t j) {
    for (Index i = 0; i < j; ++i) dist(i, j) = (points.col(i) - points.col(j)).norm();
  });
  dist.template triangularView<Eigen::StrictlyLower>() = dist.transpose();
  return dist;
}

/// Shared-nearest-neighbor similarity of two kNN lists of equal length k:
/// the sum of (k + 1 - m)(k + 1 - n) over shared entries at 1-based ranks
/// m and n.
double snn_similarity(std::span<const PointId> a, std::span<const PointId> b);

/// Reciprocal transform 1 / (sim + alpha) of a normalized similarity.
inline double point_distance(double sim_normalized, double alpha) {
  return 1.0 / (sim_normalized + alpha);
}

/// Raw (unnormalized) SNN similarity for every pair, from kNN lists.
Matrix<double> snn_similarity_table(const NeighborLists& knn);

/// Per-space structures used by every later stage.
struct SpaceIndex {
  NeighborLists knn;
  Matrix<double> snn_sim;       // normalized to [0, 1] by max_sim
  double max_sim = 0.0;         // raw maximum, equal to the self-similarity
  Matrix<double> dist_matrix;   // dist / dist_scale, maximum entry 1
  double dist_scale = 1.0;      // maximum of the unnormalized distance matrix
  DistanceChoice distance = DistanceChoice::snn;
  double alpha = 0.1;

  Index size() const noexcept { return knn.rows(); }
  Index k() const noexcept { return knn.cols(); }
};

/// kNN -> SNN similarity -> point distance -> division by the matrix max.
/// Under DistanceChoice::euclidean the distance matrix is the pairwise
/// Euclidean matrix divided by its max; the SNN table is still built since
/// cluster extraction draws on it.
SpaceIndex build_space_index(const Matrix<double>& coords, const MetricConfig& config);

/// Compression (d_plus) and stretching (d_minus) parts of H - L.
struct DistortionMatrices {
  Matrix<double> d_plus;
  Matrix<double> d_minus;
  double min_plus = 0.0;
  double max_plus = 0.0;
  double min_minus = 0.0;
  double max_minus = 0.0;
};

/// Extrema are taken over all N^2 entries, zeros included.
DistortionMatrices build_distortion_matrices(const SpaceIndex& high, const SpaceIndex& low);

}  // namespace snc
