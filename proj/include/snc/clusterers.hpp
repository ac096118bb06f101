#pragma once

#include "snc/core.hpp"
#include "snc/rng.hpp"
#include "snc/snn_space.hpp"

#include <vector>

namespace snc {

struct ExtractedCluster {
  IdSet members;  // sorted, contains seed
  PointId seed = 0;
  Space source = Space::projected;
};

struct ClusterPartition {
  std::vector<IdSet> clusters;  // disjoint, non-empty, each sorted
  Space target = Space::original;
};

/// Random cluster grown from `seed` over the kNN graph of the source space.
///
/// Breadth-first: each dequeued point offers its kNN to the cluster, each
/// neighbor admitted with probability sim/max_sim (always, in deterministic
/// mode). Admitted points are enqueued again even if already members. The
/// walk stops after ceil(walk_ratio * N) dequeues or when the queue drains.
ExtractedCluster extract_cluster(const SpaceIndex& index, PointId seed, RngStream& rng,
                                 const MetricConfig& config, Space source);

/// Splits `members` by clustering them in the opposite space. HDBSCAN runs
/// on the restriction of that space's distance matrix, with noise points
/// returned as singleton clusters; K-Means and X-Means run on the raw
/// coordinates. Clusters are ordered by their smallest member.
ClusterPartition cluster_in_opposite_space(const IdSet& members, const SpaceIndex& opposite,
                                           const Matrix<double>& coords_opposite,
                                           const MetricConfig& config, RngStream& rng,
                                           Space target);

/// Average-linkage similarity: mean normalized SNN similarity over A x B.
double cluster_similarity(const IdSet& a, const IdSet& b, const SpaceIndex& index);

/// Cluster distance before division by the space's distance scale:
/// 1/(sim(A,B) + alpha) under SNN, centroid distance under Euclidean.
double cluster_pair_distance_raw(const IdSet& a, const IdSet& b, const SpaceIndex& index,
                                 DistanceChoice distance, const Matrix<double>& coords);

/// Cluster distance in the units of `index.dist_matrix`. For singletons this
/// reproduces the matrix entry exactly.
double cluster_pair_distance(const IdSet& a, const IdSet& b, const SpaceIndex& index,
                             DistanceChoice distance, const Matrix<double>& coords);

}  // namespace snc
