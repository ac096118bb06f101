#include "snc/clusterers.hpp"

#include "snc/hdbscan.hpp"
#include "snc/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace snc {
namespace {

void check_pair(const IdSet& a, const IdSet& b) {
  if (a.empty() || b.empty()) throw ConfigError("cluster distance needs non-empty clusters");
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) throw ConfigError("cluster distance needs disjoint clusters");
    if (*ia < *ib) {
      ++ia;
    } else {
      ++ib;
    }
  }
}

Vector<double> centroid(const IdSet& ids, const Matrix<double>& coords) {
  Vector<double> c = Vector<double>::Zero(coords.cols());
  for (PointId p : ids) c += coords.row(p).transpose();
  return c / static_cast<double>(ids.size());
}

}  // namespace

ExtractedCluster extract_cluster(const SpaceIndex& index, PointId seed, RngStream& rng,
                                 const MetricConfig& config, Space source) {
  const Index n = index.size();
  if (seed < 0 || seed >= n) {
    throw ConfigError("seed point " + std::to_string(seed) + " outside [0, " + std::to_string(n) + ")");
  }
  const auto budget = static_cast<Index>(std::ceil(config.walk_ratio * static_cast<double>(n) - 1e-9));
  const bool always = config.extraction == ExtractionChoice::deterministic;

  std::vector<char> member(static_cast<std::size_t>(n), 0);
  member[static_cast<std::size_t>(seed)] = 1;
  std::deque<PointId> queue{seed};
  Index dequeues = 0;
  while (!queue.empty() && dequeues < budget) {
    const PointId p = queue.front();
    queue.pop_front();
    ++dequeues;
    for (Index r = 0; r < index.k(); ++r) {
      const PointId x = index.knn(p, r);
      if (always || rng.uniform() < index.snn_sim(p, x)) {
        member[static_cast<std::size_t>(x)] = 1;
        queue.push_back(x);
      }
    }
  }

  ExtractedCluster cluster;
  cluster.seed = seed;
  cluster.source = source;
  for (Index i = 0; i < n; ++i) {
    if (member[static_cast<std::size_t>(i)]) cluster.members.push_back(static_cast<PointId>(i));
  }
  return cluster;
}

ClusterPartition cluster_in_opposite_space(const IdSet& members, const SpaceIndex& opposite,
                                           const Matrix<double>& coords_opposite,
                                           const MetricConfig& config, RngStream& rng,
                                           Space target) {
  if (members.empty()) throw ConfigError("cannot cluster an empty member set");
  ClusterPartition partition;
  partition.target = target;
  if (members.size() == 1) {
    partition.clusters.push_back(members);
    return partition;
  }

  std::vector<int> labels;
  switch (config.clustering.kind) {
    case ClusteringKind::hdbscan_snn: {
      const Matrix<double> sub = opposite.dist_matrix(members, members);
      labels = hdbscan_labels(sub, {config.hdbscan_min_cluster_size, config.hdbscan_min_samples});
      break;
    }
    case ClusteringKind::kmeans: {
      const Matrix<double> points = coords_opposite(members, Eigen::placeholders::all);
      labels = kmeans(points, config.clustering.k, rng).labels;
      break;
    }
    case ClusteringKind::xmeans: {
      const Matrix<double> points = coords_opposite(members, Eigen::placeholders::all);
      labels = xmeans(points, 2, 20, rng).labels;
      break;
    }
  }

  // Groups in order of first appearance; noise (-1) becomes singletons.
  std::vector<int> slot_of_label;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const int label = labels[i];
    if (label < 0) {
      partition.clusters.push_back({members[i]});
      continue;
    }
    if (static_cast<std::size_t>(label) >= slot_of_label.size()) {
      slot_of_label.resize(static_cast<std::size_t>(label) + 1, -1);
    }
    int& slot = slot_of_label[static_cast<std::size_t>(label)];
    if (slot < 0) {
      slot = static_cast<int>(partition.clusters.size());
      partition.clusters.emplace_back();
    }
    partition.clusters[static_cast<std::size_t>(slot)].push_back(members[i]);
  }
  return partition;
}

double cluster_similarity(const IdSet& a, const IdSet& b, const SpaceIndex& index) {
  check_pair(a, b);
  double sum = 0.0;
  for (PointId q : b) {
    for (PointId p : a) sum += index.snn_sim(p, q);
  }
  return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double cluster_pair_distance_raw(const IdSet& a, const IdSet& b, const SpaceIndex& index,
                                 DistanceChoice distance, const Matrix<double>& coords) {
  if (distance == DistanceChoice::snn) {
    return point_distance(cluster_similarity(a, b, index), index.alpha);
  }
  check_pair(a, b);
  return (centroid(a, coords) - centroid(b, coords)).norm();
}

double cluster_pair_distance(const IdSet& a, const IdSet& b, const SpaceIndex& index,
                             DistanceChoice distance, const Matrix<double>& coords) {
  return cluster_pair_distance_raw(a, b, index, distance, coords) / index.dist_scale;
}

}  // namespace snc
