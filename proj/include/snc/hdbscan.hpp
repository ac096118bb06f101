#pragma once

#include "snc/core.hpp"

#include <vector>

namespace snc {

struct HdbscanParams {
  int min_cluster_size = 5;
  // Counts the point itself, so the core distance is the distance to the
  // (min_samples - 1)-th nearest other point.
  int min_samples = 5;
};

/// HDBSCAN over a symmetric precomputed distance matrix (the diagonal is
/// ignored). Clusters are chosen by excess of mass; the root is never
/// selected. Returns one label per row, -1 for noise; cluster labels are
/// 0..K-1 in order of first appearance by point index.
std::vector<int> hdbscan_labels(const Eigen::Ref<const Matrix<double>>& distances,
                                const HdbscanParams& params);

}  // namespace snc
