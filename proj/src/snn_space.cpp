#include "snc/snn_space.hpp"

namespace snc {

double snn_similarity(std::span<const PointId> a, std::span<const PointId> b) {
  const auto k = static_cast<double>(a.size());
  double sim = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    for (std::size_t n = 0; n < b.size(); ++n) {
      if (a[m] == b[n]) {
        sim += (k - static_cast<double>(m)) * (k - static_cast<double>(n));
      }
    }
  }
  return sim;
}

Matrix<double> snn_similarity_table(const NeighborLists& knn) {
  const Index n = knn.rows();
  const Index k = knn.cols();

  // Inverted lists: for each point x, every (p, weight) with x in p's list.
  struct Entry {
    PointId point;
    double weight;
  };
  std::vector<std::vector<Entry>> inverted(static_cast<std::size_t>(n));
  for (Index p = 0; p < n; ++p) {
    for (Index r = 0; r < k; ++r) {
      inverted[static_cast<std::size_t>(knn(p, r))].push_back(
          {static_cast<PointId>(p), static_cast<double>(k - r)});
    }
  }

  Matrix<double> sim = Matrix<double>::Zero(n, n);
  // Column p only receives contributions from p's own list, so columns are
  // independent. All terms are small integers, so the sums are exact.
  parallel_for(n, [&](std::ptrdiff_t p) {
    auto column = sim.col(p);
    for (Index r = 0; r < k; ++r) {
      const double wp = static_cast<double>(k - r);
      for (const Entry& e : inverted[static_cast<std::size_t>(knn(p, r))]) {
        column(e.point) += wp * e.weight;
      }
    }
  });
  return sim;
}

SpaceIndex build_space_index(const Matrix<double>& coords, const MetricConfig& config) {
  config.validate(coords.rows());
  SpaceIndex index;
  index.distance = config.distance;
  index.alpha = config.alpha;
  index.knn = build_knn(coords, config.k_snn);

  Matrix<double> raw = snn_similarity_table(index.knn);
  index.max_sim = raw.maxCoeff();
  index.snn_sim = raw / index.max_sim;

  Matrix<double> dist;
  if (config.distance == DistanceChoice::snn) {
    const double alpha = config.alpha;
    dist = index.snn_sim.unaryExpr([alpha](double s) { return point_distance(s, alpha); });
  } else {
    dist = pairwise_distances(coords);
  }
  const double scale = dist.maxCoeff();
  index.dist_scale = scale > 0.0 ? scale : 1.0;
  index.dist_matrix = dist / index.dist_scale;
  return index;
}

DistortionMatrices build_distortion_matrices(const SpaceIndex& high, const SpaceIndex& low) {
  if (high.dist_matrix.rows() != low.dist_matrix.rows()) {
    throw ConfigError("distortion matrices need indices over the same points (" +
                      std::to_string(high.dist_matrix.rows()) + " vs " +
                      std::to_string(low.dist_matrix.rows()) + ")");
  }
  DistortionMatrices dm;
  dm.d_plus = (high.dist_matrix - low.dist_matrix).cwiseMax(0.0);
  dm.d_minus = (low.dist_matrix - high.dist_matrix).cwiseMax(0.0);
  dm.min_plus = dm.d_plus.minCoeff();
  dm.max_plus = dm.d_plus.maxCoeff();
  dm.min_minus = dm.d_minus.minCoeff();
  dm.max_minus = dm.d_minus.maxCoeff();
  return dm;
}

}  // namespace snc
