#pragma once

#include "snc/core.hpp"
#include "snc/rng.hpp"

#include <vector>

namespace snc {

struct KmeansResult {
  std::vector<int> labels;  // 0..K-1, every label non-empty
  Matrix<double> centers;   // K x dim
  double inertia = 0.0;     // within-cluster sum of squares
};

/// Lloyd's algorithm with k-means++ seeding drawn from `rng`. Rows of
/// `points` are observations. K is capped at the number of points; clusters
/// that empty out during iteration are dropped.
KmeansResult kmeans(const Matrix<double>& points, int k, RngStream& rng, int max_iterations = 100);

/// X-Means: starts from k_min centers and splits clusters while the local
/// BIC improves, up to k_max clusters.
KmeansResult xmeans(const Matrix<double>& points, int k_min, int k_max, RngStream& rng);

/// Bayesian information criterion of a spherical-Gaussian clustering.
double kmeans_bic(const Matrix<double>& points, const KmeansResult& clustering);

}  // namespace snc
