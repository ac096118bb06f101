#include "snc/kmeans.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace snc {
namespace {

// Squared distances between every row of `points` and every row of `centers`.
Matrix<double> squared_distances(const Matrix<double>& points, const Matrix<double>& centers) {
  const Vector<double> pn = points.rowwise().squaredNorm();
  const Vector<double> cn = centers.rowwise().squaredNorm();
  Matrix<double> d = -2.0 * (points * centers.transpose());
  d.colwise() += pn;
  d.rowwise() += cn.transpose();
  return d.cwiseMax(0.0);
}

Matrix<double> plus_plus_seeds(const Matrix<double>& points, int k, RngStream& rng) {
  const Index n = points.rows();
  Matrix<double> centers(k, points.cols());
  centers.row(0) = points.row(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n))));
  Vector<double> nearest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Index pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double running = 0.0;
      for (Index i = 0; i < n; ++i) {
        running += nearest(i);
        if (running > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = points.row(pick);
    nearest = nearest.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

KmeansResult lloyd(const Matrix<double>& points, Matrix<double> centers, int max_iterations) {
  const Index n = points.rows();
  const Index k = centers.rows();
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iterations; ++it) {
    const Matrix<double> d = squared_distances(points, centers);
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      d.row(i).minCoeff(&best);
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed) break;
    Matrix<double> sums = Matrix<double>::Zero(k, points.cols());
    Vector<double> counts = Vector<double>::Zero(k);
    for (Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
      counts(labels[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (Index c = 0; c < k; ++c) {
      if (counts(c) > 0.0) centers.row(c) = sums.row(c) / counts(c);
    }
  }

  // Compact away empty clusters.
  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  int used = 0;
  for (int label : labels) {
    if (remap[static_cast<std::size_t>(label)] < 0) remap[static_cast<std::size_t>(label)] = used++;
  }
  KmeansResult result;
  result.centers = Matrix<double>::Zero(used, points.cols());
  Vector<double> counts = Vector<double>::Zero(used);
  result.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const int label = remap[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    result.labels[static_cast<std::size_t>(i)] = label;
    result.centers.row(label) += points.row(i);
    counts(label) += 1.0;
  }
  for (int c = 0; c < used; ++c) result.centers.row(c) /= counts(c);
  for (Index i = 0; i < n; ++i) {
    result.inertia += (points.row(i) - result.centers.row(result.labels[static_cast<std::size_t>(i)]))
                          .squaredNorm();
  }
  return result;
}

}  // namespace

KmeansResult kmeans(const Matrix<double>& points, int k, RngStream& rng, int max_iterations) {
  if (points.rows() == 0) throw ConfigError("kmeans on an empty point set");
  if (k < 1) throw ConfigError("kmeans requires K >= 1");
  const int capped = static_cast<int>(std::min<Index>(k, points.rows()));
  return lloyd(points, plus_plus_seeds(points, capped, rng), max_iterations);
}

double kmeans_bic(const Matrix<double>& points, const KmeansResult& clustering) {
  const double r = static_cast<double>(points.rows());
  const double m = static_cast<double>(points.cols());
  const double k = static_cast<double>(clustering.centers.rows());
  double variance = r > k ? clustering.inertia / (r - k) : 0.0;
  variance = std::max(variance, std::numeric_limits<double>::min());

  Vector<double> sizes = Vector<double>::Zero(clustering.centers.rows());
  for (int label : clustering.labels) sizes(label) += 1.0;
  double log_likelihood = 0.0;
  for (Index c = 0; c < sizes.size(); ++c) {
    const double rc = sizes(c);
    log_likelihood += rc * std::log(rc) - rc * std::log(r) -
                      rc / 2.0 * std::log(2.0 * std::numbers::pi) - rc * m / 2.0 * std::log(variance) -
                      (rc - k) / 2.0;
  }
  const double params = (k - 1.0) + m * k + 1.0;
  return log_likelihood - params / 2.0 * std::log(r);
}

KmeansResult xmeans(const Matrix<double>& points, int k_min, int k_max, RngStream& rng) {
  if (k_min < 1 || k_max < k_min) throw ConfigError("xmeans requires 1 <= k_min <= k_max");
  KmeansResult current = kmeans(points, k_min, rng);
  while (current.centers.rows() < k_max) {
    std::vector<Vector<double>> next_centers;
    bool split_any = false;
    const Index k = current.centers.rows();
    for (Index c = 0; c < k; ++c) {
      std::vector<Index> members;
      for (std::size_t i = 0; i < current.labels.size(); ++i) {
        if (current.labels[i] == c) members.push_back(static_cast<Index>(i));
      }
      const Index remaining_slots = k_max - static_cast<Index>(next_centers.size()) - (k - c);
      if (members.size() >= 2 && remaining_slots >= 1) {
        const Matrix<double> sub = points(members, Eigen::placeholders::all);
        KmeansResult parent;
        parent.labels.assign(members.size(), 0);
        parent.centers = sub.colwise().mean();
        parent.inertia = (sub.rowwise() - parent.centers.row(0)).squaredNorm();
        KmeansResult children = kmeans(sub, 2, rng);
        if (children.centers.rows() == 2 && kmeans_bic(sub, children) > kmeans_bic(sub, parent)) {
          next_centers.emplace_back(children.centers.row(0).transpose());
          next_centers.emplace_back(children.centers.row(1).transpose());
          split_any = true;
          continue;
        }
      }
      next_centers.emplace_back(current.centers.row(c).transpose());
    }
    if (!split_any) break;
    Matrix<double> seeds(static_cast<Index>(next_centers.size()), points.cols());
    for (std::size_t c = 0; c < next_centers.size(); ++c) seeds.row(static_cast<Index>(c)) = next_centers[c];
    current = lloyd(points, std::move(seeds), 100);
  }
  return current;
}

}  // namespace snc
