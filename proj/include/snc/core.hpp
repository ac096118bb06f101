#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace snc {

using Index = Eigen::Index;
using PointId = std::int32_t;

/// Sorted, duplicate-free list of point ids.
using IdSet = std::vector<PointId>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Malformed input data (files, coordinate matrices).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or precondition violation on arguments.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The two coordinate systems of a projection.
enum class Space { original, projected };

constexpr Space opposite(Space s) noexcept {
  return s == Space::original ? Space::projected : Space::original;
}

std::string_view to_string(Space s) noexcept;

/// A dataset together with its projection. Rows are points.
///
/// The coordinate matrices are immutable once built through
/// `make_paired_embedding`, which enforces N >= 2, D >= d >= 1 and finite
/// coordinates. Labels are carried for display only.
class PairedEmbedding {
 public:
  PairedEmbedding() = default;

  Index size() const noexcept { return original_.rows(); }
  Index original_dim() const noexcept { return original_.cols(); }
  Index projected_dim() const noexcept { return projected_.cols(); }

  const Matrix<double>& original() const noexcept { return original_; }
  const Matrix<double>& projected() const noexcept { return projected_; }
  const Matrix<double>& coords(Space s) const noexcept {
    return s == Space::original ? original_ : projected_;
  }
  const std::optional<std::vector<int>>& labels() const noexcept { return labels_; }

  /// Exchanges the two spaces. The result may have D < d; it exists for
  /// mirror analyses and is not subject to the dimension-reduction check.
  PairedEmbedding swapped() const;

  friend PairedEmbedding make_paired_embedding(Matrix<double>, Matrix<double>,
                                               std::optional<std::vector<int>>);

 private:
  Matrix<double> original_;
  Matrix<double> projected_;
  std::optional<std::vector<int>> labels_;
};

/// Validates and wraps a pair of coordinate matrices. Throws InputError.
PairedEmbedding make_paired_embedding(Matrix<double> original, Matrix<double> projected,
                                      std::optional<std::vector<int>> labels = std::nullopt);

enum class ClusteringKind { hdbscan_snn, kmeans, xmeans };

struct ClusteringChoice {
  ClusteringKind kind = ClusteringKind::hdbscan_snn;
  int k = 20;  // kmeans only

  friend bool operator==(const ClusteringChoice&, const ClusteringChoice&) = default;
};

enum class DistanceChoice { snn, euclidean };
enum class ExtractionChoice { probabilistic, deterministic };

/// Parses "hdbscan", "kmeans:K" or "xmeans".
ClusteringChoice parse_clustering(std::string_view text);
DistanceChoice parse_distance(std::string_view text);
ExtractionChoice parse_extraction(std::string_view text);

std::string to_string(const ClusteringChoice& c);
std::string_view to_string(DistanceChoice d) noexcept;
std::string_view to_string(ExtractionChoice e) noexcept;

struct MetricConfig {
  int k_snn = 100;
  int iterations = 500;
  double alpha = 0.1;
  double walk_ratio = 0.4;
  std::uint64_t seed = 0;
  ClusteringChoice clustering{};
  DistanceChoice distance = DistanceChoice::snn;
  ExtractionChoice extraction = ExtractionChoice::probabilistic;

  // Whether pairs whose distortion has the other sign (mu = 0) still enter
  // the weighted averages.
  bool include_zero_sign_pairs = true;
  // Exchanges the Steadiness and Cohesiveness random streams.
  bool swap_streams = false;
  // Pointwise registration is only needed for the reliability map.
  bool collect_pointwise = true;

  int hdbscan_min_cluster_size = 5;
  int hdbscan_min_samples = 5;

  /// Throws ConfigError unless the config is usable on n points.
  void validate(Index n) const;

  friend bool operator==(const MetricConfig&, const MetricConfig&) = default;
};

}  // namespace snc
