#pragma once

#include "snc/core.hpp"
#include "snc/experiments.hpp"
#include "snc/metrics.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace snc {

/// Comma-separated decimal floats, one point per row. Blank lines are
/// skipped. Errors name the file and the 1-based data row.
Matrix<double> load_matrix_csv(const std::filesystem::path& path, bool header = false);

/// One integer per line.
std::vector<int> load_labels_csv(const std::filesystem::path& path, bool header = false);

PairedEmbedding load_paired_embedding(const std::filesystem::path& original_path,
                                      const std::filesystem::path& projected_path,
                                      bool header = false,
                                      const std::optional<std::filesystem::path>& labels_path = std::nullopt);

void write_matrix_csv(const std::filesystem::path& path, const Matrix<double>& m);

nlohmann::json config_to_json(const MetricConfig& config);
MetricConfig config_from_json(const nlohmann::json& j);

/// {steadiness, cohesiveness, diagnostics{...}, config{...}}. Contains no
/// wall-clock values, so identical runs serialize identically.
nlohmann::json scores_to_json(const SncResult& result, const MetricConfig& config);

struct MapPoint {
  PointId id = 0;
  double x = 0.0;
  double y = 0.0;
  std::optional<int> label;
  double steadiness_distortion = 0.0;
  double cohesiveness_distortion = 0.0;

  friend bool operator==(const MapPoint&, const MapPoint&) = default;
};

/// Edge of the projection kNN graph. The *_raw values are sums of the
/// endpoint distortions; the plain values are min-max normalized across
/// edges for color mapping.
struct MapEdge {
  PointId p = 0;
  PointId q = 0;
  double false_groups_value = 0.0;
  double missing_groups_value = 0.0;
  double false_groups_raw = 0.0;
  double missing_groups_raw = 0.0;

  friend bool operator==(const MapEdge&, const MapEdge&) = default;
};

/// Wire format of the reliability map viewer (map.json).
struct ReliabilityMapDocument {
  std::string schema_version = "1";
  int k_map = 9;
  std::vector<MapPoint> points;
  std::vector<MapEdge> edges;
  // Per-point registered partners on the Missing Groups channel; drives
  // the lasso selection in the viewer.
  std::vector<std::vector<Registration>> registration;
  double steadiness = 1.0;
  double cohesiveness = 1.0;
  MetricConfig config;

  friend bool operator==(const ReliabilityMapDocument&, const ReliabilityMapDocument&) = default;
};

/// Registrations at or below this strength are left out of the document.
inline constexpr double kRegistrationFloor = 1e-9;

/// Builds the map over the first two projected coordinates. Throws
/// ConfigError unless 1 <= k_map < N.
ReliabilityMapDocument export_reliability_map(const PairedEmbedding& embedding,
                                              const PointwiseDistortionField& field,
                                              const MetricScores& scores, const MetricConfig& config,
                                              int k_map = 9);

nlohmann::json to_json(const ReliabilityMapDocument& doc);
ReliabilityMapDocument map_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// metric,control_value,seed,k,score
void write_results_csv(const std::filesystem::path& path, const std::vector<ScoreRow>& rows);
nlohmann::json report_to_json(const RegressionReport& report);

}  // namespace snc
