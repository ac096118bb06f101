#include "snc/core.hpp"

#include <charconv>
#include <cmath>

namespace snc {

std::string_view to_string(Space s) noexcept {
  return s == Space::original ? "original" : "projected";
}

PairedEmbedding PairedEmbedding::swapped() const {
  PairedEmbedding out;
  out.original_ = projected_;
  out.projected_ = original_;
  out.labels_ = labels_;
  return out;
}

PairedEmbedding make_paired_embedding(Matrix<double> original, Matrix<double> projected,
                                      std::optional<std::vector<int>> labels) {
  if (original.rows() != projected.rows()) {
    throw InputError("row-count mismatch: original has " + std::to_string(original.rows()) +
                     " rows, projected has " + std::to_string(projected.rows()));
  }
  if (original.rows() < 2) {
    throw InputError("at least 2 points are required, got " + std::to_string(original.rows()));
  }
  if (projected.cols() < 1 || original.cols() < projected.cols()) {
    throw InputError("dimensions must satisfy D >= d >= 1, got D=" +
                     std::to_string(original.cols()) + " d=" + std::to_string(projected.cols()));
  }
  if (!original.allFinite()) throw InputError("original coordinates contain NaN or Inf");
  if (!projected.allFinite()) throw InputError("projected coordinates contain NaN or Inf");
  if (labels && static_cast<Index>(labels->size()) != original.rows()) {
    throw InputError("label count " + std::to_string(labels->size()) + " does not match " +
                     std::to_string(original.rows()) + " points");
  }
  PairedEmbedding out;
  out.original_ = std::move(original);
  out.projected_ = std::move(projected);
  out.labels_ = std::move(labels);
  return out;
}

ClusteringChoice parse_clustering(std::string_view text) {
  if (text == "hdbscan" || text == "hdbscan_snn") return {ClusteringKind::hdbscan_snn, 20};
  if (text == "xmeans") return {ClusteringKind::xmeans, 20};
  if (text.starts_with("kmeans")) {
    if (text == "kmeans") return {ClusteringKind::kmeans, 20};
    if (text.size() > 7 && text[6] == ':') {
      int k = 0;
      auto tail = text.substr(7);
      auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), k);
      if (ec == std::errc{} && ptr == tail.data() + tail.size() && k >= 1) {
        return {ClusteringKind::kmeans, k};
      }
    }
  }
  throw ConfigError("invalid clustering '" + std::string(text) +
                    "' (expected hdbscan, kmeans:K or xmeans)");
}

DistanceChoice parse_distance(std::string_view text) {
  if (text == "snn") return DistanceChoice::snn;
  if (text == "euclidean") return DistanceChoice::euclidean;
  throw ConfigError("invalid distance '" + std::string(text) + "' (expected snn or euclidean)");
}

ExtractionChoice parse_extraction(std::string_view text) {
  if (text == "prob" || text == "probabilistic") return ExtractionChoice::probabilistic;
  if (text == "det" || text == "deterministic") return ExtractionChoice::deterministic;
  throw ConfigError("invalid extraction '" + std::string(text) + "' (expected prob or det)");
}

std::string to_string(const ClusteringChoice& c) {
  switch (c.kind) {
    case ClusteringKind::hdbscan_snn: return "hdbscan";
    case ClusteringKind::kmeans: return "kmeans:" + std::to_string(c.k);
    case ClusteringKind::xmeans: return "xmeans";
  }
  return "?";
}

std::string_view to_string(DistanceChoice d) noexcept {
  return d == DistanceChoice::snn ? "snn" : "euclidean";
}

std::string_view to_string(ExtractionChoice e) noexcept {
  return e == ExtractionChoice::probabilistic ? "prob" : "det";
}

void MetricConfig::validate(Index n) const {
  if (k_snn < 1 || k_snn >= n) {
    throw ConfigError("k_snn must satisfy 1 <= k < N (k=" + std::to_string(k_snn) +
                      ", N=" + std::to_string(n) + ")");
  }
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be > 0");
  if (!(walk_ratio > 0.0 && walk_ratio <= 1.0)) throw ConfigError("walk_ratio must be in (0, 1]");
  if (clustering.kind == ClusteringKind::kmeans && clustering.k < 1) {
    throw ConfigError("kmeans K must be >= 1");
  }
  if (hdbscan_min_cluster_size < 2) throw ConfigError("min_cluster_size must be >= 2");
  if (hdbscan_min_samples < 1) throw ConfigError("min_samples must be >= 1");
}

}  // namespace snc
