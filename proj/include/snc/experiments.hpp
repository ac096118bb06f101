#pragma once

#include "snc/core.hpp"
#include "snc/rng.hpp"
#include "snc/stats.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace snc {

/// Geometry shared by the sphere/circle experiments. Sphere centers sit on
/// orthogonal axes at `center_distance` from the origin; circle centers sit
/// at the same distance from the 2-D origin. The circle radius makes two
/// circles of a pair touch when their centers are 10 degrees apart.
struct SphereLayout {
  int n_spheres = 6;
  int points_per_sphere = 500;
  int dim = 100;
  double sphere_radius = 1.0;
  double center_distance = 5.0;
  double circle_radius = 5.0 * 0.08715574274765817;  // center_distance * sin(5 deg)
};

/// Six spheres, six circles; circle pairs rotate toward each other as the
/// angle between their centers shrinks from 60 to 0 degrees.
PairedEmbedding gen_experiment_a(double angle_deg, RngStream& rng, const SphereLayout& layout = {});

/// Same spheres, twelve circles; each sphere is split across a pair of
/// circles whose center angle shrinks from 30 to 0 degrees.
PairedEmbedding gen_experiment_b(double angle_deg, RngStream& rng, const SphereLayout& layout = {});

/// Replaces floor(rate * N) uniformly chosen projected points with uniform
/// samples from the projection's bounding box. For a fixed stream the
/// replaced subsets are nested across rates.
PairedEmbedding gen_experiment_c(const PairedEmbedding& base, double replacement_rate, RngStream& rng);

/// Uniform samples in [0, 1]^3.
Matrix<double> gen_rgb_cube(int n_points, RngStream& rng);

/// Ten well-separated Gaussian clusters in 50 dimensions with a 2-D layout
/// that keeps each cluster as a blob; the default base for experiment C.
PairedEmbedding gen_gaussian_mixture_base(std::uint64_t seed = 2000, int n_points = 2000);

/// Synthetic stand-in for a neighbor-count sweep over a cube: a linear 2-D
/// view whose cells are torn apart and partly swapped, both effects shrinking
/// as `n_neighbors` grows.
PairedEmbedding gen_cube_projection(const Matrix<double>& cube, double n_neighbors, RngStream& rng);

enum class ExperimentName { A, B, C, D };

ExperimentName parse_experiment(std::string_view text);
std::string_view to_string(ExperimentName e) noexcept;

struct ScheduleInstance {
  double control = 0.0;
  PairedEmbedding embedding;
};

struct ExperimentSchedule {
  ExperimentName name = ExperimentName::A;
  std::vector<ScheduleInstance> instances;

  /// Throws unless controls are strictly monotone in the experiment's
  /// direction (descending angles for A/B, ascending otherwise).
  void validate() const;
};

struct ExperimentOptions {
  SphereLayout layout;
  std::vector<double> controls;  // empty: the experiment's default sweep
  int cube_points = 4000;
  std::optional<PairedEmbedding> base;  // experiment C; default mixture if empty
};

std::vector<double> default_controls(ExperimentName name);

/// Generates every instance of an experiment for one data seed.
ExperimentSchedule make_schedule(ExperimentName name, const ExperimentOptions& options,
                                 std::uint64_t seed);

/// Experiment D over externally produced projections: `original.csv` plus
/// one `<prefix><n>.csv` per projection, `n` being the control value.
ExperimentSchedule load_projection_schedule(const std::string& directory, bool header = false);

struct MetricSet {
  bool snc = true;
  bool tnc = true;
  bool mrre = true;
  bool lcmc = false;
};

MetricSet parse_metric_set(std::string_view text);

struct RunOptions {
  MetricConfig snc_config;  // k_snn and seed are overridden per run
  std::vector<int> snc_k{80, 90, 100, 110, 120};
  std::vector<int> baseline_k{5, 10, 15, 20, 25};
  MetricSet metrics;
};

struct ScoreRow {
  std::string metric;
  double control = 0.0;
  std::uint64_t seed = 0;
  int k = 0;
  double score = 0.0;
};

struct MetricTrend {
  std::string metric;
  LinearFit fit;
  std::vector<double> controls;  // distinct, in schedule order
  std::vector<double> means;     // over seeds of the k-averaged score
  std::vector<double> sds;

  double mean_at(double control) const;
};

struct RegressionReport {
  std::string experiment;
  std::vector<ScoreRow> rows;
  std::vector<MetricTrend> trends;

  const MetricTrend& trend(std::string_view metric) const;
};

/// Scores one embedding with every requested metric at every k.
std::vector<ScoreRow> score_instance(const PairedEmbedding& embedding, double control,
                                     std::uint64_t seed, const RunOptions& options);

/// Regresses each metric's k-averaged score on the control value, one
/// observation per (instance, seed).
RegressionReport summarize(std::string experiment, std::vector<ScoreRow> rows);

/// Fixed instances; seeds vary only the metric random streams.
RegressionReport run_schedule(const ExperimentSchedule& schedule, const RunOptions& options,
                              std::span<const std::uint64_t> seeds);

/// Instances regenerated for every seed.
RegressionReport run_experiment(ExperimentName name, const ExperimentOptions& experiment,
                                const RunOptions& options, std::span<const std::uint64_t> seeds);

}  // namespace snc
