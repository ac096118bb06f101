#include "snc/experiments.hpp"

#include "snc/baselines.hpp"
#include "snc/io.hpp"
#include "snc/kmeans.hpp"
#include "snc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <numeric>
#include <regex>

namespace snc {
namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

// Stream ids inside one data seed.
constexpr std::uint64_t kStreamGeometry = 0x100;
constexpr std::uint64_t kStreamReplacement = 0x200;
constexpr std::uint64_t kStreamCube = 0x300;
constexpr std::uint64_t kStreamCubeView = 0x301;

void check_layout(const SphereLayout& l) {
  if (l.n_spheres < 1 || l.points_per_sphere < 2 || l.dim < l.n_spheres || l.sphere_radius <= 0.0 ||
      l.center_distance <= 0.0 || l.circle_radius <= 0.0) {
    throw ConfigError("invalid sphere layout");
  }
}

// Uniform point on the surface of a sphere of the given radius around the
// `sphere`-th axis point.
Eigen::RowVectorXd sample_sphere(RngStream& rng, const SphereLayout& l, int sphere) {
  Eigen::RowVectorXd out(l.dim);
  for (Index c = 0; c < out.size(); ++c) out(c) = rng.normal();
  double norm = out.norm();
  while (norm == 0.0) {
    for (Index c = 0; c < out.size(); ++c) out(c) = rng.normal();
    norm = out.norm();
  }
  out *= l.sphere_radius / norm;
  out(sphere) += l.center_distance;
  return out;
}

// Uniform point in a disk of radius r.
Eigen::Vector2d sample_disk(RngStream& rng, double r) {
  const double rho = r * std::sqrt(rng.uniform());
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  return {rho * std::cos(theta), rho * std::sin(theta)};
}

Eigen::Vector2d on_ring(double radius, double angle_deg) {
  return {radius * std::cos(angle_deg * kDegree), radius * std::sin(angle_deg * kDegree)};
}

}  // namespace

PairedEmbedding gen_experiment_a(double angle_deg, RngStream& rng, const SphereLayout& l) {
  if (!(angle_deg >= 0.0 && angle_deg <= 60.0)) throw ConfigError("experiment A angle must lie in [0, 60]");
  check_layout(l);
  const int n = l.n_spheres * l.points_per_sphere;
  Matrix<double> high(n, l.dim);
  Matrix<double> low(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  const double pair_spacing = 360.0 / std::ceil(l.n_spheres / 2.0);
  for (int s = 0; s < l.n_spheres; ++s) {
    // Circles 2p and 2p+1 straddle the pair's base direction.
    const double base = pair_spacing * (s / 2);
    const double center_angle = base + (s % 2 == 0 ? -0.5 : 0.5) * angle_deg;
    const Eigen::Vector2d center = on_ring(l.center_distance, center_angle);
    for (int i = 0; i < l.points_per_sphere; ++i) {
      const int row = s * l.points_per_sphere + i;
      high.row(row) = sample_sphere(rng, l, s);
      low.row(row) = (center + sample_disk(rng, l.circle_radius)).transpose();
      labels[static_cast<std::size_t>(row)] = s;
    }
  }
  return make_paired_embedding(std::move(high), std::move(low), std::move(labels));
}

PairedEmbedding gen_experiment_b(double angle_deg, RngStream& rng, const SphereLayout& l) {
  if (!(angle_deg >= 0.0 && angle_deg <= 30.0)) throw ConfigError("experiment B angle must lie in [0, 30]");
  check_layout(l);
  const int n = l.n_spheres * l.points_per_sphere;
  Matrix<double> high(n, l.dim);
  Matrix<double> low(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  const double pair_spacing = 360.0 / l.n_spheres;
  for (int s = 0; s < l.n_spheres; ++s) {
    const double base = pair_spacing * s;
    const Eigen::Vector2d centers[2] = {on_ring(l.center_distance, base - 0.5 * angle_deg),
                                        on_ring(l.center_distance, base + 0.5 * angle_deg)};
    // The two hemispheres split by the next axis go to the two circles.
    const int split_axis = (s + 1) % l.dim;
    for (int i = 0; i < l.points_per_sphere; ++i) {
      const int row = s * l.points_per_sphere + i;
      high.row(row) = sample_sphere(rng, l, s);
      const int half = high(row, split_axis) >= (split_axis == s ? l.center_distance : 0.0) ? 1 : 0;
      low.row(row) = (centers[half] + sample_disk(rng, l.circle_radius)).transpose();
      labels[static_cast<std::size_t>(row)] = 2 * s + half;
    }
  }
  return make_paired_embedding(std::move(high), std::move(low), std::move(labels));
}

PairedEmbedding gen_experiment_c(const PairedEmbedding& base, double rate, RngStream& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("replacement rate must lie in [0, 1]");
  const Index n = base.size();
  const Index d = base.projected_dim();
  const Matrix<double>& y = base.projected();
  const Eigen::RowVectorXd lo = y.colwise().minCoeff();
  const Eigen::RowVectorXd hi = y.colwise().maxCoeff();

  // The order and the replacement values do not depend on the rate, so the
  // replaced sets are nested and agree on shared points.
  std::vector<PointId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  Matrix<double> replacement(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < d; ++c) replacement(i, c) = lo(c) + (hi(c) - lo(c)) * rng.uniform();
  }

  const auto count = static_cast<Index>(std::floor(rate * static_cast<double>(n) + 1e-9));
  Matrix<double> projected = y;
  for (Index i = 0; i < count; ++i) projected.row(order[static_cast<std::size_t>(i)]) = replacement.row(i);
  return make_paired_embedding(base.original(), std::move(projected), base.labels());
}

Matrix<double> gen_rgb_cube(int n_points, RngStream& rng) {
  if (n_points < 1) throw ConfigError("cube needs at least one point");
  Matrix<double> cube(n_points, 3);
  for (int i = 0; i < n_points; ++i) {
    for (int c = 0; c < 3; ++c) cube(i, c) = rng.uniform();
  }
  return cube;
}

PairedEmbedding gen_gaussian_mixture_base(std::uint64_t seed, int n_points) {
  constexpr int kClusters = 10;
  constexpr int kDim = 50;
  if (n_points < kClusters * 2) throw ConfigError("mixture needs at least 20 points");
  RngStream rng(seed, kStreamGeometry);

  Matrix<double> centers(kClusters, kDim);
  for (Index i = 0; i < centers.size(); ++i) centers.data()[i] = 4.0 * rng.normal();
  // Random orthonormal 50x2 frame for the within-cluster layout.
  Matrix<double> frame(kDim, 2);
  for (Index i = 0; i < frame.size(); ++i) frame.data()[i] = rng.normal();
  frame = Eigen::HouseholderQR<Matrix<double>>(frame).householderQ() * Matrix<double>::Identity(kDim, 2);

  Matrix<double> high(n_points, kDim);
  Matrix<double> low(n_points, 2);
  std::vector<int> labels(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const int c = i % kClusters;
    Eigen::RowVectorXd offset(kDim);
    for (int j = 0; j < kDim; ++j) offset(j) = rng.normal();
    high.row(i) = centers.row(c) + offset;
    low.row(i) = on_ring(20.0, 36.0 * c).transpose() + offset * frame;
    labels[static_cast<std::size_t>(i)] = c;
  }
  return make_paired_embedding(std::move(high), std::move(low), std::move(labels));
}

PairedEmbedding gen_cube_projection(const Matrix<double>& cube, double n_neighbors, RngStream& rng) {
  if (cube.cols() != 3 || cube.rows() < 32) throw ConfigError("cube projection needs an N x 3 cube, N >= 32");
  if (!(n_neighbors >= 1.0)) throw ConfigError("n_neighbors must be at least 1");
  constexpr int kCells = 16;
  const double f = 4.0 / n_neighbors;

  // Everything drawn from `rng` is independent of n_neighbors, so the family
  // shares cells, view and swap order.
  const KmeansResult cells = kmeans(cube, kCells, rng);
  const int k = static_cast<int>(cells.centers.rows());
  Matrix<double> view(3, 2);
  view << 1.0, 0.0, 0.0, 1.0, 0.35, 0.35;
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = k - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }

  const Eigen::RowVector3d mid(0.5, 0.5, 0.5);
  Matrix<double> flat = (cube.rowwise() - mid) * view;
  Matrix<double> cell_mid = (cells.centers.rowwise() - mid) * view;

  // perm[2i], perm[2i+1] exchange places for the first `swaps` pairs.
  std::vector<int> target(static_cast<std::size_t>(k));
  std::iota(target.begin(), target.end(), 0);
  const int swaps = std::min(k / 2, static_cast<int>(std::floor(f * k / 2.0 + 1e-9)));
  for (int s = 0; s < swaps; ++s) {
    std::swap(target[static_cast<std::size_t>(perm[2 * s])], target[static_cast<std::size_t>(perm[2 * s + 1])]);
  }

  Matrix<double> low(cube.rows(), 2);
  for (Index i = 0; i < cube.rows(); ++i) {
    const int c = cells.labels[static_cast<std::size_t>(i)];
    const int t = target[static_cast<std::size_t>(c)];
    low.row(i) = flat.row(i) - cell_mid.row(c) + (1.0 + f) * cell_mid.row(t);
  }
  return make_paired_embedding(cube, std::move(low), cells.labels);
}

ExperimentName parse_experiment(std::string_view text) {
  if (text == "A" || text == "a") return ExperimentName::A;
  if (text == "B" || text == "b") return ExperimentName::B;
  if (text == "C" || text == "c") return ExperimentName::C;
  if (text == "D" || text == "d") return ExperimentName::D;
  throw ConfigError("unknown experiment '" + std::string(text) + "' (expected A, B, C or D)");
}

std::string_view to_string(ExperimentName e) noexcept {
  switch (e) {
    case ExperimentName::A: return "A";
    case ExperimentName::B: return "B";
    case ExperimentName::C: return "C";
    case ExperimentName::D: return "D";
  }
  return "?";
}

void ExperimentSchedule::validate() const {
  const bool descending = name == ExperimentName::A || name == ExperimentName::B;
  for (std::size_t i = 1; i < instances.size(); ++i) {
    const double prev = instances[i - 1].control;
    const double cur = instances[i].control;
    if (descending ? !(cur < prev) : !(cur > prev)) {
      throw ConfigError(std::string("experiment ") + std::string(to_string(name)) + " controls must be strictly " +
                        (descending ? "descending" : "ascending"));
    }
  }
}

std::vector<double> default_controls(ExperimentName name) {
  std::vector<double> out;
  switch (name) {
    case ExperimentName::A:
      for (int i = 0; i <= 24; ++i) out.push_back(60.0 - 2.5 * i);
      break;
    case ExperimentName::B:
      for (int i = 0; i <= 24; ++i) out.push_back(30.0 - 1.25 * i);
      break;
    case ExperimentName::C:
      for (int i = 0; i <= 20; ++i) out.push_back(0.05 * i);
      break;
    case ExperimentName::D:
      for (int n = 4; n <= 9; ++n) out.push_back(n);
      for (int n = 10; n <= 90; n += 10) out.push_back(n);
      break;
  }
  return out;
}

ExperimentSchedule make_schedule(ExperimentName name, const ExperimentOptions& options, std::uint64_t seed) {
  ExperimentSchedule schedule;
  schedule.name = name;
  const std::vector<double> controls = options.controls.empty() ? default_controls(name) : options.controls;

  // Every instance restarts the same stream so that only the control differs.
  switch (name) {
    case ExperimentName::A:
    case ExperimentName::B:
      for (double c : controls) {
        RngStream rng(seed, kStreamGeometry);
        schedule.instances.push_back(
            {c, name == ExperimentName::A ? gen_experiment_a(c, rng, options.layout) : gen_experiment_b(c, rng, options.layout)});
      }
      break;
    case ExperimentName::C: {
      const PairedEmbedding base = options.base ? *options.base : gen_gaussian_mixture_base();
      for (double c : controls) {
        RngStream rng(seed, kStreamReplacement);
        schedule.instances.push_back({c, gen_experiment_c(base, c, rng)});
      }
      break;
    }
    case ExperimentName::D: {
      RngStream cube_rng(seed, kStreamCube);
      const Matrix<double> cube = gen_rgb_cube(options.cube_points, cube_rng);
      for (double c : controls) {
        RngStream rng(seed, kStreamCubeView);
        schedule.instances.push_back({c, gen_cube_projection(cube, c, rng)});
      }
      break;
    }
  }
  schedule.validate();
  return schedule;
}

ExperimentSchedule load_projection_schedule(const std::string& directory, bool header) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  const fs::path original_path = dir / "original.csv";
  if (!fs::is_regular_file(original_path)) throw InputError(original_path.string() + ": not found");
  const Matrix<double> original = load_matrix_csv(original_path, header);

  static const std::regex pattern(R"(^[A-Za-z_\-]*?(\d+(?:\.\d+)?)\.csv$)");
  std::map<double, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string file = entry.path().filename().string();
    if (file == "original.csv") continue;
    std::smatch m;
    if (!std::regex_match(file, m, pattern)) continue;
    const double control = std::stod(m[1].str());
    if (!files.emplace(control, entry.path()).second) {
      throw InputError(dir.string() + ": two projections share control value " + m[1].str());
    }
  }
  if (files.empty()) throw InputError(dir.string() + ": no projection files found");

  ExperimentSchedule schedule;
  schedule.name = ExperimentName::D;
  for (const auto& [control, path] : files) {
    Matrix<double> projected = load_matrix_csv(path, header);
    if (projected.rows() != original.rows()) {
      throw InputError("row-count mismatch: " + original_path.string() + " has " + std::to_string(original.rows()) +
                       " rows, " + path.string() + " has " + std::to_string(projected.rows()));
    }
    schedule.instances.push_back({control, make_paired_embedding(original, std::move(projected))});
  }
  schedule.validate();
  return schedule;
}

MetricSet parse_metric_set(std::string_view text) {
  MetricSet set{false, false, false, false};
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    if (item == "snc") set.snc = true;
    else if (item == "tnc") set.tnc = true;
    else if (item == "mrre") set.mrre = true;
    else if (item == "lcmc") set.lcmc = true;
    else if (item == "all") set = {true, true, true, true};
    else throw ConfigError("unknown metric '" + std::string(item) + "' (expected snc, tnc, mrre, lcmc or all)");
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return set;
}

double MetricTrend::mean_at(double control) const {
  for (std::size_t i = 0; i < controls.size(); ++i) {
    if (controls[i] == control) return means[i];
  }
  throw ConfigError("no instance with control value " + std::to_string(control));
}

const MetricTrend& RegressionReport::trend(std::string_view metric) const {
  for (const auto& t : trends) {
    if (t.metric == metric) return t;
  }
  throw ConfigError("metric '" + std::string(metric) + "' not in report");
}

std::vector<ScoreRow> score_instance(const PairedEmbedding& embedding, double control, std::uint64_t seed,
                                     const RunOptions& options) {
  std::vector<ScoreRow> rows;
  if (options.metrics.snc) {
    for (int k : options.snc_k) {
      MetricConfig config = options.snc_config;
      config.k_snn = k;
      config.seed = seed;
      config.collect_pointwise = false;
      const SncResult r = compute_snc(embedding, config);
      rows.push_back({"steadiness", control, seed, k, r.scores.steadiness});
      rows.push_back({"cohesiveness", control, seed, k, r.scores.cohesiveness});
    }
  }
  const MetricSet& m = options.metrics;
  if (m.tnc || m.mrre || m.lcmc) {
    const RankTable high = build_rank_table(embedding.original());
    const RankTable low = build_rank_table(embedding.projected());
    for (int k : options.baseline_k) {
      if (m.tnc) {
        rows.push_back({"trustworthiness", control, seed, k, trustworthiness(high, low, k)});
        rows.push_back({"continuity", control, seed, k, continuity(high, low, k)});
      }
      if (m.mrre) {
        rows.push_back({"mrre_missing", control, seed, k, mrre_missing(high, low, k)});
        rows.push_back({"mrre_false", control, seed, k, mrre_false(high, low, k)});
      }
      if (m.lcmc) rows.push_back({"lcmc", control, seed, k, lcmc(high, low, k)});
    }
  }
  return rows;
}

RegressionReport summarize(std::string experiment, std::vector<ScoreRow> rows) {
  RegressionReport report;
  report.experiment = std::move(experiment);

  struct Cell {
    double sum = 0.0;
    int count = 0;
  };
  std::vector<std::string> metrics;
  std::vector<double> controls;
  // (metric, control, seed) -> k-average; iteration order of std::map is
  // irrelevant since observations are re-sorted below.
  std::map<std::tuple<std::string, double, std::uint64_t>, Cell> cells;
  for (const auto& r : rows) {
    if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end()) metrics.push_back(r.metric);
    if (std::find(controls.begin(), controls.end(), r.control) == controls.end()) controls.push_back(r.control);
    auto& c = cells[{r.metric, r.control, r.seed}];
    c.sum += r.score;
    ++c.count;
  }

  for (const auto& metric : metrics) {
    MetricTrend t;
    t.metric = metric;
    std::vector<double> xs;
    std::vector<double> ys;
    for (double control : controls) {
      std::vector<double> per_seed;
      for (auto it = cells.lower_bound({metric, control, 0}); it != cells.end(); ++it) {
        const auto& [key, cell] = *it;
        if (std::get<0>(key) != metric || std::get<1>(key) != control) break;
        per_seed.push_back(cell.sum / cell.count);
      }
      if (per_seed.empty()) continue;
      t.controls.push_back(control);
      t.means.push_back(mean(per_seed));
      t.sds.push_back(sample_sd(per_seed));
      for (double v : per_seed) {
        xs.push_back(control);
        ys.push_back(v);
      }
    }
    t.fit = ols_fit(xs, ys);
    report.trends.push_back(std::move(t));
  }
  report.rows = std::move(rows);
  return report;
}

RegressionReport run_schedule(const ExperimentSchedule& schedule, const RunOptions& options,
                              std::span<const std::uint64_t> seeds) {
  if (schedule.instances.size() < 3) throw ConfigError("regression needs at least 3 schedule instances");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  schedule.validate();
  std::vector<ScoreRow> rows;
  for (std::uint64_t seed : seeds) {
    for (const auto& inst : schedule.instances) {
      auto part = score_instance(inst.embedding, inst.control, seed, options);
      rows.insert(rows.end(), part.begin(), part.end());
    }
  }
  return summarize(std::string(to_string(schedule.name)), std::move(rows));
}

RegressionReport run_experiment(ExperimentName name, const ExperimentOptions& experiment, const RunOptions& options,
                                std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  std::vector<ScoreRow> rows;
  for (std::uint64_t seed : seeds) {
    const ExperimentSchedule schedule = make_schedule(name, experiment, seed);
    if (schedule.instances.size() < 3) throw ConfigError("regression needs at least 3 schedule instances");
    for (const auto& inst : schedule.instances) {
      auto part = score_instance(inst.embedding, inst.control, seed, options);
      rows.insert(rows.end(), part.begin(), part.end());
    }
  }
  return summarize(std::string(to_string(name)), std::move(rows));
}

}  // namespace snc
