#include <doctest.h>

#include "oracles/suite.hpp"
#include "snc/experiments.hpp"
#include "snc/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

using namespace snc;

namespace {

SphereLayout small_layout() {
  SphereLayout l;
  l.points_per_sphere = 40;
  l.dim = 10;
  return l;
}

Eigen::Vector2d group_mean(const PairedEmbedding& e, int label) {
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  int count = 0;
  for (Index i = 0; i < e.size(); ++i) {
    if ((*e.labels())[static_cast<std::size_t>(i)] != label) continue;
    sum += e.projected().row(i).transpose();
    ++count;
  }
  return sum / count;
}

double min_gap(const PairedEmbedding& e, int a, int b) {
  double best = INFINITY;
  for (Index i = 0; i < e.size(); ++i) {
    if ((*e.labels())[static_cast<std::size_t>(i)] != a) continue;
    for (Index j = 0; j < e.size(); ++j) {
      if ((*e.labels())[static_cast<std::size_t>(j)] != b) continue;
      best = std::min(best, (e.projected().row(i) - e.projected().row(j)).norm());
    }
  }
  return best;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("experiment A geometry") {
  const SphereLayout l = small_layout();
  RngStream r1(1, 0x100), r2(1, 0x100);
  const auto far = gen_experiment_a(60.0, r1, l);
  CHECK(far.size() == 6 * 40);
  CHECK(far.original_dim() == 10);
  CHECK(far.projected_dim() == 2);
  for (Index i = 0; i < far.size(); ++i) {
    const int s = (*far.labels())[static_cast<std::size_t>(i)];
    Eigen::RowVectorXd offset = far.original().row(i);
    offset(s) -= l.center_distance;
    CHECK(offset.norm() == doctest::Approx(l.sphere_radius));
  }
  // Circles of a pair are disjoint at 60 degrees.
  for (int p = 0; p < 3; ++p) CHECK(min_gap(far, 2 * p, 2 * p + 1) > 1.0);

  const auto same = gen_experiment_a(0.0, r2, l);
  for (int p = 0; p < 3; ++p) {
    CHECK((group_mean(same, 2 * p) - group_mean(same, 2 * p + 1)).norm() < l.circle_radius);
  }
  // Only the projection changes with the angle.
  CHECK(far.original() == same.original());
  CHECK_THROWS_AS(gen_experiment_a(61.0, r1, l), ConfigError);
}

TEST_CASE("experiment B geometry") {
  const SphereLayout l = small_layout();
  RngStream r1(2, 0x100), r2(2, 0x100);
  const auto far = gen_experiment_b(30.0, r1, l);
  const auto same = gen_experiment_b(0.0, r2, l);
  CHECK(far.size() == 6 * 40);
  std::set<int> labels(far.labels()->begin(), far.labels()->end());
  CHECK(labels.size() == 12);
  for (int s = 0; s < 6; ++s) {
    CHECK(min_gap(far, 2 * s, 2 * s + 1) > 0.5);
    CHECK((group_mean(same, 2 * s) - group_mean(same, 2 * s + 1)).norm() < l.circle_radius);
  }
  // Halves follow the sign of the splitting coordinate.
  for (Index i = 0; i < far.size(); ++i) {
    const int label = (*far.labels())[static_cast<std::size_t>(i)];
    const int s = label / 2;
    CHECK((far.original()(i, (s + 1) % l.dim) >= 0.0) == (label % 2 == 1));
  }
  CHECK_THROWS_AS(gen_experiment_b(31.0, r1, l), ConfigError);
}

TEST_CASE("generators are deterministic per stream") {
  const SphereLayout l = small_layout();
  RngStream a(3, 0x100), b(3, 0x100), c(4, 0x100);
  const auto x = gen_experiment_a(20.0, a, l);
  const auto y = gen_experiment_a(20.0, b, l);
  const auto z = gen_experiment_a(20.0, c, l);
  CHECK(x.original() == y.original());
  CHECK(x.projected() == y.projected());
  CHECK(x.original() != z.original());
}

TEST_CASE("experiment C replacement") {
  RngStream g(5, 0);
  const auto base = make_paired_embedding(oracle::random_matrix(g, 100, 6), oracle::random_matrix(g, 100, 2));
  const Eigen::RowVectorXd lo = base.projected().colwise().minCoeff();
  const Eigen::RowVectorXd hi = base.projected().colwise().maxCoeff();

  auto at = [&](double rate) {
    RngStream rng(9, 0x200);
    return gen_experiment_c(base, rate, rng);
  };
  const auto zero = at(0.0);
  CHECK(zero.projected() == base.projected());
  CHECK(zero.original() == base.original());

  const auto all = at(1.0);
  for (Index i = 0; i < 100; ++i) {
    CHECK(all.projected().row(i) != base.projected().row(i));
    for (Index c = 0; c < 2; ++c) {
      CHECK(all.projected()(i, c) >= lo(c));
      CHECK(all.projected()(i, c) <= hi(c));
    }
  }

  const auto small = at(0.2), large = at(0.5);
  int changed_small = 0, changed_large = 0;
  for (Index i = 0; i < 100; ++i) {
    const bool s = small.projected().row(i) != base.projected().row(i);
    const bool l = large.projected().row(i) != base.projected().row(i);
    changed_small += s;
    changed_large += l;
    if (s) {
      CHECK(l);
      CHECK(small.projected().row(i) == large.projected().row(i));
    }
  }
  CHECK(changed_small == 20);
  CHECK(changed_large == 50);
  CHECK_THROWS_AS(at(1.5), ConfigError);
}

TEST_CASE("mixture base shape") {
  const auto m = gen_gaussian_mixture_base(2000, 200);
  CHECK(m.size() == 200);
  CHECK(m.original_dim() == 50);
  CHECK(m.projected_dim() == 2);
  CHECK(std::set<int>(m.labels()->begin(), m.labels()->end()).size() == 10);
  const auto again = gen_gaussian_mixture_base(2000, 200);
  CHECK(m.projected() == again.projected());
}

TEST_CASE("RGB cube bounds and mean") {
  RngStream rng(6, 0x300);
  const int n = 4000;
  const Matrix<double> cube = gen_rgb_cube(n, rng);
  CHECK(cube.rows() == n);
  CHECK(cube.cols() == 3);
  CHECK(cube.minCoeff() >= 0.0);
  CHECK(cube.maxCoeff() < 1.0);
  const double sigma = std::sqrt(1.0 / 12.0 / n);
  for (Index c = 0; c < 3; ++c) CHECK(std::abs(cube.col(c).mean() - 0.5) < 3.0 * sigma);
}

TEST_CASE("cube projection family") {
  RngStream cr(7, 0x300);
  const Matrix<double> cube = gen_rgb_cube(600, cr);
  RngStream a(7, 0x301), b(7, 0x301);
  const auto p4 = gen_cube_projection(cube, 4, a);
  const auto p4b = gen_cube_projection(cube, 4, b);
  CHECK(p4.projected() == p4b.projected());
  CHECK(p4.projected_dim() == 2);
  CHECK(p4.original() == cube);
  RngStream c(7, 0x301);
  const auto p90 = gen_cube_projection(cube, 90, c);
  // Tearing shrinks with n: the spread approaches the plain linear view.
  const double spread4 = (p4.projected().rowwise() - p4.projected().colwise().mean()).norm();
  const double spread90 = (p90.projected().rowwise() - p90.projected().colwise().mean()).norm();
  CHECK(spread90 < spread4);
}

TEST_CASE("schedules validate their control direction") {
  ExperimentOptions o;
  o.layout = small_layout();
  o.controls = {60, 30, 0};
  const auto s = make_schedule(ExperimentName::A, o, 1);
  CHECK(s.instances.size() == 3);
  CHECK(s.instances[2].control == 0.0);
  o.controls = {0, 30, 60};
  CHECK_THROWS_AS(make_schedule(ExperimentName::A, o, 1), ConfigError);
  ExperimentSchedule bad;
  bad.name = ExperimentName::C;
  bad.instances.push_back({0.5, s.instances[0].embedding});
  bad.instances.push_back({0.5, s.instances[0].embedding});
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  CHECK(default_controls(ExperimentName::A).size() == 25);
  CHECK(default_controls(ExperimentName::B).back() == 0.0);
  CHECK(default_controls(ExperimentName::C).back() == doctest::Approx(1.0));
  CHECK(default_controls(ExperimentName::D).front() == 4.0);
  CHECK(parse_experiment("b") == ExperimentName::B);
  CHECK_THROWS_AS(parse_experiment("E"), ConfigError);
}

TEST_CASE("projection schedule from a directory") {
  TempDir dir("snc_test_schedule");
  RngStream rng(8, 0);
  const Matrix<double> x = oracle::random_matrix(rng, 12, 3);
  write_matrix_csv(dir.path / "original.csv", x);
  write_matrix_csv(dir.path / "umap_20.csv", x.leftCols(2));
  write_matrix_csv(dir.path / "umap_5.csv", x.leftCols(2));
  write_matrix_csv(dir.path / "umap_10.csv", x.leftCols(2));
  {
    std::ofstream(dir.path / "notes.txt") << "ignored\n";
  }
  const auto s = load_projection_schedule(dir.path.string());
  REQUIRE(s.instances.size() == 3);
  CHECK(s.instances[0].control == 5.0);
  CHECK(s.instances[1].control == 10.0);
  CHECK(s.instances[2].control == 20.0);
  CHECK(s.instances[0].embedding.original() == x);

  write_matrix_csv(dir.path / "tsne_10.csv", x.leftCols(2));
  CHECK_THROWS_AS(load_projection_schedule(dir.path.string()), InputError);
  std::filesystem::remove(dir.path / "tsne_10.csv");

  write_matrix_csv(dir.path / "umap_30.csv", x.topRows(5));
  CHECK_THROWS_AS(load_projection_schedule(dir.path.string()), InputError);

  TempDir empty("snc_test_schedule_empty");
  write_matrix_csv(empty.path / "original.csv", x);
  CHECK_THROWS_AS(load_projection_schedule(empty.path.string()), InputError);
  CHECK_THROWS_AS(load_projection_schedule((empty.path / "missing").string()), InputError);
}

TEST_CASE("metric set parsing") {
  const MetricSet a = parse_metric_set("snc,lcmc");
  CHECK(a.snc);
  CHECK(a.lcmc);
  CHECK_FALSE(a.tnc);
  CHECK_FALSE(a.mrre);
  const MetricSet all = parse_metric_set("all");
  CHECK((all.snc && all.tnc && all.mrre && all.lcmc));
  CHECK_THROWS_AS(parse_metric_set("snc,bogus"), ConfigError);
  CHECK_THROWS_AS(parse_metric_set(""), ConfigError);
}

TEST_CASE("summaries average over k and regress over seeds") {
  std::vector<ScoreRow> rows;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (double control : {0.0, 1.0, 2.0, 3.0}) {
      rows.push_back({"flat", control, seed, 5, 0.4});
      rows.push_back({"flat", control, seed, 10, 0.6});
      rows.push_back({"line", control, seed, 5, 0.1 * control + 0.01 * static_cast<double>(seed)});
      rows.push_back({"line", control, seed, 10, 0.1 * control + 0.01 * static_cast<double>(seed)});
    }
  }
  const auto r = summarize("X", rows);
  CHECK(r.experiment == "X");
  CHECK(r.rows.size() == rows.size());
  const auto& flat = r.trend("flat");
  CHECK(flat.fit.slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(flat.fit.p_value == doctest::Approx(1.0));
  CHECK(flat.fit.n == 12);
  CHECK(flat.mean_at(2.0) == doctest::Approx(0.5));
  CHECK(flat.sds[0] == doctest::Approx(0.0));
  const auto& line = r.trend("line");
  CHECK(line.fit.slope == doctest::Approx(0.1));
  CHECK(line.fit.p_value < 1e-6);
  CHECK(line.mean_at(1.0) == doctest::Approx(0.12));
  CHECK(line.sds[0] == doctest::Approx(0.01));
  CHECK_THROWS_AS(r.trend("none"), ConfigError);
  CHECK_THROWS_AS(line.mean_at(7.0), ConfigError);
}

TEST_CASE("running a schedule of self-projections") {
  RngStream rng(10, 0);
  const Matrix<double> x = oracle::random_matrix(rng, 40, 3);
  ExperimentSchedule s;
  s.name = ExperimentName::C;
  for (double c : {0.0, 0.5, 1.0}) s.instances.push_back({c, make_paired_embedding(x, x)});
  RunOptions o;
  o.snc_k = {5};
  o.baseline_k = {3, 4};
  o.snc_config.iterations = 10;
  o.metrics = parse_metric_set("all");
  const std::vector<std::uint64_t> seeds{1, 2};
  const auto r = run_schedule(s, o, seeds);
  for (const char* m : {"steadiness", "cohesiveness", "trustworthiness", "continuity", "mrre_missing", "mrre_false"}) {
    INFO(m);
    CHECK(r.trend(m).fit.slope == 0.0);
    CHECK(r.trend(m).means[0] == 1.0);
  }
  CHECK(r.trend("lcmc").means[0] == doctest::Approx(1.0 - 3.5 / 39.0));
  CHECK(r.rows.size() == 2 * 3 * (2 + 2 * 5));

  s.instances.pop_back();
  CHECK_THROWS_AS(run_schedule(s, o, seeds), ConfigError);
}
