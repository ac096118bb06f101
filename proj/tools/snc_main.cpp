#include "snc/baselines.hpp"
#include "snc/experiments.hpp"
#include "snc/io.hpp"
#include "snc/metrics.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>

int run_selftest(std::ostream& out);

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct ComputeArgs {
  std::string high, low, labels, out = "scores.json", map;
  int map_k = 9;
  bool header = false;
  std::string clustering = "hdbscan", distance = "snn", extraction = "prob";
  snc::MetricConfig config;
};

struct BaselineArgs {
  std::string high, low, out, metrics = "tnc,mrre,lcmc";
  std::vector<int> k{5, 10, 15, 20, 25};
  bool header = false;
  bool mrre_error = false;
};

struct ExperimentArgs {
  std::string name, projections, out = ".";
  int seeds = 5;
  std::uint64_t first_seed = 1;
  bool header = false;
  std::vector<double> controls;
  int points_per_sphere = 500;
  int dim = 100;
  int cube_points = 4000;
  std::vector<int> snc_k{80, 90, 100, 110, 120};
  std::vector<int> baseline_k{5, 10, 15, 20, 25};
  int iterations = 500;
  std::string clustering = "hdbscan", distance = "snn", metrics = "snc,tnc,mrre";
};

void add_metric_flags(CLI::App* cmd, snc::MetricConfig& c, std::string& clustering, std::string& distance) {
  cmd->add_option("--alpha", c.alpha, "SNN distance offset")->capture_default_str();
  cmd->add_option("--walk-ratio", c.walk_ratio, "extraction walk length as a fraction of N")->capture_default_str();
  cmd->add_option("--clustering", clustering, "hdbscan | kmeans:K | xmeans")->capture_default_str();
  cmd->add_option("--distance", distance, "snn | euclidean")->capture_default_str();
}

int do_compute(const ComputeArgs& a) {
  snc::MetricConfig config = a.config;
  config.clustering = snc::parse_clustering(a.clustering);
  config.distance = snc::parse_distance(a.distance);
  config.extraction = snc::parse_extraction(a.extraction);
  config.collect_pointwise = !a.map.empty();

  std::optional<std::filesystem::path> labels;
  if (!a.labels.empty()) labels = a.labels;
  const snc::PairedEmbedding e = snc::load_paired_embedding(a.high, a.low, a.header, labels);
  config.validate(e.size());
  if (!a.map.empty() && (a.map_k < 1 || a.map_k >= e.size())) {
    throw snc::ConfigError("--map-k must satisfy 1 <= k < N");
  }

  const snc::SncResult result = snc::compute_snc(e, config);
  snc::write_json(a.out, snc::scores_to_json(result, config));
  if (!a.map.empty()) {
    const auto doc = snc::export_reliability_map(e, result.field, result.scores, config, a.map_k);
    snc::write_json(a.map, snc::to_json(doc));
  }
  std::cout << std::setprecision(6) << "steadiness   " << result.scores.steadiness << '\n'
            << "cohesiveness " << result.scores.cohesiveness << '\n';
  return 0;
}

int do_baselines(const BaselineArgs& a) {
  const snc::MetricSet set = snc::parse_metric_set(a.metrics);
  const snc::PairedEmbedding e = snc::load_paired_embedding(a.high, a.low, a.header);
  const snc::RankTable high = snc::build_rank_table(e.original());
  const snc::RankTable low = snc::build_rank_table(e.projected());

  std::vector<std::tuple<std::string, int, double>> rows;
  for (int k : a.k) {
    if (set.tnc) {
      rows.emplace_back("trustworthiness", k, snc::trustworthiness(high, low, k));
      rows.emplace_back("continuity", k, snc::continuity(high, low, k));
    }
    if (set.mrre) {
      const auto o = a.mrre_error ? snc::MrreOrientation::error : snc::MrreOrientation::quality;
      rows.emplace_back("mrre_missing", k, snc::mrre_missing(high, low, k, o));
      rows.emplace_back("mrre_false", k, snc::mrre_false(high, low, k, o));
    }
    if (set.lcmc) rows.emplace_back("lcmc", k, snc::lcmc(high, low, k));
  }

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw snc::InputError(a.out + ": cannot write file");
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << "metric,k,score\n" << std::setprecision(17);
  for (const auto& [metric, k, score] : rows) out << metric << ',' << k << ',' << score << '\n';
  return 0;
}

int do_experiment(const ExperimentArgs& a) {
  const snc::ExperimentName name = snc::parse_experiment(a.name);
  if (a.seeds < 1) throw snc::ConfigError("--seeds must be at least 1");
  if (!a.projections.empty() && name != snc::ExperimentName::D) {
    throw snc::ConfigError("--projections applies to experiment D only");
  }

  snc::RunOptions run;
  run.snc_config.iterations = a.iterations;
  run.snc_config.clustering = snc::parse_clustering(a.clustering);
  run.snc_config.distance = snc::parse_distance(a.distance);
  run.snc_k = a.snc_k;
  run.baseline_k = a.baseline_k;
  run.metrics = snc::parse_metric_set(a.metrics);

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(a.seeds));
  std::iota(seeds.begin(), seeds.end(), a.first_seed);

  snc::RegressionReport report;
  if (!a.projections.empty()) {
    report = snc::run_schedule(snc::load_projection_schedule(a.projections, a.header), run, seeds);
  } else {
    snc::ExperimentOptions opts;
    opts.layout.points_per_sphere = a.points_per_sphere;
    opts.layout.dim = a.dim;
    opts.controls = a.controls;
    opts.cube_points = a.cube_points;
    report = snc::run_experiment(name, opts, run, seeds);
  }

  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir);
  snc::write_results_csv(dir / "results.csv", report.rows);
  snc::write_json(dir / "report.json", snc::report_to_json(report));

  std::cout << "experiment " << report.experiment << '\n';
  for (const auto& t : report.trends) {
    std::cout << std::left << std::setw(16) << t.metric << " slope " << std::setw(13) << std::setprecision(5)
              << t.fit.slope << " p " << t.fit.p_value << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steadiness and Cohesiveness of multidimensional projections"};
  app.require_subcommand(1);

  ComputeArgs ca;
  auto* compute = app.add_subcommand("compute", "score one projection");
  compute->add_option("--high", ca.high, "original-space CSV")->required()->check(CLI::ExistingFile);
  compute->add_option("--low", ca.low, "projected-space CSV")->required()->check(CLI::ExistingFile);
  compute->add_option("--labels", ca.labels, "optional label CSV")->check(CLI::ExistingFile);
  compute->add_option("--k", ca.config.k_snn, "kNN size for the SNN graph")->capture_default_str();
  compute->add_option("--iterations", ca.config.iterations, "extractions per measure")->capture_default_str();
  compute->add_option("--seed", ca.config.seed, "random seed")->capture_default_str();
  compute->add_option("--extraction", ca.extraction, "prob | det")->capture_default_str();
  add_metric_flags(compute, ca.config, ca.clustering, ca.distance);
  compute->add_option("--out", ca.out, "scores JSON")->capture_default_str();
  compute->add_option("--map", ca.map, "reliability map JSON");
  compute->add_option("--map-k", ca.map_k, "kNN size of the map graph")->capture_default_str();
  compute->add_flag("--header", ca.header, "CSV files start with a header row");

  BaselineArgs ba;
  auto* baselines = app.add_subcommand("baselines", "local distortion metrics");
  baselines->add_option("--high", ba.high, "original-space CSV")->required()->check(CLI::ExistingFile);
  baselines->add_option("--low", ba.low, "projected-space CSV")->required()->check(CLI::ExistingFile);
  baselines->add_option("--k", ba.k, "neighborhood sizes")->capture_default_str();
  baselines->add_option("--metrics", ba.metrics, "comma list of tnc, mrre, lcmc")->capture_default_str();
  baselines->add_option("--out", ba.out, "CSV output (stdout if omitted)");
  baselines->add_flag("--header", ba.header, "CSV files start with a header row");
  baselines->add_flag("--mrre-error", ba.mrre_error, "report MRRE as raw error (0 is best) instead of 1 - error");

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "run a synthetic validation experiment");
  experiment->add_option("name", ea.name, "A | B | C | D")->required();
  experiment->add_option("--seeds", ea.seeds, "number of seeds")->capture_default_str();
  experiment->add_option("--first-seed", ea.first_seed, "first seed value")->capture_default_str();
  experiment->add_option("--projections", ea.projections, "directory with original.csv and <name><n>.csv (D)")
      ->check(CLI::ExistingDirectory);
  experiment->add_option("--out", ea.out, "output directory")->capture_default_str();
  experiment->add_option("--controls", ea.controls, "control values (default: full sweep)");
  experiment->add_option("--points-per-sphere", ea.points_per_sphere)->capture_default_str();
  experiment->add_option("--dim", ea.dim, "sphere dimension")->capture_default_str();
  experiment->add_option("--cube-points", ea.cube_points)->capture_default_str();
  experiment->add_option("--snc-k", ea.snc_k, "SNN kNN sizes averaged per instance")->capture_default_str();
  experiment->add_option("--baseline-k", ea.baseline_k, "baseline k values")->capture_default_str();
  experiment->add_option("--iterations", ea.iterations)->capture_default_str();
  experiment->add_option("--clustering", ea.clustering, "hdbscan | kmeans:K | xmeans")->capture_default_str();
  experiment->add_option("--distance", ea.distance, "snn | euclidean")->capture_default_str();
  experiment->add_option("--metrics", ea.metrics, "comma list of snc, tnc, mrre, lcmc")->capture_default_str();
  experiment->add_flag("--header", ea.header, "projection CSVs start with a header row");

  auto* selftest = app.add_subcommand("selftest", "compare against brute-force oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*compute) return do_compute(ca);
    if (*baselines) return do_baselines(ba);
    if (*experiment) return do_experiment(ea);
    if (*selftest) return run_selftest(std::cout);
  } catch (const snc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
