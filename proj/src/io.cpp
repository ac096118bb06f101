#include "snc/io.hpp"

#include "snc/snn_space.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace snc {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view cell, T& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc{} && ptr == cell.data() + cell.size();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open file");
  return in;
}

// Calls on_row(cells, row_number) for each non-blank data line.
template <typename OnRow>
void for_each_row(const std::filesystem::path& path, bool header, OnRow&& on_row) {
  auto in = open_input(path);
  std::string line;
  if (header) std::getline(in, line);
  std::size_t row = 0;
  std::vector<std::string_view> cells;
  while (std::getline(in, line)) {
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    ++row;
    cells.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      cells.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    on_row(cells, row);
  }
}

}  // namespace

Matrix<double> load_matrix_csv(const std::filesystem::path& path, bool header) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  for_each_row(path, header, [&](const std::vector<std::string_view>& cells, std::size_t row) {
    if (rows == 0) cols = cells.size();
    if (cells.size() != cols) {
      throw InputError(path.string() + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " columns, expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v)) {
        throw InputError(path.string() + ": row " + std::to_string(row) + ", column " +
                         std::to_string(c + 1) + ": non-numeric cell '" + std::string(trim(cells[c])) + "'");
      }
      if (!std::isfinite(v)) {
        throw InputError(path.string() + ": row " + std::to_string(row) + ": non-finite value");
      }
      values.push_back(v);
    }
    ++rows;
  });
  Matrix<double> m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = values[r * cols + c];
  }
  return m;
}

std::vector<int> load_labels_csv(const std::filesystem::path& path, bool header) {
  std::vector<int> labels;
  for_each_row(path, header, [&](const std::vector<std::string_view>& cells, std::size_t row) {
    int v = 0;
    if (cells.size() != 1 || !parse_number(cells[0], v)) {
      throw InputError(path.string() + ": row " + std::to_string(row) + ": expected one integer label");
    }
    labels.push_back(v);
  });
  return labels;
}

PairedEmbedding load_paired_embedding(const std::filesystem::path& original_path,
                                      const std::filesystem::path& projected_path, bool header,
                                      const std::optional<std::filesystem::path>& labels_path) {
  Matrix<double> original = load_matrix_csv(original_path, header);
  Matrix<double> projected = load_matrix_csv(projected_path, header);
  if (original.rows() != projected.rows()) {
    throw InputError("row-count mismatch: " + original_path.string() + " has " +
                     std::to_string(original.rows()) + " rows, " + projected_path.string() + " has " +
                     std::to_string(projected.rows()));
  }
  if (original.rows() < 2) {
    throw InputError(original_path.string() + ": at least 2 rows are required");
  }
  std::optional<std::vector<int>> labels;
  if (labels_path) labels = load_labels_csv(*labels_path, header);
  return make_paired_embedding(std::move(original), std::move(projected), std::move(labels));
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix<double>& m) {
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot write file");
  out << std::setprecision(17);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << m(r, c);
    }
    out << '\n';
  }
}

nlohmann::json config_to_json(const MetricConfig& c) {
  return {
      {"k_snn", c.k_snn},
      {"iterations", c.iterations},
      {"alpha", c.alpha},
      {"walk_ratio", c.walk_ratio},
      {"seed", c.seed},
      {"clustering", to_string(c.clustering)},
      {"distance", std::string(to_string(c.distance))},
      {"extraction", std::string(to_string(c.extraction))},
      {"include_zero_sign_pairs", c.include_zero_sign_pairs},
      {"swap_streams", c.swap_streams},
      {"hdbscan_min_cluster_size", c.hdbscan_min_cluster_size},
      {"hdbscan_min_samples", c.hdbscan_min_samples},
  };
}

MetricConfig config_from_json(const nlohmann::json& j) {
  MetricConfig c;
  c.k_snn = j.at("k_snn").get<int>();
  c.iterations = j.at("iterations").get<int>();
  c.alpha = j.at("alpha").get<double>();
  c.walk_ratio = j.at("walk_ratio").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.clustering = parse_clustering(j.at("clustering").get<std::string>());
  c.distance = parse_distance(j.at("distance").get<std::string>());
  c.extraction = parse_extraction(j.at("extraction").get<std::string>());
  c.include_zero_sign_pairs = j.value("include_zero_sign_pairs", true);
  c.swap_streams = j.value("swap_streams", false);
  c.hdbscan_min_cluster_size = j.value("hdbscan_min_cluster_size", 5);
  c.hdbscan_min_samples = j.value("hdbscan_min_samples", 5);
  return c;
}

nlohmann::json scores_to_json(const SncResult& result, const MetricConfig& config) {
  const auto& s = result.scores;
  const auto& d = result.diagnostics;
  nlohmann::json diagnostics = {
      {"n_pairs_steadiness", s.n_pairs_steadiness},
      {"n_pairs_cohesiveness", s.n_pairs_cohesiveness},
      {"steadiness_undetermined", s.steadiness_undetermined},
      {"cohesiveness_undetermined", s.cohesiveness_undetermined},
      {"max_compression", d.max_plus},
      {"max_stretch", d.max_minus},
      {"records_per_iteration_steadiness", d.records_per_iteration_steadiness},
      {"records_per_iteration_cohesiveness", d.records_per_iteration_cohesiveness},
      {"members_per_iteration_steadiness", d.members_per_iteration_steadiness},
      {"members_per_iteration_cohesiveness", d.members_per_iteration_cohesiveness},
  };
  return {{"steadiness", s.steadiness},
          {"cohesiveness", s.cohesiveness},
          {"diagnostics", std::move(diagnostics)},
          {"config", config_to_json(config)}};
}

ReliabilityMapDocument export_reliability_map(const PairedEmbedding& embedding,
                                              const PointwiseDistortionField& field,
                                              const MetricScores& scores, const MetricConfig& config,
                                              int k_map) {
  const Index n = embedding.size();
  if (k_map < 1 || k_map >= n) {
    throw ConfigError("k_map must satisfy 1 <= k_map < N (k_map=" + std::to_string(k_map) +
                      ", N=" + std::to_string(n) + ")");
  }
  if (field.size() != n) throw ConfigError("pointwise field does not match the embedding");

  ReliabilityMapDocument doc;
  doc.k_map = k_map;
  doc.steadiness = scores.steadiness;
  doc.cohesiveness = scores.cohesiveness;
  doc.config = config;
  const auto& y = embedding.projected();
  const auto& labels = embedding.labels();
  doc.points.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    MapPoint p;
    p.id = static_cast<PointId>(i);
    p.x = y(i, 0);
    p.y = y.cols() > 1 ? y(i, 1) : 0.0;
    if (labels) p.label = (*labels)[static_cast<std::size_t>(i)];
    p.steadiness_distortion = field.steadiness(i);
    p.cohesiveness_distortion = field.cohesiveness(i);
    doc.points.push_back(p);
  }

  const NeighborLists knn = build_knn(y, k_map);
  std::set<std::pair<PointId, PointId>> pairs;
  for (Index i = 0; i < n; ++i) {
    for (Index r = 0; r < k_map; ++r) {
      const auto a = static_cast<PointId>(i);
      const PointId b = knn(i, r);
      pairs.emplace(std::min(a, b), std::max(a, b));
    }
  }
  double fg_min = 0.0, fg_max = 0.0, mg_min = 0.0, mg_max = 0.0;
  bool first = true;
  for (const auto& [p, q] : pairs) {
    MapEdge e;
    e.p = p;
    e.q = q;
    e.false_groups_raw = field.steadiness(p) + field.steadiness(q);
    e.missing_groups_raw = field.cohesiveness(p) + field.cohesiveness(q);
    if (first) {
      fg_min = fg_max = e.false_groups_raw;
      mg_min = mg_max = e.missing_groups_raw;
      first = false;
    }
    fg_min = std::min(fg_min, e.false_groups_raw);
    fg_max = std::max(fg_max, e.false_groups_raw);
    mg_min = std::min(mg_min, e.missing_groups_raw);
    mg_max = std::max(mg_max, e.missing_groups_raw);
    doc.edges.push_back(e);
  }
  auto unit = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };
  for (auto& e : doc.edges) {
    e.false_groups_value = unit(e.false_groups_raw, fg_min, fg_max);
    e.missing_groups_value = unit(e.missing_groups_raw, mg_min, mg_max);
  }

  doc.registration.resize(static_cast<std::size_t>(n));
  if (!field.registration_stretch.empty()) {
    for (Index i = 0; i < n; ++i) {
      for (const auto& reg : field.registration_stretch[static_cast<std::size_t>(i)]) {
        if (reg.strength > kRegistrationFloor) doc.registration[static_cast<std::size_t>(i)].push_back(reg);
      }
    }
  }
  return doc;
}

nlohmann::json to_json(const ReliabilityMapDocument& doc) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : doc.points) {
    nlohmann::json jp = {{"id", p.id},
                         {"x", p.x},
                         {"y", p.y},
                         {"steadiness_distortion", p.steadiness_distortion},
                         {"cohesiveness_distortion", p.cohesiveness_distortion}};
    if (p.label) jp["label"] = *p.label;
    points.push_back(std::move(jp));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : doc.edges) {
    edges.push_back({{"p", e.p},
                     {"q", e.q},
                     {"false_groups_value", e.false_groups_value},
                     {"missing_groups_value", e.missing_groups_value},
                     {"false_groups_raw", e.false_groups_raw},
                     {"missing_groups_raw", e.missing_groups_raw}});
  }
  nlohmann::json registration = nlohmann::json::array();
  for (const auto& list : doc.registration) {
    nlohmann::json jl = nlohmann::json::array();
    for (const auto& r : list) jl.push_back({{"target_id", r.target}, {"strength", r.strength}});
    registration.push_back(std::move(jl));
  }
  return {{"schema_version", doc.schema_version},
          {"k_map", doc.k_map},
          {"points", std::move(points)},
          {"edges", std::move(edges)},
          {"registration_channel", "missing_groups"},
          {"registration", std::move(registration)},
          {"scores", {{"steadiness", doc.steadiness}, {"cohesiveness", doc.cohesiveness}}},
          {"config_echo", config_to_json(doc.config)}};
}

ReliabilityMapDocument map_from_json(const nlohmann::json& j) {
  ReliabilityMapDocument doc;
  doc.schema_version = j.at("schema_version").get<std::string>();
  if (doc.schema_version != "1") {
    throw InputError("unsupported map schema_version '" + doc.schema_version + "'");
  }
  doc.k_map = j.at("k_map").get<int>();
  for (const auto& jp : j.at("points")) {
    MapPoint p;
    p.id = jp.at("id").get<PointId>();
    p.x = jp.at("x").get<double>();
    p.y = jp.at("y").get<double>();
    if (jp.contains("label")) p.label = jp.at("label").get<int>();
    p.steadiness_distortion = jp.at("steadiness_distortion").get<double>();
    p.cohesiveness_distortion = jp.at("cohesiveness_distortion").get<double>();
    doc.points.push_back(p);
  }
  for (const auto& je : j.at("edges")) {
    MapEdge e;
    e.p = je.at("p").get<PointId>();
    e.q = je.at("q").get<PointId>();
    e.false_groups_value = je.at("false_groups_value").get<double>();
    e.missing_groups_value = je.at("missing_groups_value").get<double>();
    e.false_groups_raw = je.at("false_groups_raw").get<double>();
    e.missing_groups_raw = je.at("missing_groups_raw").get<double>();
    doc.edges.push_back(e);
  }
  for (const auto& jl : j.at("registration")) {
    std::vector<Registration> list;
    for (const auto& jr : jl) list.push_back({jr.at("target_id").get<PointId>(), jr.at("strength").get<double>()});
    doc.registration.push_back(std::move(list));
  }
  doc.steadiness = j.at("scores").at("steadiness").get<double>();
  doc.cohesiveness = j.at("scores").at("cohesiveness").get<double>();
  doc.config = config_from_json(j.at("config_echo"));
  return doc;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot write file");
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_results_csv(const std::filesystem::path& path, const std::vector<ScoreRow>& rows) {
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot write file");
  out << "metric,control_value,seed,k,score\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.metric << ',' << r.control << ',' << r.seed << ',' << r.k << ',' << r.score << '\n';
  }
}

nlohmann::json report_to_json(const RegressionReport& report) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& t : report.trends) {
    metrics[t.metric] = {{"slope", t.fit.slope},
                         {"intercept", t.fit.intercept},
                         {"std_error", t.fit.std_error},
                         {"t_stat", std::isfinite(t.fit.t_stat) ? nlohmann::json(t.fit.t_stat) : nlohmann::json(nullptr)},
                         {"p_value", t.fit.p_value},
                         {"n", t.fit.n},
                         {"controls", t.controls},
                         {"mean", t.means},
                         {"sd", t.sds}};
  }
  return {{"experiment", report.experiment}, {"metrics", std::move(metrics)}};
}

}  // namespace snc
