#include "topoinfer/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "topoinfer/ph.hpp"

namespace topoinfer {

namespace {

using nlohmann::json;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto a = field.find_first_not_of(" \t\r");
    const auto b = field.find_last_not_of(" \t\r");
    fields.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (...) {
    return false;
  }
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool ok = true;
    for (const auto& f : fields) {
      double v;
      if (!parse_double(f, v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) {
      if (first) {
        first = false;
        continue;  // header row
      }
      throw std::runtime_error(path + ": non-numeric entry in CSV body");
    }
    first = false;
    if (!rows.empty() && rows.front().size() != row.size())
      throw std::runtime_error(path + ": ragged CSV rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  return rows;
}

json diagram_to_json(const PersistenceDiagram& d) {
  json j;
  j["dim"] = d.dim;
  j["pairs"] = json::array();
  for (const auto& p : d.pairs) j["pairs"].push_back({p.birth, p.death});
  if (d.representatives) {
    j["representatives"] = json::array();
    for (const auto& loop : *d.representatives) j["representatives"].push_back(loop);
  } else {
    j["representatives"] = nullptr;
  }
  return j;
}

PersistenceDiagram diagram_from_json(const json& j) {
  PersistenceDiagram d;
  d.dim = j.at("dim").get<int>();
  for (const auto& p : j.at("pairs"))
    d.pairs.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  if (j.contains("representatives") && !j.at("representatives").is_null()) {
    d.representatives.emplace();
    for (const auto& loop : j.at("representatives"))
      d.representatives->push_back(loop.get<std::vector<int>>());
  }
  return d;
}

}  // namespace

std::string to_string(TestMethod m) {
  switch (m) {
    case TestMethod::two_sample: return "two_sample";
    case TestMethod::t_anova: return "t_anova";
    default: return "permanova";
  }
}

SimilarityMode similarity_mode_from_string(const std::string& s) {
  if (s == "dissimilarity") return SimilarityMode::dissimilarity;
  if (s == "one_minus_abs") return SimilarityMode::one_minus_abs;
  throw std::invalid_argument("unknown similarity mode: " + s);
}

Matrix convert_similarity(const Eigen::Ref<const Matrix>& m, SimilarityMode mode) {
  if (mode == SimilarityMode::dissimilarity) {
    validate_dissimilarity(m);
    return m;
  }
  if (m.rows() != m.cols())
    throw std::invalid_argument("similarity matrix must be square");
  Matrix d(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double s = m(i, j);
      if (!std::isfinite(s) || s < -1.0 - 1e-12 || s > 1.0 + 1e-12)
        throw std::invalid_argument("similarity entries must be in [-1, 1]");
      d(i, j) = i == j ? 0.0 : 1.0 - std::abs(s);
    }
  validate_dissimilarity(d);
  return d;
}

PointCloud read_point_cloud_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  PointCloud pc(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      pc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return pc;
}

Matrix read_matrix_csv(const std::string& path) {
  const Matrix m = read_point_cloud_csv(path);
  if (m.rows() != m.cols())
    throw std::runtime_error(path + ": expected a square matrix");
  return m;
}

void write_matrix_csv(const std::string& path, const Eigen::Ref<const Matrix>& m) {
  std::ofstream out = open_out(path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

void write_diagrams_json(const std::string& path,
                         const std::vector<PersistenceDiagram>& diagrams) {
  json j = json::array();
  for (const auto& d : diagrams) j.push_back(diagram_to_json(d));
  open_out(path) << j.dump(2) << '\n';
}

std::vector<PersistenceDiagram> read_diagrams_json(const std::string& path) {
  json j;
  open_in(path) >> j;
  std::vector<PersistenceDiagram> out;
  if (j.is_array())
    for (const auto& item : j) out.push_back(diagram_from_json(item));
  else
    out.push_back(diagram_from_json(j));
  return out;
}

void write_hkvector_json(const std::string& path, const HKVector& v) {
  json j;
  j["order"] = v.order;
  j["coeffs"] = std::vector<double>(v.coeffs.data(), v.coeffs.data() + v.coeffs.size());
  j["source_size"] = v.source_size;
  open_out(path) << j.dump(2) << '\n';
}

HKVector read_hkvector_json(const std::string& path) {
  json j;
  open_in(path) >> j;
  HKVector v;
  v.order = j.at("order").get<int>();
  const auto coeffs = j.at("coeffs").get<std::vector<double>>();
  v.coeffs = Eigen::Map<const Vector>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  v.source_size = j.at("source_size").get<int>();
  return v;
}

void write_test_result_json(const std::string& path, const TestResult& r) {
  json j;
  j["method"] = to_string(r.method);
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  j["n_steps"] = r.n_steps;
  j["seed"] = r.seed;
  if (!r.trace.empty()) j["trace"] = r.trace;
  open_out(path) << j.dump(2) << '\n';
}

TestResult read_test_result_json(const std::string& path) {
  json j;
  open_in(path) >> j;
  TestResult r;
  const std::string method = j.at("method").get<std::string>();
  if (method == "two_sample") r.method = TestMethod::two_sample;
  else if (method == "t_anova") r.method = TestMethod::t_anova;
  else if (method == "permanova") r.method = TestMethod::permanova;
  else throw std::runtime_error("unknown test method: " + method);
  r.statistic = j.at("statistic").get<double>();
  r.p_value = j.at("p_value").get<double>();
  r.n_steps = j.at("n_steps").get<long>();
  r.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("trace")) r.trace = j.at("trace").get<std::vector<double>>();
  return r;
}

AtlasLabels read_atlas_json(const std::string& path) {
  json j;
  open_in(path) >> j;
  AtlasLabels atlas;
  atlas.node_names = j.at("nodes").get<std::vector<std::string>>();
  atlas.lobe.assign(atlas.node_names.size(), -1);

  const json& lobes = j.at("lobe");
  std::map<std::string, int> name_ids;
  for (const auto& [key, value] : lobes.items())
    if (value.is_string()) name_ids.emplace(value.get<std::string>(), 0);
  int next_id = 0;
  for (auto& [name, id] : name_ids) id = next_id++;

  for (const auto& [key, value] : lobes.items()) {
    const int node = std::stoi(key);
    if (node < 0 || node >= atlas.size())
      throw std::runtime_error(path + ": lobe map index out of range");
    atlas.lobe[static_cast<std::size_t>(node)] =
        value.is_string() ? name_ids.at(value.get<std::string>()) : value.get<int>();
  }
  atlas.language_rois = j.at("language_rois").get<std::vector<int>>();
  atlas.validate();
  return atlas;
}

void write_atlas_json(const std::string& path, const AtlasLabels& atlas) {
  json j;
  j["nodes"] = atlas.node_names;
  json lobes = json::object();
  for (std::size_t i = 0; i < atlas.lobe.size(); ++i)
    if (atlas.lobe[i] >= 0) lobes[std::to_string(i)] = atlas.lobe[i];
  j["lobe"] = lobes;
  j["language_rois"] = atlas.language_rois;
  open_out(path) << j.dump(2) << '\n';
}

void write_polygon_csv(const std::string& path,
                       const std::vector<PolygonRecord>& records) {
  std::ofstream out = open_out(path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "subject,loop,birth,death,class\n";
  for (const auto& r : records) {
    out << r.subject_id << ',';
    for (std::size_t i = 0; i < r.loop.size(); ++i) {
      if (i) out << ';';
      out << r.loop[i];
    }
    out << ',' << r.birth << ',' << r.death << ',' << to_string(r.lk_class) << '\n';
  }
}

}  // namespace topoinfer
