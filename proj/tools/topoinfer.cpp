// topoinfer command line: persistence diagrams, transposition tests,
// simulation experiments and the TLSM pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topoinfer/experiment.hpp"
#include "topoinfer/hk.hpp"
#include "topoinfer/inference.hpp"
#include "topoinfer/io.hpp"
#include "topoinfer/ph.hpp"
#include "topoinfer/tlsm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace topoinfer;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string out_stem(const std::string& out) {
  const std::string suffix = ".json";
  if (out.size() > suffix.size() &&
      out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out.substr(0, out.size() - suffix.size());
  return out;
}

// Group file: either a JSON array of diagram objects, or a newline list of
// diagram-file paths resolved relative to the list file.
std::vector<PersistenceDiagram> load_diagram_group(const std::string& path, int dim) {
  std::ifstream probe(path);
  if (!probe) throw std::runtime_error("cannot open group file: " + path);
  char first = 0;
  probe >> std::ws >> first;
  probe.close();

  std::vector<std::vector<PersistenceDiagram>> files;
  if (first == '[' || first == '{') {
    for (const auto& d : read_diagrams_json(path)) files.push_back({d});
  } else {
    std::ifstream in(path);
    std::string line;
    const fs::path base = fs::path(path).parent_path();
    while (std::getline(in, line)) {
      const auto a = line.find_first_not_of(" \t\r");
      if (a == std::string::npos) continue;
      const auto b = line.find_last_not_of(" \t\r");
      fs::path entry(line.substr(a, b - a + 1));
      if (entry.is_relative()) entry = base / entry;
      files.push_back(read_diagrams_json(entry.string()));
    }
  }
  std::vector<PersistenceDiagram> group;
  for (const auto& diagrams : files) {
    bool found = false;
    for (const auto& d : diagrams)
      if (d.dim == dim) {
        group.push_back(d);
        found = true;
        break;
      }
    if (!found)
      throw std::runtime_error(path + ": a diagram entry has no dim-" +
                               std::to_string(dim) + " diagram");
  }
  if (group.empty()) throw std::runtime_error(path + ": empty group");
  return group;
}

std::vector<std::string> load_path_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open list file: " + path);
  const fs::path base = fs::path(path).parent_path();
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const auto b = line.find_last_not_of(" \t\r");
    fs::path entry(line.substr(a, b - a + 1));
    if (entry.is_relative()) entry = base / entry;
    out.push_back(entry.string());
  }
  if (out.empty()) throw std::runtime_error(path + ": empty list");
  return out;
}

TestOptions options_from_config(const json& cfg) {
  TestOptions opt;
  opt.sigma = cfg.value("sigma", 10.0);
  opt.order = cfg.value("order", 10);
  opt.n_steps = cfg.value("steps", 100000L);
  opt.relabel_period = cfg.value("relabel_period", 500L);
  opt.seed = cfg.value("seed", 0ULL);
  opt.record_trace = cfg.value("trace", false);
  return opt;
}

// Tracks artifacts so a failing stage leaves no partial outputs behind.
struct RunContext {
  std::string stage = "startup";
  std::vector<std::string> artifacts;

  void wrote(const std::string& path) { artifacts.push_back(path); }
  void cleanup() {
    for (const auto& p : artifacts) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }
};

void write_manifest(const json& cfg, RunContext& ctx) {
  json manifest;
  manifest["tool"] = "topoinfer";
  manifest["version"] = kVersion;
  manifest["config"] = cfg;
  const std::string path = out_stem(cfg.at("out").get<std::string>()) + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << manifest.dump(2) << '\n';
  ctx.wrote(path);
}

void run_pd(const json& cfg, RunContext& ctx) {
  ctx.stage = "input";
  const std::string input = cfg.at("input").get<std::string>();
  const int dim = cfg.value("dim", 1);
  Matrix dm;
  if (cfg.value("matrix", false)) {
    dm = convert_similarity(
        read_matrix_csv(input),
        similarity_mode_from_string(cfg.value("similarity_mode", std::string("dissimilarity"))));
  } else {
    dm = pairwise_distances(read_point_cloud_csv(input));
  }

  ctx.stage = "persistence";
  std::vector<PersistenceDiagram> diagrams = rips_persistence(dm, dim);
  if (cfg.value("representatives", false) && dim >= 1) {
    auto& h1 = diagrams[1];
    h1.representatives.emplace();
    for (const auto& pair : h1.pairs)
      h1.representatives->push_back(representative_cycle(dm, pair));
  }

  ctx.stage = "output";
  const std::string out = cfg.at("out").get<std::string>();
  write_diagrams_json(out, diagrams);
  ctx.wrote(out);

  const int grid = cfg.value("grid", 0);
  if (grid > 1) {
    ctx.stage = "hk-grid";
    const auto sigmas = cfg.value("grid_sigmas", std::vector<double>{0.0, 0.1, 1.0, 10.0});
    const PersistenceDiagram& top = diagrams[static_cast<std::size_t>(dim)];
    const Standardizer s = fit_standardizer({top});
    const TriangleBasis basis(cfg.value("order", 10));
    const HKVector v = hk_coefficients(s.standardize(top), basis);

    json g;
    g["dim"] = dim;
    g["grid"] = grid;
    g["lo"] = s.lo;
    g["hi"] = s.hi;
    g["sigmas"] = sigmas;
    json points = json::array();
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < grid; ++i)
      for (int j = i; j < grid; ++j) {
        const double x = static_cast<double>(i) / (grid - 1);
        const double y = static_cast<double>(j) / (grid - 1);
        pts.emplace_back(x, y);
        points.push_back({x, y});
      }
    g["points"] = points;
    json values = json::array();
    for (double sigma : sigmas) {
      json row = json::array();
      for (const auto& [x, y] : pts) row.push_back(hk_evaluate(v, basis, sigma, x, y));
      values.push_back(row);
    }
    g["values"] = values;
    const std::string grid_path = out_stem(out) + "_hk.json";
    std::ofstream gout(grid_path);
    if (!gout) throw std::runtime_error("cannot write file: " + grid_path);
    gout << g.dump(2) << '\n';
    ctx.wrote(grid_path);
  }
}

void run_test(const json& cfg, RunContext& ctx) {
  ctx.stage = "input";
  const std::string command = cfg.at("command").get<std::string>();
  const int dim = cfg.value("dim", 1);
  std::vector<std::vector<PersistenceDiagram>> groups;
  for (const auto& g : cfg.at("groups"))
    groups.push_back(load_diagram_group(g.get<std::string>(), dim));

  ctx.stage = "test";
  const TestOptions opt = options_from_config(cfg);
  TestResult res;
  if (command == "test2") {
    if (groups.size() != 2) throw std::runtime_error("test2 needs exactly 2 groups");
    res = two_sample_test(groups[0], groups[1], opt);
  } else if (command == "anova") {
    res = t_anova_test(groups, opt);
  } else {
    res = permanova_test(groups, opt);
  }

  ctx.stage = "output";
  const std::string out = cfg.at("out").get<std::string>();
  write_test_result_json(out, res);
  ctx.wrote(out);
  std::printf("%s p=%.6g statistic=%.6g steps=%ld seed=%llu\n",
              to_string(res.method).c_str(), res.p_value, res.statistic,
              res.n_steps, static_cast<unsigned long long>(res.seed));
}

void run_simulate(const json& cfg, RunContext& ctx) {
  ctx.stage = "spec";
  ExperimentSpec spec = load_experiment_spec(cfg.at("spec").get<std::string>());
  if (cfg.contains("steps")) spec.steps = cfg.at("steps").get<long>();
  if (cfg.contains("seed")) spec.seed = cfg.at("seed").get<std::uint64_t>();

  ctx.stage = "simulate";
  const ExperimentResult result = run_experiment(spec, cfg.value("threads", 0));

  ctx.stage = "output";
  const std::string out = cfg.at("out").get<std::string>();
  write_experiment_result_json(out, result);
  ctx.wrote(out);
  std::fputs(summary_table(result).c_str(), stdout);
}

void run_tlsm(const json& cfg, RunContext& ctx) {
  ctx.stage = "input";
  const AtlasLabels atlas = read_atlas_json(cfg.at("atlas").get<std::string>());
  const LKClass filter = lk_class_from_string(cfg.value("class_filter", std::string("LK1")));
  const int k = cfg.value("k", 4);

  std::vector<TlsmFeatures> cohorts;
  for (const auto& g : cfg.at("groups")) {
    const auto paths = load_path_list(g.get<std::string>());
    std::vector<DissimilarityMatrix> networks;
    std::vector<std::string> ids;
    const SimilarityMode mode = similarity_mode_from_string(
        cfg.value("similarity_mode", std::string("dissimilarity")));
    for (const auto& p : paths) {
      networks.push_back(convert_similarity(read_matrix_csv(p), mode));
      ids.push_back(fs::path(p).stem().string());
    }
    ctx.stage = "extract";
    cohorts.push_back(extract_tlsm_features(networks, ids, atlas, filter, k));
    ctx.stage = "input";
  }

  ctx.stage = "test";
  const TestOptions opt = options_from_config(cfg);
  TestResult res = cohorts.size() == 2 ? tlsm_compare(cohorts[0], cohorts[1], opt)
                                       : tlsm_compare_multi(cohorts, opt);

  ctx.stage = "output";
  const std::string out = cfg.at("out").get<std::string>();
  write_test_result_json(out, res);
  ctx.wrote(out);

  std::vector<PolygonRecord> records;
  json drops = json::array();
  for (std::size_t i = 0; i < cohorts.size(); ++i) {
    records.insert(records.end(), cohorts[i].records.begin(), cohorts[i].records.end());
    json d;
    d["group"] = i + 1;
    d["kept"] = cohorts[i].subject_ids;
    d["dropped"] = cohorts[i].dropped;
    drops.push_back(d);
  }
  const std::string poly_path = out_stem(out) + "_polygons.csv";
  write_polygon_csv(poly_path, records);
  ctx.wrote(poly_path);
  const std::string drops_path = out_stem(out) + "_drops.json";
  std::ofstream dout(drops_path);
  if (!dout) throw std::runtime_error("cannot write file: " + drops_path);
  dout << drops.dump(2) << '\n';
  ctx.wrote(drops_path);
  std::printf("%s p=%.6g statistic=%.6g\n", to_string(res.method).c_str(),
              res.p_value, res.statistic);
}

int run_from_config(const json& cfg) {
  RunContext ctx;
  try {
    write_manifest(cfg, ctx);
    const std::string command = cfg.at("command").get<std::string>();
    if (command == "pd") run_pd(cfg, ctx);
    else if (command == "test2" || command == "anova" || command == "permanova")
      run_test(cfg, ctx);
    else if (command == "simulate") run_simulate(cfg, ctx);
    else if (command == "tlsm") run_tlsm(cfg, ctx);
    else throw std::runtime_error("unknown command: " + command);
    return 0;
  } catch (const std::exception& e) {
    ctx.cleanup();
    std::fprintf(stderr, "topoinfer: error in %s: %s\n", ctx.stage.c_str(), e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistence diagrams, heat-kernel vectorization and "
               "transposition-based topological inference"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // shared option state
  double sigma = 10.0;
  int order = 10;
  long steps = 100000;
  long relabel_period = 500;
  std::uint64_t seed = 0;
  int dim = 1;
  std::string similarity_mode = "dissimilarity";
  std::string out = "out.json";
  bool trace = false;

  auto add_common = [&](CLI::App* cmd, bool with_test_opts) {
    cmd->add_option("--out", out, "Output JSON path");
    cmd->add_option("--seed", seed, "RNG seed");
    if (with_test_opts) {
      cmd->add_option("--sigma", sigma, "Heat-kernel bandwidth");
      cmd->add_option("--order", order, "Basis order M");
      cmd->add_option("--steps", steps, "Transpositions (or relabelings)");
      cmd->add_option("--relabel-period", relabel_period, "Full relabel period");
      cmd->add_flag("--trace", trace, "Record the per-step statistic");
    }
  };

  // pd
  std::string input;
  bool as_matrix = false, representatives = false;
  int grid = 0;
  std::vector<double> grid_sigmas{0.0, 0.1, 1.0, 10.0};
  CLI::App* pd = app.add_subcommand("pd", "Persistence diagram of a point cloud or matrix");
  pd->add_option("--input", input, "Point cloud CSV (or matrix CSV with --matrix)")->required();
  pd->add_flag("--matrix", as_matrix, "Input is a square dissimilarity/similarity matrix");
  pd->add_option("--similarity-mode", similarity_mode, "dissimilarity | one_minus_abs");
  pd->add_option("--dim", dim, "Max homology dimension (0 or 1)");
  pd->add_flag("--representatives", representatives, "Attach representative 1-cycles");
  pd->add_option("--grid", grid, "Emit HK-estimate samples on a G x G triangle grid");
  pd->add_option("--grid-sigmas", grid_sigmas, "Bandwidths for the HK grid");
  pd->add_option("--order", order, "Basis order M for the HK grid");
  add_common(pd, false);

  // test2 / anova / permanova
  std::vector<std::string> groups;
  CLI::App* test2 = app.add_subcommand("test2", "Two-sample spectral transposition test");
  test2->add_option("--group-a", groups, "Group A diagram list")->required();
  test2->add_option("--group-b", groups, "Group B diagram list")->required();
  test2->add_option("--dim", dim, "Diagram dimension to test");
  add_common(test2, true);

  CLI::App* anova = app.add_subcommand("anova", "Multi-group T-ANOVA via transpositions");
  anova->add_option("--group", groups, "Diagram list, repeat per group")->required();
  anova->add_option("--dim", dim, "Diagram dimension to test");
  add_common(anova, true);

  CLI::App* permanova = app.add_subcommand("permanova", "PERMANOVA baseline");
  permanova->add_option("--group", groups, "Diagram list, repeat per group")->required();
  permanova->add_option("--dim", dim, "Diagram dimension to test");
  add_common(permanova, true);

  // simulate
  std::string spec_path;
  int threads = 0;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a declarative experiment spec");
  simulate->add_option("--spec", spec_path, "Experiment spec JSON")->required();
  simulate->add_option("--threads", threads, "Replicate threads (default: env/cores)");
  add_common(simulate, false);

  // tlsm
  std::string atlas_path, class_filter = "LK1";
  int polygon_k = 4;
  CLI::App* tlsm = app.add_subcommand("tlsm", "Topological lesion-symptom mapping");
  tlsm->add_option("--atlas", atlas_path, "Atlas JSON")->required();
  tlsm->add_option("--group", groups, "Network CSV list, repeat per group")->required();
  tlsm->add_option("--class-filter", class_filter, "LK | LK1 | LK2");
  tlsm->add_option("--k", polygon_k, "Polygon order K");
  tlsm->add_option("--similarity-mode", similarity_mode, "dissimilarity | one_minus_abs");
  add_common(tlsm, true);

  // rerun
  std::string manifest_path;
  CLI::App* rerun = app.add_subcommand("rerun", "Re-execute a run from its manifest");
  rerun->add_option("manifest", manifest_path, "Manifest JSON")->required();

  CLI11_PARSE(app, argc, argv);

  json cfg;
  cfg["sigma"] = sigma;
  cfg["order"] = order;
  cfg["steps"] = steps;
  cfg["relabel_period"] = relabel_period;
  cfg["seed"] = seed;
  cfg["dim"] = dim;
  cfg["similarity_mode"] = similarity_mode;
  cfg["out"] = out;
  cfg["trace"] = trace;

  if (pd->parsed()) {
    cfg["command"] = "pd";
    cfg["input"] = input;
    cfg["matrix"] = as_matrix;
    cfg["representatives"] = representatives;
    cfg["grid"] = grid;
    cfg["grid_sigmas"] = grid_sigmas;
  } else if (test2->parsed() || anova->parsed() || permanova->parsed()) {
    cfg["command"] = test2->parsed() ? "test2" : (anova->parsed() ? "anova" : "permanova");
    cfg["groups"] = groups;
  } else if (simulate->parsed()) {
    cfg["command"] = "simulate";
    cfg["spec"] = spec_path;
    cfg["threads"] = threads;
  } else if (tlsm->parsed()) {
    cfg["command"] = "tlsm";
    cfg["atlas"] = atlas_path;
    cfg["class_filter"] = class_filter;
    cfg["k"] = polygon_k;
    cfg["groups"] = groups;
  } else if (rerun->parsed()) {
    try {
      json manifest;
      std::ifstream in(manifest_path);
      if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
      in >> manifest;
      cfg = manifest.at("config");
    } catch (const std::exception& e) {
      std::fprintf(stderr, "topoinfer: error in manifest: %s\n", e.what());
      return 1;
    }
  }
  return run_from_config(cfg);
}
