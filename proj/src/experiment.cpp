#include "topoinfer/experiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "topoinfer/parallel.hpp"
#include "topoinfer/ph.hpp"
#include "topoinfer/rng.hpp"
#include "topoinfer/simgen.hpp"
#include "topoinfer/tlsm.hpp"

namespace topoinfer {

namespace {

using nlohmann::json;

NoiseAnchor parse_anchor(const std::string& s) {
  if (s == "none") return NoiseAnchor::none;
  if (s == "TL") return NoiseAnchor::top_left;
  if (s == "TR") return NoiseAnchor::top_right;
  if (s == "BL") return NoiseAnchor::bottom_left;
  if (s == "BR") return NoiseAnchor::bottom_right;
  if (s == "random") return NoiseAnchor::random_anchor;
  throw std::invalid_argument("unknown noise anchor: " + s);
}

KeyholeVariant parse_variant(const std::string& s) {
  if (s == "full") return KeyholeVariant::full;
  if (s == "quarter_TL") return KeyholeVariant::quarter_top_left;
  if (s == "quarter_TR") return KeyholeVariant::quarter_top_right;
  if (s == "quarter_BL") return KeyholeVariant::quarter_bottom_left;
  if (s == "quarter_BR") return KeyholeVariant::quarter_bottom_right;
  if (s == "quarter_random") return KeyholeVariant::quarter_random;
  throw std::invalid_argument("unknown keyhole variant: " + s);
}

TestMethod parse_test(const std::string& s) {
  if (s == "two_sample") return TestMethod::two_sample;
  if (s == "t_anova") return TestMethod::t_anova;
  if (s == "permanova") return TestMethod::permanova;
  throw std::invalid_argument("unknown test: " + s);
}

PersistenceDiagram h1_of_cloud(const PointCloud& cloud) {
  return rips_persistence(pairwise_distances(cloud), 1)[1];
}

PersistenceDiagram h1_of_network(const DissimilarityMatrix& dm) {
  return rips_persistence(dm, 1)[1];
}

// Diagram groups for one replicate. All randomness flows from seeds drawn
// up front from the replicate stream, so the layout of draws is fixed.
std::vector<std::vector<PersistenceDiagram>> generate_groups(
    const ExperimentSpec& spec, RandomGenerator& rng) {
  std::vector<std::vector<PersistenceDiagram>> groups;

  if (spec.kind == GeneratorKind::point_cloud) {
    if (spec.cloud_groups.size() < 2)
      throw std::invalid_argument(spec.name + ": need at least 2 groups");
    for (const CloudGroupSpec& g : spec.cloud_groups) {
      std::vector<std::uint64_t> seeds;
      for (int i = 0; i < g.n; ++i) seeds.push_back(rng.next());
      std::vector<PersistenceDiagram> diagrams(static_cast<std::size_t>(g.n));
      for (int i = 0; i < g.n; ++i) {
        if (g.cloud == "uniform") {
          diagrams[static_cast<std::size_t>(i)] =
              h1_of_cloud(sample_uniform_cloud(spec.n_points, seeds[static_cast<std::size_t>(i)]));
        } else if (g.cloud == "key") {
          KeyShapeSpec key;
          key.key_fraction = g.key_fraction;
          key.noise = parse_anchor(g.noise);
          key.variant = parse_variant(g.variant);
          diagrams[static_cast<std::size_t>(i)] = h1_of_cloud(
              sample_key_cloud(key, spec.n_points, seeds[static_cast<std::size_t>(i)]));
        } else {
          throw std::invalid_argument("unknown cloud kind: " + g.cloud);
        }
      }
      groups.push_back(std::move(diagrams));
    }
    return groups;
  }

  if (spec.kind == GeneratorKind::network) {
    if (spec.network_groups.size() < 2)
      throw std::invalid_argument(spec.name + ": need at least 2 groups");
    const int n_subjects = spec.network_groups.front().n;
    for (const NetworkGroupSpec& g : spec.network_groups)
      if (g.n != n_subjects)
        throw std::invalid_argument("network groups must share base matrices, sizes must match");

    std::vector<std::uint64_t> base_seeds;
    for (int j = 0; j < n_subjects; ++j) base_seeds.push_back(rng.next());
    const auto modules = equal_modules(spec.n_nodes, spec.n_modules);

    for (const NetworkGroupSpec& g : spec.network_groups) {
      LesionSpec lesion;
      lesion.noise_sd = spec.noise_sd;
      for (int c = 0; c < g.lesion_clusters; ++c) {
        if (c >= static_cast<int>(modules.size()) ||
            static_cast<int>(modules[static_cast<std::size_t>(c)].size()) < g.cluster_size)
          throw std::invalid_argument("not enough module nodes for lesion clusters");
        lesion.clusters.emplace_back(
            modules[static_cast<std::size_t>(c)].begin(),
            modules[static_cast<std::size_t>(c)].begin() + g.cluster_size);
      }
      std::vector<std::uint64_t> noise_seeds;
      for (int j = 0; j < n_subjects; ++j) noise_seeds.push_back(rng.next());
      std::vector<PersistenceDiagram> diagrams(static_cast<std::size_t>(n_subjects));
      for (int j = 0; j < n_subjects; ++j) {
        DissimilarityMatrix dm =
            synth_network(spec.n_nodes, modules, base_seeds[static_cast<std::size_t>(j)]);
        if (!lesion.clusters.empty()) dm = apply_lesion(dm, lesion);
        dm = perturb_network(dm, spec.noise_sd, noise_seeds[static_cast<std::size_t>(j)]);
        diagrams[static_cast<std::size_t>(j)] = h1_of_network(dm);
      }
      groups.push_back(std::move(diagrams));
    }
    return groups;
  }

  throw std::logic_error("generate_groups: unsupported generator kind");
}

// TLSM cohorts share planted-loop base networks; the lesion knocks out the
// second loop so lesioned subjects keep one qualifying polygon instead of
// two.
std::vector<TlsmFeatures> generate_tlsm_cohorts(const ExperimentSpec& spec,
                                                RandomGenerator& rng) {
  if (spec.tlsm_groups.size() < 2)
    throw std::invalid_argument(spec.name + ": need at least 2 cohorts");
  const int n_subjects = spec.tlsm_groups.front().n;
  for (const TlsmGroupSpec& g : spec.tlsm_groups)
    if (g.n != n_subjects)
      throw std::invalid_argument("tlsm cohorts must share base networks, sizes must match");

  const AtlasLabels atlas = synthetic_language_atlas(spec.tlsm_extra_nodes);
  // 3 frontal + 1 parietal, and 3 temporal + 1 parietal: both LK1 4-loops
  const std::vector<int> loop_a{0, 1, 2, 12};
  const std::vector<int> loop_b{24, 25, 26, 13};

  std::vector<std::uint64_t> base_seeds;
  for (int j = 0; j < n_subjects; ++j) base_seeds.push_back(rng.next());

  std::vector<TlsmFeatures> cohorts;
  for (std::size_t g = 0; g < spec.tlsm_groups.size(); ++g) {
    std::vector<std::uint64_t> noise_seeds;
    for (int j = 0; j < n_subjects; ++j) noise_seeds.push_back(rng.next());
    std::vector<DissimilarityMatrix> networks;
    std::vector<std::string> ids;
    for (int j = 0; j < n_subjects; ++j) {
      DissimilarityMatrix dm = planted_loop_network(
          atlas.size(), {loop_a, loop_b}, base_seeds[static_cast<std::size_t>(j)]);
      if (spec.tlsm_groups[g].lesion) {
        LesionSpec lesion;
        lesion.clusters.push_back(loop_b);
        dm = apply_lesion(dm, lesion);
      }
      dm = perturb_network(dm, spec.noise_sd, noise_seeds[static_cast<std::size_t>(j)]);
      networks.push_back(std::move(dm));
      ids.push_back("g" + std::to_string(g + 1) + "_s" + std::to_string(j + 1));
    }
    cohorts.push_back(extract_tlsm_features(networks, ids, atlas,
                                            lk_class_from_string(spec.class_filter),
                                            spec.polygon_order));
  }
  return cohorts;
}

TestResult run_one_test(const std::vector<std::vector<PersistenceDiagram>>& groups,
                        TestMethod test, const TestOptions& opt) {
  switch (test) {
    case TestMethod::two_sample:
      if (groups.size() != 2)
        throw std::invalid_argument("two_sample test needs exactly 2 groups");
      return two_sample_test(groups[0], groups[1], opt);
    case TestMethod::t_anova:
      return t_anova_test(groups, opt);
    default:
      return permanova_test(groups, opt);
  }
}

}  // namespace

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment spec: " + path);
  json j;
  in >> j;

  ExperimentSpec spec;
  spec.name = j.value("name", std::string("experiment"));
  const std::string kind = j.value("kind", std::string("point_cloud"));
  if (kind == "point_cloud") spec.kind = GeneratorKind::point_cloud;
  else if (kind == "network") spec.kind = GeneratorKind::network;
  else if (kind == "tlsm") spec.kind = GeneratorKind::tlsm_network;
  else throw std::runtime_error(path + ": unknown generator kind " + kind);

  spec.tests.clear();
  for (const auto& t : j.value("tests", std::vector<std::string>{"two_sample"}))
    spec.tests.push_back(parse_test(t));
  spec.sigmas = j.value("sigmas", std::vector<double>{10.0});
  spec.order = j.value("order", 10);
  spec.steps = j.value("steps", 100000L);
  spec.relabel_period = j.value("relabel_period", 500L);
  spec.replicates = j.value("replicates", 20);
  spec.seed = j.value("seed", 0ULL);
  spec.alpha = j.value("alpha", 0.05);
  spec.n_points = j.value("n_points", 100);
  spec.n_nodes = j.value("n_nodes", 96);
  spec.n_modules = j.value("modules", 8);
  spec.noise_sd = j.value("noise_sd", 0.0001);
  spec.tlsm_extra_nodes = j.value("extra_nodes", 24);
  spec.class_filter = j.value("class_filter", std::string("LK1"));
  spec.polygon_order = j.value("polygon_order", 4);

  for (const auto& g : j.at("groups")) {
    if (spec.kind == GeneratorKind::point_cloud) {
      CloudGroupSpec c;
      c.n = g.at("n").get<int>();
      c.cloud = g.value("cloud", std::string("uniform"));
      c.key_fraction = g.value("key_fraction", 1.0);
      c.noise = g.value("noise", std::string("none"));
      c.variant = g.value("variant", std::string("full"));
      spec.cloud_groups.push_back(c);
    } else if (spec.kind == GeneratorKind::network) {
      NetworkGroupSpec n;
      n.n = g.at("n").get<int>();
      n.lesion_clusters = g.value("lesion_clusters", 0);
      n.cluster_size = g.value("cluster_size", 4);
      spec.network_groups.push_back(n);
    } else {
      TlsmGroupSpec t;
      t.n = g.at("n").get<int>();
      t.lesion = g.value("lesion", false);
      spec.tlsm_groups.push_back(t);
    }
  }
  return spec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int threads) {
  if (spec.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (spec.tests.empty() || spec.sigmas.empty())
    throw std::invalid_argument("need at least one test and one sigma");

  const std::size_t n_runs = spec.tests.size() * spec.sigmas.size();
  std::vector<std::vector<double>> p_values(
      n_runs, std::vector<double>(static_cast<std::size_t>(spec.replicates), 0.0));

  parallel_for(spec.replicates, [&](int rep) {
    RandomGenerator rng(spec.seed + static_cast<std::uint64_t>(rep));

    std::vector<std::vector<PersistenceDiagram>> groups;
    std::vector<TlsmFeatures> cohorts;
    if (spec.kind == GeneratorKind::tlsm_network)
      cohorts = generate_tlsm_cohorts(spec, rng);
    else
      groups = generate_groups(spec, rng);
    const std::uint64_t test_seed = rng.next();

    std::size_t run = 0;
    for (TestMethod test : spec.tests)
      for (double sigma : spec.sigmas) {
        TestOptions opt;
        opt.sigma = sigma;
        opt.order = spec.order;
        opt.n_steps = spec.steps;
        opt.relabel_period = spec.relabel_period;
        opt.seed = test_seed;
        TestResult res;
        if (spec.kind == GeneratorKind::tlsm_network) {
          if (test == TestMethod::two_sample && cohorts.size() == 2)
            res = tlsm_compare(cohorts[0], cohorts[1], opt);
          else
            res = tlsm_compare_multi(cohorts, opt);
        } else {
          res = run_one_test(groups, test, opt);
        }
        p_values[run++][static_cast<std::size_t>(rep)] = res.p_value;
      }
  }, threads);

  ExperimentResult result;
  result.spec = spec;
  std::size_t run = 0;
  for (TestMethod test : spec.tests)
    for (double sigma : spec.sigmas) {
      RunSummary s;
      s.test = test;
      s.sigma = sigma;
      s.p_values = p_values[run++];
      double sum = 0.0;
      int rejected = 0;
      for (double p : s.p_values) {
        sum += p;
        if (p < spec.alpha) ++rejected;
      }
      s.mean_p = sum / static_cast<double>(s.p_values.size());
      double var = 0.0;
      for (double p : s.p_values) var += (p - s.mean_p) * (p - s.mean_p);
      s.sd_p = s.p_values.size() > 1
                   ? std::sqrt(var / static_cast<double>(s.p_values.size() - 1))
                   : 0.0;
      s.rejection_rate = static_cast<double>(rejected) /
                         static_cast<double>(s.p_values.size());
      result.runs.push_back(std::move(s));
    }
  return result;
}

void write_experiment_result_json(const std::string& path,
                                  const ExperimentResult& result) {
  json j;
  j["name"] = result.spec.name;
  j["replicates"] = result.spec.replicates;
  j["seed"] = result.spec.seed;
  j["steps"] = result.spec.steps;
  j["order"] = result.spec.order;
  j["alpha"] = result.spec.alpha;
  j["runs"] = json::array();
  for (const RunSummary& s : result.runs) {
    json r;
    r["test"] = to_string(s.test);
    r["sigma"] = s.sigma;
    r["mean_p"] = s.mean_p;
    r["sd_p"] = s.sd_p;
    r["rejection_rate"] = s.rejection_rate;
    r["p_values"] = s.p_values;
    j["runs"].push_back(r);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

std::string summary_table(const ExperimentResult& result) {
  std::ostringstream os;
  for (const RunSummary& s : result.runs) {
    char line[256];
    std::snprintf(line, sizeof(line),
                  "%-24s %-10s sigma=%-6g mean_p=%.4f sd=%.4f reject@%.2f=%.2f",
                  result.spec.name.c_str(), to_string(s.test).c_str(), s.sigma,
                  s.mean_p, s.sd_p, result.spec.alpha, s.rejection_rate);
    os << line << '\n';
  }
  return os.str();
}

}  // namespace topoinfer
