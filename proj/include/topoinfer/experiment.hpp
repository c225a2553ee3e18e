#pragma once

#include <string>
#include <vector>

#include "topoinfer/inference.hpp"
#include "topoinfer/types.hpp"

namespace topoinfer {

enum class GeneratorKind { point_cloud, network, tlsm_network };

struct CloudGroupSpec {
  int n = 5;
  std::string cloud = "uniform";  // "uniform" | "key"
  double key_fraction = 1.0;
  std::string noise = "none";    // "none"|"TL"|"TR"|"BL"|"BR"|"random"
  std::string variant = "full";  // "full"|"quarter_TL"|...|"quarter_random"
};

struct NetworkGroupSpec {
  int n = 10;
  int lesion_clusters = 0;  // knock out this many clusters...
  int cluster_size = 4;     // ...of this many nodes (taken from module fronts)
};

struct TlsmGroupSpec {
  int n = 10;
  bool lesion = false;  // knock out the second planted loop's nodes
};

/// Declarative simulation experiment: a generator, group layout, the tests
/// to run and the bandwidths to run them at. Each replicate regenerates
/// data with seed + replicate_index and runs every (test, sigma) combination
/// on the same diagrams.
struct ExperimentSpec {
  std::string name;
  GeneratorKind kind = GeneratorKind::point_cloud;
  std::vector<TestMethod> tests{TestMethod::two_sample};
  std::vector<double> sigmas{10.0};
  int order = 10;
  long steps = 100000;
  long relabel_period = 500;
  int replicates = 20;
  std::uint64_t seed = 0;
  double alpha = 0.05;

  // point_cloud
  int n_points = 100;
  std::vector<CloudGroupSpec> cloud_groups;

  // network: groups share base networks index-wise, so group sizes match
  int n_nodes = 96;
  int n_modules = 8;
  double noise_sd = 0.0001;
  std::vector<NetworkGroupSpec> network_groups;

  // tlsm_network
  int tlsm_extra_nodes = 24;
  std::string class_filter = "LK1";
  int polygon_order = 4;
  std::vector<TlsmGroupSpec> tlsm_groups;
};

struct RunSummary {
  TestMethod test = TestMethod::two_sample;
  double sigma = 10.0;
  std::vector<double> p_values;  // ordered by replicate index
  double mean_p = 0.0;
  double sd_p = 0.0;
  double rejection_rate = 0.0;  // fraction with p < alpha
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<RunSummary> runs;  // one per (test, sigma), in declared order
};

ExperimentSpec load_experiment_spec(const std::string& path);
void write_experiment_result_json(const std::string& path,
                                  const ExperimentResult& result);

/// Runs all replicates (parallel across replicates, deterministic output)
/// and summarizes mean/sd/rejection-rate per (test, sigma).
ExperimentResult run_experiment(const ExperimentSpec& spec, int threads = 0);

/// One printable line per (test, sigma), in the orientation of the paper's
/// tables: mean p, sd, rejection rate at alpha.
std::string summary_table(const ExperimentResult& result);

}  // namespace topoinfer
