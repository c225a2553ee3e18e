#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace topoinfer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// N x d matrix, one point per row.
using PointCloud = Eigen::MatrixXd;

/// N x N symmetric nonnegative matrix with zero diagonal.
using DissimilarityMatrix = Eigen::MatrixXd;

struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;
  double persistence() const { return death - birth; }
};

/// Finite (birth, death) pairs of a single homology dimension. Dim-1 pairs
/// may carry representative loops (node-index cycles) aligned with `pairs`.
struct PersistenceDiagram {
  int dim = 0;
  std::vector<PersistencePair> pairs;
  std::optional<std::vector<std::vector<int>>> representatives;

  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }
};

enum class TestMethod { two_sample, t_anova, permanova };

std::string to_string(TestMethod m);

struct TestResult {
  TestMethod method = TestMethod::two_sample;
  double statistic = 0.0;
  double p_value = 1.0;
  long n_steps = 0;
  std::uint64_t seed = 0;
  /// Per-step permuted statistic, filled only when tracing is requested.
  std::vector<double> trace;
};

}  // namespace topoinfer
