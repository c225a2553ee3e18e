#pragma once

#include <vector>

#include "topoinfer/hk.hpp"
#include "topoinfer/rng.hpp"
#include "topoinfer/types.hpp"

namespace topoinfer {

struct TestOptions {
  double sigma = 10.0;
  int order = 10;
  long n_steps = 100000;
  long relabel_period = 500;
  std::uint64_t seed = 0;
  bool record_trace = false;
};

/// (1 + #{permuted >= observed}) / (1 + #permuted); ties count, so the
/// p-value is always in (0, 1].
double permutation_p_value(double observed, const std::vector<double>& permuted);

/// Coefficient rows of a group of standardized diagrams, one subject per row.
Matrix coefficient_rows(const std::vector<PersistenceDiagram>& standardized,
                        const TriangleBasis& basis);

/// Matrix of squared weighted L2 distances between coefficient rows.
Matrix pairwise_hk_distance2(const Eigen::Ref<const Matrix>& rows,
                             const Eigen::Ref<const Vector>& weights);

/// Two-group coefficient state with incrementally maintained means.
/// A transposition swaps one subject per group and updates the means in
/// O(#modes), independent of the group sizes.
class TwoSampleState {
 public:
  TwoSampleState(Matrix coeffs_x, Matrix coeffs_y, Vector weights);

  int group1_size() const { return m_; }
  int group2_size() const { return n_; }

  /// sum_k w_k (mean_x[k] - mean_y[k])^2 from the maintained means.
  double statistic() const;

  /// Swaps the i-th subject of group 1 with the j-th of group 2 and
  /// returns the updated statistic.
  double transpose(int i, int j);

  /// Uniform relabeling preserving group sizes; means are recomputed from
  /// scratch to cap floating-point drift.
  void relabel(RandomGenerator& rng);

  void recompute_means();

  const Vector& mean_x() const { return mean_x_; }
  const Vector& mean_y() const { return mean_y_; }
  const Matrix& rows() const { return rows_; }
  const std::vector<int>& members(int group) const { return members_[group]; }

 private:
  Matrix rows_;  // pooled, group 1 rows first
  Vector weights_;
  int m_, n_;
  std::vector<int> members_[2];
  Vector mean_x_, mean_y_;
};

/// K-group state over precomputed squared pairwise distances, maintaining
/// the between/within sums TSSB and TSSW under transpositions in O(N).
class AnovaState {
 public:
  AnovaState(Matrix dist2, std::vector<int> labels, int n_groups);

  int n_subjects() const { return static_cast<int>(labels_.size()); }
  int n_groups() const { return static_cast<int>(members_.size()); }
  int group_size(int g) const { return static_cast<int>(members_[g].size()); }

  double tssb() const { return tssb_; }
  double tssw() const { return tssw_; }

  /// TSSB / TSSW. Throws std::domain_error when TSSW == 0.
  double ratio() const;

  /// Ratio with +inf instead of a throw, for walk steps.
  double ratio_or_inf() const;

  /// Swaps the j1-th member of group g1 with the j2-th member of group g2
  /// and returns the updated ratio (+inf if TSSW hits 0).
  double transpose(int g1, int j1, int g2, int j2);

  /// Uniform relabeling preserving group sizes, with a from-scratch
  /// recomputation of the sums.
  void relabel(RandomGenerator& rng);

  void recompute();

  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& members(int g) const { return members_[g]; }
  const Matrix& dist2() const { return dist2_; }

 private:
  Matrix dist2_;
  std::vector<int> labels_;
  std::vector<std::vector<int>> members_;
  double tssb_ = 0.0, tssw_ = 0.0;
};

/// PERMANOVA pseudo-F on a squared distance matrix:
///   SST = (1/N) sum_{i<j} d2, SSW = sum_g (1/n_g) sum_{i<j in g} d2,
///   F = [ (SST - SSW) / (K-1) ] / [ SSW / (N-K) ].
/// Throws std::domain_error when SSW == 0 or N == K.
double permanova_pseudo_f(const Eigen::Ref<const Matrix>& dist2,
                          const std::vector<int>& labels, int n_groups);

/// Spectral transposition test between two groups of persistence diagrams.
/// The pooled set is standardized once, the observed statistic is taken on
/// the true labels, and the walk performs n_steps transpositions with a
/// full relabeling every relabel_period steps. Deterministic given the
/// seed; invariant to the order of groups and of subjects within groups.
TestResult two_sample_test(const std::vector<PersistenceDiagram>& group_a,
                           const std::vector<PersistenceDiagram>& group_b,
                           const TestOptions& opt);

/// Multi-group T-ANOVA on the ratio TSSB/TSSW via transpositions; the two
/// groups of each step are sampled proportionally to their sizes.
TestResult t_anova_test(
    const std::vector<std::vector<PersistenceDiagram>>& groups,
    const TestOptions& opt);

/// PERMANOVA baseline on the same squared HK distances; n_steps counts full
/// uniform relabelings.
TestResult permanova_test(
    const std::vector<std::vector<PersistenceDiagram>>& groups,
    const TestOptions& opt);

}  // namespace topoinfer
