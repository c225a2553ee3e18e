#include "topoinfer/inference.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace topoinfer {

namespace {

int lex_compare_rows(const Matrix& a, int i, const Matrix& b, int j) {
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    if (a(i, k) < b(j, k)) return -1;
    if (a(i, k) > b(j, k)) return 1;
  }
  return 0;
}

// Subjects sorted by coefficient content. Makes every walk independent of
// the order diagrams were supplied in (equal rows are interchangeable).
Matrix canonical_rows(const Matrix& rows) {
  std::vector<int> idx(static_cast<std::size_t>(rows.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return lex_compare_rows(rows, a, rows, b) < 0;
  });
  Matrix out(rows.rows(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.row(i) = rows.row(idx[static_cast<std::size_t>(i)]);
  return out;
}

int lex_compare_matrices(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows() ? -1 : 1;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const int c = lex_compare_rows(a, static_cast<int>(i), b, static_cast<int>(i));
    if (c != 0) return c;
  }
  return 0;
}

struct PreparedGroups {
  TriangleBasis basis;
  Vector weights;
  std::vector<Matrix> rows;  // canonical order, one matrix per group
};

PreparedGroups prepare_groups(
    const std::vector<std::vector<PersistenceDiagram>>& groups,
    const TestOptions& opt) {
  if (groups.size() < 2) throw std::invalid_argument("need at least 2 groups");
  for (const auto& g : groups)
    if (g.empty()) throw std::invalid_argument("every group must be nonempty");
  if (opt.n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");

  std::vector<PersistenceDiagram> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  const Standardizer s = fit_standardizer(pooled);

  PreparedGroups prep{TriangleBasis(opt.order), Vector(), {}};
  prep.weights = prep.basis.attenuation(opt.sigma);
  for (const auto& g : groups)
    prep.rows.push_back(canonical_rows(
        coefficient_rows(standardize_all(g, s), prep.basis)));
  std::sort(prep.rows.begin(), prep.rows.end(),
            [](const Matrix& a, const Matrix& b) {
              return lex_compare_matrices(a, b) < 0;
            });
  return prep;
}

}  // namespace

double permutation_p_value(double observed,
                           const std::vector<double>& permuted) {
  std::size_t count = 0;
  for (double s : permuted)
    if (s >= observed) ++count;
  return static_cast<double>(1 + count) / static_cast<double>(1 + permuted.size());
}

Matrix coefficient_rows(const std::vector<PersistenceDiagram>& standardized,
                        const TriangleBasis& basis) {
  Matrix rows(static_cast<Eigen::Index>(standardized.size()), basis.size());
  for (std::size_t i = 0; i < standardized.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) =
        hk_coefficients(standardized[i], basis).coeffs.transpose();
  return rows;
}

Matrix pairwise_hk_distance2(const Eigen::Ref<const Matrix>& rows,
                             const Eigen::Ref<const Vector>& weights) {
  // scale by sqrt(w): weighted squared distances become plain squared
  // Euclidean distances of the scaled rows
  const Matrix scaled = rows.array().rowwise() *
                        weights.transpose().array().sqrt();
  const Eigen::Index n = scaled.rows();
  Matrix d2 = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (scaled.row(i) - scaled.row(j)).squaredNorm();
      d2(i, j) = d;
      d2(j, i) = d;
    }
  return d2;
}

TwoSampleState::TwoSampleState(Matrix coeffs_x, Matrix coeffs_y, Vector weights)
    : weights_(std::move(weights)),
      m_(static_cast<int>(coeffs_x.rows())),
      n_(static_cast<int>(coeffs_y.rows())) {
  if (m_ < 1 || n_ < 1) throw std::invalid_argument("both groups must be nonempty");
  if (coeffs_x.cols() != coeffs_y.cols() || coeffs_x.cols() != weights_.size())
    throw std::invalid_argument("coefficient dimensions do not match weights");
  rows_.resize(m_ + n_, coeffs_x.cols());
  rows_.topRows(m_) = coeffs_x;
  rows_.bottomRows(n_) = coeffs_y;
  members_[0].resize(static_cast<std::size_t>(m_));
  members_[1].resize(static_cast<std::size_t>(n_));
  std::iota(members_[0].begin(), members_[0].end(), 0);
  std::iota(members_[1].begin(), members_[1].end(), m_);
  recompute_means();
}

void TwoSampleState::recompute_means() {
  mean_x_ = Vector::Zero(rows_.cols());
  mean_y_ = Vector::Zero(rows_.cols());
  for (int r : members_[0]) mean_x_ += rows_.row(r).transpose();
  for (int r : members_[1]) mean_y_ += rows_.row(r).transpose();
  mean_x_ /= m_;
  mean_y_ /= n_;
}

double TwoSampleState::statistic() const {
  return (weights_.array() * (mean_x_ - mean_y_).array().square()).sum();
}

double TwoSampleState::transpose(int i, int j) {
  if (i < 0 || i >= m_ || j < 0 || j >= n_)
    throw std::out_of_range("transposition index out of range");
  const int a = members_[0][static_cast<std::size_t>(i)];
  const int b = members_[1][static_cast<std::size_t>(j)];
  mean_x_ += (rows_.row(b) - rows_.row(a)).transpose() / m_;
  mean_y_ += (rows_.row(a) - rows_.row(b)).transpose() / n_;
  std::swap(members_[0][static_cast<std::size_t>(i)], members_[1][static_cast<std::size_t>(j)]);
  return statistic();
}

void TwoSampleState::relabel(RandomGenerator& rng) {
  std::vector<int> pooled(static_cast<std::size_t>(m_ + n_));
  std::iota(pooled.begin(), pooled.end(), 0);
  rng.shuffle(pooled);
  std::copy(pooled.begin(), pooled.begin() + m_, members_[0].begin());
  std::copy(pooled.begin() + m_, pooled.end(), members_[1].begin());
  recompute_means();
}

AnovaState::AnovaState(Matrix dist2, std::vector<int> labels, int n_groups)
    : dist2_(std::move(dist2)), labels_(std::move(labels)) {
  if (n_groups < 2) throw std::invalid_argument("need at least 2 groups");
  if (dist2_.rows() != dist2_.cols() ||
      dist2_.rows() != static_cast<Eigen::Index>(labels_.size()))
    throw std::invalid_argument("dist2/label sizes do not match");
  members_.resize(static_cast<std::size_t>(n_groups));
  for (std::size_t s = 0; s < labels_.size(); ++s) {
    const int g = labels_[s];
    if (g < 0 || g >= n_groups) throw std::invalid_argument("label out of range");
    members_[static_cast<std::size_t>(g)].push_back(static_cast<int>(s));
  }
  for (const auto& mem : members_)
    if (mem.empty()) throw std::invalid_argument("every group must be nonempty");
  recompute();
}

void AnovaState::recompute() {
  tssb_ = 0.0;
  tssw_ = 0.0;
  const Eigen::Index n = dist2_.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (labels_[static_cast<std::size_t>(i)] == labels_[static_cast<std::size_t>(j)])
        tssw_ += dist2_(i, j);
      else
        tssb_ += dist2_(i, j);
    }
}

double AnovaState::ratio() const {
  if (tssw_ == 0.0)
    throw std::domain_error("TSSW is zero: within-group diagrams are identical");
  return tssb_ / tssw_;
}

double AnovaState::ratio_or_inf() const {
  if (tssw_ <= 0.0) return std::numeric_limits<double>::infinity();
  return tssb_ / tssw_;
}

double AnovaState::transpose(int g1, int j1, int g2, int j2) {
  if (g1 == g2) throw std::invalid_argument("transposition needs two distinct groups");
  if (g1 < 0 || g2 < 0 || g1 >= n_groups() || g2 >= n_groups())
    throw std::out_of_range("group index out of range");
  if (j1 < 0 || j1 >= group_size(g1) || j2 < 0 || j2 >= group_size(g2))
    throw std::out_of_range("subject index out of range");
  const int a = members_[static_cast<std::size_t>(g1)][static_cast<std::size_t>(j1)];
  const int b = members_[static_cast<std::size_t>(g2)][static_cast<std::size_t>(j2)];

  // Only pairs touching the two moved subjects change side; the pair (a, b)
  // itself stays between-group.
  double delta_w = 0.0;
  const Eigen::Index n = dist2_.rows();
  for (Eigen::Index s = 0; s < n; ++s) {
    if (s == a || s == b) continue;
    const int ls = labels_[static_cast<std::size_t>(s)];
    if (ls == g2)
      delta_w += dist2_(a, s) - dist2_(b, s);
    else if (ls == g1)
      delta_w += dist2_(b, s) - dist2_(a, s);
  }
  tssw_ += delta_w;
  tssb_ -= delta_w;
  labels_[static_cast<std::size_t>(a)] = g2;
  labels_[static_cast<std::size_t>(b)] = g1;
  members_[static_cast<std::size_t>(g1)][static_cast<std::size_t>(j1)] = b;
  members_[static_cast<std::size_t>(g2)][static_cast<std::size_t>(j2)] = a;
  return ratio_or_inf();
}

void AnovaState::relabel(RandomGenerator& rng) {
  std::vector<int> pooled(labels_.size());
  std::iota(pooled.begin(), pooled.end(), 0);
  rng.shuffle(pooled);
  std::size_t at = 0;
  for (std::size_t g = 0; g < members_.size(); ++g)
    for (std::size_t j = 0; j < members_[g].size(); ++j) {
      const int s = pooled[at++];
      members_[g][j] = s;
      labels_[static_cast<std::size_t>(s)] = static_cast<int>(g);
    }
  recompute();
}

double permanova_pseudo_f(const Eigen::Ref<const Matrix>& dist2,
                          const std::vector<int>& labels, int n_groups) {
  const Eigen::Index n = dist2.rows();
  std::vector<int> sizes(static_cast<std::size_t>(n_groups), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  double sst = 0.0;
  std::vector<double> within(static_cast<std::size_t>(n_groups), 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      sst += dist2(i, j);
      if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)])
        within[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += dist2(i, j);
    }
  sst /= static_cast<double>(n);
  double ssw = 0.0;
  for (int g = 0; g < n_groups; ++g)
    ssw += within[static_cast<std::size_t>(g)] / static_cast<double>(sizes[static_cast<std::size_t>(g)]);
  const double ssb = sst - ssw;
  const long df2 = static_cast<long>(n) - n_groups;
  if (ssw <= 0.0 || df2 <= 0)
    throw std::domain_error("degenerate PERMANOVA: no within-group variation");
  return (ssb / (n_groups - 1)) / (ssw / static_cast<double>(df2));
}

TestResult two_sample_test(const std::vector<PersistenceDiagram>& group_a,
                           const std::vector<PersistenceDiagram>& group_b,
                           const TestOptions& opt) {
  PreparedGroups prep = prepare_groups({group_a, group_b}, opt);
  TwoSampleState state(prep.rows[0], prep.rows[1], prep.weights);
  const int m = state.group1_size();
  const int n = state.group2_size();
  const double observed = state.statistic();

  RandomGenerator rng(opt.seed);
  TestResult res;
  res.method = TestMethod::two_sample;
  res.statistic = observed;
  res.n_steps = opt.n_steps;
  res.seed = opt.seed;
  if (opt.record_trace) res.trace.reserve(static_cast<std::size_t>(opt.n_steps));

  std::size_t count = 0;
  for (long step = 1; step <= opt.n_steps; ++step) {
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const double s = state.transpose(i, j);
    if (s >= observed) ++count;
    if (opt.record_trace) res.trace.push_back(s);
    if (opt.relabel_period > 0 && step % opt.relabel_period == 0)
      state.relabel(rng);
  }
  res.p_value = static_cast<double>(1 + count) / static_cast<double>(1 + opt.n_steps);
  return res;
}

namespace {

// First group ~ n_i/N, second ~ n_j/(N - n_first) over the rest.
std::pair<int, int> sample_group_pair(const std::vector<int>& sizes, long total,
                                      RandomGenerator& rng) {
  long r = static_cast<long>(rng.below(static_cast<std::uint64_t>(total)));
  int g1 = 0;
  while (r >= sizes[static_cast<std::size_t>(g1)]) r -= sizes[static_cast<std::size_t>(g1++)];
  long r2 = static_cast<long>(
      rng.below(static_cast<std::uint64_t>(total - sizes[static_cast<std::size_t>(g1)])));
  int g2 = 0;
  while (true) {
    if (g2 != g1) {
      if (r2 < sizes[static_cast<std::size_t>(g2)]) break;
      r2 -= sizes[static_cast<std::size_t>(g2)];
    }
    ++g2;
  }
  return {g1, g2};
}

}  // namespace

TestResult t_anova_test(
    const std::vector<std::vector<PersistenceDiagram>>& groups,
    const TestOptions& opt) {
  PreparedGroups prep = prepare_groups(groups, opt);
  const int k = static_cast<int>(prep.rows.size());
  Eigen::Index total = 0;
  for (const Matrix& g : prep.rows) total += g.rows();
  Matrix pooled(total, prep.weights.size());
  std::vector<int> labels;
  std::vector<int> sizes;
  Eigen::Index at = 0;
  for (int g = 0; g < k; ++g) {
    pooled.middleRows(at, prep.rows[static_cast<std::size_t>(g)].rows()) =
        prep.rows[static_cast<std::size_t>(g)];
    at += prep.rows[static_cast<std::size_t>(g)].rows();
    sizes.push_back(static_cast<int>(prep.rows[static_cast<std::size_t>(g)].rows()));
    labels.insert(labels.end(), static_cast<std::size_t>(sizes.back()), g);
  }

  AnovaState state(pairwise_hk_distance2(pooled, prep.weights), labels, k);
  const double observed = state.ratio();

  RandomGenerator rng(opt.seed);
  TestResult res;
  res.method = TestMethod::t_anova;
  res.statistic = observed;
  res.n_steps = opt.n_steps;
  res.seed = opt.seed;
  if (opt.record_trace) res.trace.reserve(static_cast<std::size_t>(opt.n_steps));

  std::size_t count = 0;
  for (long step = 1; step <= opt.n_steps; ++step) {
    const auto [g1, g2] = sample_group_pair(sizes, total, rng);
    const int j1 = static_cast<int>(rng.below(static_cast<std::uint64_t>(sizes[static_cast<std::size_t>(g1)])));
    const int j2 = static_cast<int>(rng.below(static_cast<std::uint64_t>(sizes[static_cast<std::size_t>(g2)])));
    const double s = state.transpose(g1, j1, g2, j2);
    if (s >= observed) ++count;
    if (opt.record_trace) res.trace.push_back(s);
    if (opt.relabel_period > 0 && step % opt.relabel_period == 0)
      state.relabel(rng);
  }
  res.p_value = static_cast<double>(1 + count) / static_cast<double>(1 + opt.n_steps);
  return res;
}

TestResult permanova_test(
    const std::vector<std::vector<PersistenceDiagram>>& groups,
    const TestOptions& opt) {
  PreparedGroups prep = prepare_groups(groups, opt);
  const int k = static_cast<int>(prep.rows.size());
  Eigen::Index total = 0;
  for (const Matrix& g : prep.rows) total += g.rows();
  Matrix pooled(total, prep.weights.size());
  std::vector<int> labels;
  std::vector<int> sizes;
  Eigen::Index at = 0;
  for (int g = 0; g < k; ++g) {
    pooled.middleRows(at, prep.rows[static_cast<std::size_t>(g)].rows()) =
        prep.rows[static_cast<std::size_t>(g)];
    at += prep.rows[static_cast<std::size_t>(g)].rows();
    sizes.push_back(static_cast<int>(prep.rows[static_cast<std::size_t>(g)].rows()));
    labels.insert(labels.end(), static_cast<std::size_t>(sizes.back()), g);
  }

  const Matrix dist2 = pairwise_hk_distance2(pooled, prep.weights);
  const double observed = permanova_pseudo_f(dist2, labels, k);

  RandomGenerator rng(opt.seed);
  TestResult res;
  res.method = TestMethod::permanova;
  res.statistic = observed;
  res.n_steps = opt.n_steps;
  res.seed = opt.seed;
  if (opt.record_trace) res.trace.reserve(static_cast<std::size_t>(opt.n_steps));

  std::vector<int> pooled_idx(static_cast<std::size_t>(total));
  std::size_t count = 0;
  for (long step = 1; step <= opt.n_steps; ++step) {
    std::iota(pooled_idx.begin(), pooled_idx.end(), 0);
    rng.shuffle(pooled_idx);
    std::vector<int> perm_labels(static_cast<std::size_t>(total));
    std::size_t pos = 0;
    for (int g = 0; g < k; ++g)
      for (int j = 0; j < sizes[static_cast<std::size_t>(g)]; ++j)
        perm_labels[static_cast<std::size_t>(pooled_idx[pos++])] = g;
    double f;
    try {
      f = permanova_pseudo_f(dist2, perm_labels, k);
    } catch (const std::domain_error&) {
      f = std::numeric_limits<double>::infinity();
    }
    if (f >= observed) ++count;
    if (opt.record_trace) res.trace.push_back(f);
  }
  res.p_value = static_cast<double>(1 + count) / static_cast<double>(1 + opt.n_steps);
  return res;
}

}  // namespace topoinfer
