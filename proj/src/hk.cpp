#include "topoinfer/hk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topoinfer {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDomainTol = 1e-9;
}  // namespace

TriangleBasis::TriangleBasis(int order) : order_(order) {
  if (order < 0) throw std::invalid_argument("basis order must be >= 0");
  modes_.reserve(static_cast<std::size_t>(order + 1) * (order + 2) / 2);
  for (int m = 0; m <= order; ++m)
    for (int n = m; n <= order; ++n) {
      TriangleMode mode;
      mode.m = m;
      mode.n = n;
      mode.eigenvalue = kPi * kPi * (static_cast<double>(m) * m + static_cast<double>(n) * n);
      if (m == 0 && n == 0)
        mode.norm_constant = 1.0 / std::sqrt(2.0);
      else if (m == n || m == 0)
        mode.norm_constant = std::sqrt(2.0);
      else
        mode.norm_constant = 2.0;
      modes_.push_back(mode);
    }
  std::sort(modes_.begin(), modes_.end(),
            [](const TriangleMode& a, const TriangleMode& b) {
              if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
              if (a.m != b.m) return a.m < b.m;
              return a.n < b.n;
            });
}

double TriangleBasis::evaluate(int k, double x, double y) const {
  const TriangleMode& mode = modes_[static_cast<std::size_t>(k)];
  return mode.norm_constant *
         (std::cos(mode.m * kPi * x) * std::cos(mode.n * kPi * y) +
          std::cos(mode.n * kPi * x) * std::cos(mode.m * kPi * y));
}

Vector TriangleBasis::evaluate_all(double x, double y) const {
  // cosine tables: O(M) trig calls, O(M^2) products
  Vector cx(order_ + 1), cy(order_ + 1);
  for (int m = 0; m <= order_; ++m) {
    cx[m] = std::cos(m * kPi * x);
    cy[m] = std::cos(m * kPi * y);
  }
  Vector out(size());
  for (int k = 0; k < size(); ++k) {
    const TriangleMode& mode = modes_[static_cast<std::size_t>(k)];
    out[k] = mode.norm_constant * (cx[mode.m] * cy[mode.n] + cx[mode.n] * cy[mode.m]);
  }
  return out;
}

Vector TriangleBasis::attenuation(double sigma) const {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  Vector w(size());
  for (int k = 0; k < size(); ++k) w[k] = std::exp(-modes_[static_cast<std::size_t>(k)].eigenvalue * sigma);
  return w;
}

PersistenceDiagram Standardizer::standardize(const PersistenceDiagram& d) const {
  PersistenceDiagram out;
  out.dim = d.dim;
  out.representatives = d.representatives;
  out.pairs.reserve(d.pairs.size());
  for (const PersistencePair& p : d.pairs) {
    const double b = apply(p.birth);
    const double dd = apply(p.death);
    if (b < -kDomainTol || dd > 1.0 + kDomainTol)
      throw std::domain_error(
          "pair outside the fitted standardization range [lo, hi]");
    out.pairs.push_back({b, dd});
  }
  return out;
}

Standardizer fit_standardizer(const std::vector<PersistenceDiagram>& diagrams) {
  bool seen = false;
  double lo = 0.0, hi = 0.0;
  for (const PersistenceDiagram& d : diagrams)
    for (const PersistencePair& p : d.pairs) {
      if (!seen) {
        lo = p.birth;
        hi = p.death;
        seen = true;
      } else {
        lo = std::min(lo, p.birth);
        hi = std::max(hi, p.death);
      }
    }
  if (!seen)
    throw std::invalid_argument("cannot standardize: all diagrams are empty");
  if (hi == lo)
    throw std::invalid_argument("cannot standardize: degenerate range (hi == lo)");
  return {lo, hi};
}

std::vector<PersistenceDiagram> standardize_all(
    const std::vector<PersistenceDiagram>& diagrams, const Standardizer& s) {
  std::vector<PersistenceDiagram> out;
  out.reserve(diagrams.size());
  for (const PersistenceDiagram& d : diagrams) out.push_back(s.standardize(d));
  return out;
}

HKVector hk_coefficients(const PersistenceDiagram& standardized,
                         const TriangleBasis& basis) {
  HKVector v;
  v.order = basis.order();
  v.coeffs = Vector::Zero(basis.size());
  v.source_size = static_cast<int>(standardized.pairs.size());
  for (const PersistencePair& p : standardized.pairs) {
    if (p.birth < -kDomainTol || p.death > 1.0 + kDomainTol ||
        p.death - p.birth < -kDomainTol)
      throw std::domain_error("pair outside the closed unit triangle");
    v.coeffs += basis.evaluate_all(p.birth, p.death);
  }
  return v;
}

double hk_evaluate(const HKVector& v, const TriangleBasis& basis, double sigma,
                   double x, double y) {
  if (v.order != basis.order())
    throw std::invalid_argument("HKVector order does not match basis");
  return (basis.attenuation(sigma).array() * v.coeffs.array() *
          basis.evaluate_all(x, y).array())
      .sum();
}

double hk_distance2(const HKVector& a, const HKVector& b,
                    const TriangleBasis& basis, double sigma) {
  if (a.order != b.order || a.order != basis.order())
    throw std::invalid_argument("HKVector bases do not match");
  return (basis.attenuation(sigma).array() *
          (a.coeffs - b.coeffs).array().square())
      .sum();
}

double hk_distance(const HKVector& a, const HKVector& b,
                   const TriangleBasis& basis, double sigma) {
  return std::sqrt(hk_distance2(a, b, basis, sigma));
}

}  // namespace topoinfer
