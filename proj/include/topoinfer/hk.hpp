#pragma once

#include <vector>

#include "topoinfer/types.hpp"

namespace topoinfer {

/// One Neumann eigenmode of the Laplacian on the unit upper triangle
/// T = {0 <= x <= y <= 1}:
///
///   psi_{mn}(x, y) = c_{mn} * (cos(m pi x) cos(n pi y) + cos(n pi x) cos(m pi y)),
///   lambda_{mn}    = pi^2 (m^2 + n^2),   0 <= m <= n.
///
/// The constants c_{mn} make each mode unit-norm on T (area 1/2):
/// c = 1/sqrt(2) for (0,0), sqrt(2) for (0,n) and (m,m), 2 for 0 < m < n.
struct TriangleMode {
  int m = 0;
  int n = 0;
  double eigenvalue = 0.0;
  double norm_constant = 0.0;
};

/// Closed-form Laplace-Beltrami eigenbasis on the unit upper triangle.
/// Modes are sorted by eigenvalue, ties by (m, n); mode 0 is the constant
/// psi_0 = sqrt(2). Immutable and shareable across threads.
class TriangleBasis {
 public:
  explicit TriangleBasis(int order);

  int order() const { return order_; }
  int size() const { return static_cast<int>(modes_.size()); }
  const std::vector<TriangleMode>& modes() const { return modes_; }
  double eigenvalue(int k) const { return modes_[k].eigenvalue; }

  double evaluate(int k, double x, double y) const;

  /// All mode values at one point, as a vector indexed like modes().
  Vector evaluate_all(double x, double y) const;

  /// Heat-kernel weights e^{-lambda_k sigma}.
  Vector attenuation(double sigma) const;

 private:
  int order_;
  std::vector<TriangleMode> modes_;
};

/// Shared affine map [lo, hi] -> [0, 1] fitted on a whole comparison set.
struct Standardizer {
  double lo = 0.0;
  double hi = 1.0;

  double apply(double t) const { return (t - lo) / (hi - lo); }

  /// Maps all pairs of `d`; throws std::domain_error when a mapped
  /// coordinate falls outside [0, 1] beyond 1e-9.
  PersistenceDiagram standardize(const PersistenceDiagram& d) const;
};

/// lo = min birth, hi = max death over every diagram in the set.
/// Throws std::invalid_argument when all diagrams are empty or hi == lo.
Standardizer fit_standardizer(const std::vector<PersistenceDiagram>& diagrams);

std::vector<PersistenceDiagram> standardize_all(
    const std::vector<PersistenceDiagram>& diagrams, const Standardizer& s);

/// Fourier coefficients of a diagram: sigma-independent, one per mode.
struct HKVector {
  int order = 0;
  Vector coeffs;
  int source_size = 0;
};

/// f_k = sum_i psi_k(birth_i, death_i) over a standardized diagram.
/// Pairs must lie in the closed unit triangle within 1e-9.
HKVector hk_coefficients(const PersistenceDiagram& standardized,
                         const TriangleBasis& basis);

/// Degree-kappa heat-kernel estimate sum_k e^{-lambda_k sigma} f_k psi_k(p).
double hk_evaluate(const HKVector& v, const TriangleBasis& basis, double sigma,
                   double x, double y);

/// Squared weighted L2 distance sum_k e^{-lambda_k sigma} (f1_k - f2_k)^2.
double hk_distance2(const HKVector& a, const HKVector& b,
                    const TriangleBasis& basis, double sigma);

double hk_distance(const HKVector& a, const HKVector& b,
                   const TriangleBasis& basis, double sigma);

}  // namespace topoinfer
