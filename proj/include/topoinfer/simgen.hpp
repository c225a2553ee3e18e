#pragma once

#include <cstdint>
#include <vector>

#include "topoinfer/types.hpp"

namespace topoinfer {

struct Annulus {
  double cx = 0.0, cy = 0.0;
  double r_outer = 0.0, r_inner = 0.0;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

enum class NoiseAnchor {
  none,
  top_left,
  top_right,
  bottom_left,
  bottom_right,
  random_anchor
};

enum class KeyholeVariant {
  full,
  quarter_top_left,
  quarter_top_right,
  quarter_bottom_left,
  quarter_bottom_right,
  quarter_random
};

/// Parametric key shape: an annulus (the keyhole) with a shaft attached on
/// the right, inside the bounding rectangle [0,1] x [0,0.5]. Optionally a
/// much smaller annulus (topological noise) at one of four anchor spots
/// around the keyhole, and quarter variants that keep only one quarter arc
/// of the keyhole.
struct KeyShapeSpec {
  Rect region{0.0, 0.0, 1.0, 0.5};
  Annulus keyhole{0.2, 0.25, 0.12, 0.07};
  Rect shaft{0.32, 0.22, 0.77, 0.28};
  double noise_r_outer = 0.035;
  double noise_r_inner = 0.02;
  NoiseAnchor noise = NoiseAnchor::none;
  KeyholeVariant variant = KeyholeVariant::full;
  double key_fraction = 1.0;  // in (0, 1]

  void validate() const;
};

/// floor(key_fraction * n) points uniform on the key region, the rest
/// uniform on the bounding rectangle. Deterministic given the seed; random
/// anchor/quarter choices are resolved per call from the same stream.
PointCloud sample_key_cloud(const KeyShapeSpec& spec, int n_points,
                            std::uint64_t seed);

/// n points uniform on the bounding rectangle (the no-shape control group).
PointCloud sample_uniform_cloud(int n_points, std::uint64_t seed);

/// Even contiguous partition of 0..n-1 into k modules.
std::vector<std::vector<int>> equal_modules(int n_nodes, int k);

/// Block-structured dissimilarities: within-module entries uniform in
/// [0.1, 0.4), between-module in [0.5, 1.0).
DissimilarityMatrix synth_network(int n_nodes,
                                  const std::vector<std::vector<int>>& modules,
                                  std::uint64_t seed);

/// Adds one Gaussian draw per unordered pair (clamped at 0); the diagonal
/// is untouched and symmetry is exact.
DissimilarityMatrix perturb_network(const Eigen::Ref<const Matrix>& dm,
                                    double noise_sd, std::uint64_t seed);

struct LesionSpec {
  std::vector<std::vector<int>> clusters;  // disjoint node-index sets
  double noise_sd = 0.0;

  void validate(int n_nodes) const;
};

/// Node knockout: every edge incident to a knocked-out node is set to the
/// disconnection value. In dissimilarity convention that is the maximum
/// off-diagonal entry (the edge enters the filtration last); pass
/// literal_zero = true for the paper-literal similarity-convention
/// behavior of zeroing the weights instead.
DissimilarityMatrix apply_lesion(const Eigen::Ref<const Matrix>& dm,
                                 const LesionSpec& spec,
                                 bool literal_zero = false);

/// Synthetic fixture for cycle-level pipelines: uniform high background in
/// [0.5, 1.0) with each listed loop planted as a low-weight cycle
/// (consecutive edges in [0.15, 0.25), non-adjacent in-loop pairs in
/// [0.85, 0.95)). Loops must be disjoint and have >= 3 nodes.
DissimilarityMatrix planted_loop_network(
    int n_nodes, const std::vector<std::vector<int>>& loops,
    std::uint64_t seed);

}  // namespace topoinfer
