#include "topoinfer/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "topoinfer/rng.hpp"

namespace topoinfer {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool in_rect(const Rect& r, double x, double y) {
  return x >= r.x0 && x <= r.x1 && y >= r.y0 && y <= r.y1;
}

bool in_band(const Annulus& a, double x, double y) {
  const double r = std::hypot(x - a.cx, y - a.cy);
  return r >= a.r_inner && r <= a.r_outer;
}

// Quarters by angle around the keyhole center, counterclockwise from +x.
bool in_quarter(const Annulus& a, double x, double y, KeyholeVariant v) {
  if (v == KeyholeVariant::full) return true;
  double theta = std::atan2(y - a.cy, x - a.cx);
  if (theta < 0) theta += 2.0 * kPi;
  switch (v) {
    case KeyholeVariant::quarter_top_right: return theta < 0.5 * kPi;
    case KeyholeVariant::quarter_top_left: return theta >= 0.5 * kPi && theta < kPi;
    case KeyholeVariant::quarter_bottom_left: return theta >= kPi && theta < 1.5 * kPi;
    case KeyholeVariant::quarter_bottom_right: return theta >= 1.5 * kPi;
    default: return true;
  }
}

Annulus noise_annulus(const KeyShapeSpec& spec, NoiseAnchor anchor) {
  const double d = spec.keyhole.r_outer + spec.noise_r_outer + 0.01;
  const double off = d / std::sqrt(2.0);
  double dx = 0.0, dy = 0.0;
  switch (anchor) {
    case NoiseAnchor::top_left: dx = -off; dy = off; break;
    case NoiseAnchor::top_right: dx = off; dy = off; break;
    case NoiseAnchor::bottom_left: dx = -off; dy = -off; break;
    case NoiseAnchor::bottom_right: dx = off; dy = -off; break;
    default: break;
  }
  return {spec.keyhole.cx + dx, spec.keyhole.cy + dy, spec.noise_r_outer,
          spec.noise_r_inner};
}

}  // namespace

void KeyShapeSpec::validate() const {
  if (region.x1 <= region.x0 || region.y1 <= region.y0)
    throw std::invalid_argument("key shape: empty bounding region");
  if (keyhole.r_inner <= 0 || keyhole.r_inner >= keyhole.r_outer)
    throw std::invalid_argument("key shape: need 0 < inner radius < outer radius");
  if (noise_r_inner <= 0 || noise_r_inner >= noise_r_outer ||
      noise_r_outer >= keyhole.r_outer)
    throw std::invalid_argument("key shape: noise annulus must be smaller than keyhole");
  if (!(key_fraction > 0.0 && key_fraction <= 1.0))
    throw std::invalid_argument("key shape: key_fraction must be in (0, 1]");
  if (noise != NoiseAnchor::none) {
    for (NoiseAnchor a : {NoiseAnchor::top_left, NoiseAnchor::top_right,
                          NoiseAnchor::bottom_left, NoiseAnchor::bottom_right}) {
      const Annulus na = noise_annulus(*this, a);
      const double gap = std::hypot(na.cx - keyhole.cx, na.cy - keyhole.cy);
      if (gap <= keyhole.r_outer + na.r_outer)
        throw std::invalid_argument("key shape: noise annulus overlaps keyhole");
      if (na.cx - na.r_outer < region.x0 || na.cx + na.r_outer > region.x1 ||
          na.cy - na.r_outer < region.y0 || na.cy + na.r_outer > region.y1)
        throw std::invalid_argument("key shape: noise annulus leaves the region");
    }
  }
}

PointCloud sample_key_cloud(const KeyShapeSpec& spec, int n_points,
                            std::uint64_t seed) {
  spec.validate();
  if (n_points < 1) throw std::invalid_argument("n_points must be >= 1");
  RandomGenerator rng(seed);

  NoiseAnchor anchor = spec.noise;
  if (anchor == NoiseAnchor::random_anchor) {
    constexpr NoiseAnchor anchors[] = {NoiseAnchor::top_left, NoiseAnchor::top_right,
                                       NoiseAnchor::bottom_left, NoiseAnchor::bottom_right};
    anchor = anchors[rng.below(4)];
  }
  KeyholeVariant variant = spec.variant;
  if (variant == KeyholeVariant::quarter_random) {
    constexpr KeyholeVariant variants[] = {
        KeyholeVariant::quarter_top_left, KeyholeVariant::quarter_top_right,
        KeyholeVariant::quarter_bottom_left, KeyholeVariant::quarter_bottom_right};
    variant = variants[rng.below(4)];
  }
  const Annulus noise = anchor == NoiseAnchor::none
                            ? Annulus{}
                            : noise_annulus(spec, anchor);

  const auto in_key = [&](double x, double y) {
    if (in_band(spec.keyhole, x, y) && in_quarter(spec.keyhole, x, y, variant))
      return true;
    if (in_rect(spec.shaft, x, y)) return true;
    if (anchor != NoiseAnchor::none && in_band(noise, x, y)) return true;
    return false;
  };

  const int n_key = static_cast<int>(std::floor(spec.key_fraction * n_points));
  PointCloud cloud(n_points, 2);
  for (int i = 0; i < n_key; ++i) {
    double x, y;
    do {
      x = rng.uniform(spec.region.x0, spec.region.x1);
      y = rng.uniform(spec.region.y0, spec.region.y1);
    } while (!in_key(x, y));
    cloud(i, 0) = x;
    cloud(i, 1) = y;
  }
  for (int i = n_key; i < n_points; ++i) {
    cloud(i, 0) = rng.uniform(spec.region.x0, spec.region.x1);
    cloud(i, 1) = rng.uniform(spec.region.y0, spec.region.y1);
  }
  return cloud;
}

PointCloud sample_uniform_cloud(int n_points, std::uint64_t seed) {
  if (n_points < 1) throw std::invalid_argument("n_points must be >= 1");
  const Rect region{0.0, 0.0, 1.0, 0.5};
  RandomGenerator rng(seed);
  PointCloud cloud(n_points, 2);
  for (int i = 0; i < n_points; ++i) {
    cloud(i, 0) = rng.uniform(region.x0, region.x1);
    cloud(i, 1) = rng.uniform(region.y0, region.y1);
  }
  return cloud;
}

std::vector<std::vector<int>> equal_modules(int n_nodes, int k) {
  if (k < 1 || k > n_nodes) throw std::invalid_argument("bad module count");
  std::vector<std::vector<int>> modules(static_cast<std::size_t>(k));
  for (int i = 0; i < n_nodes; ++i)
    modules[static_cast<std::size_t>(static_cast<long>(i) * k / n_nodes)].push_back(i);
  return modules;
}

DissimilarityMatrix synth_network(int n_nodes,
                                  const std::vector<std::vector<int>>& modules,
                                  std::uint64_t seed) {
  if (n_nodes < 4) throw std::invalid_argument("synth_network needs >= 4 nodes");
  std::vector<int> module_of(static_cast<std::size_t>(n_nodes), -1);
  for (std::size_t m = 0; m < modules.size(); ++m)
    for (int v : modules[m]) {
      if (v < 0 || v >= n_nodes || module_of[static_cast<std::size_t>(v)] != -1)
        throw std::invalid_argument("modules must partition the node set");
      module_of[static_cast<std::size_t>(v)] = static_cast<int>(m);
    }
  for (int m : module_of)
    if (m == -1) throw std::invalid_argument("modules must partition the node set");

  RandomGenerator rng(seed);
  Matrix dm = Matrix::Zero(n_nodes, n_nodes);
  for (int i = 0; i < n_nodes; ++i)
    for (int j = i + 1; j < n_nodes; ++j) {
      const bool within = module_of[static_cast<std::size_t>(i)] ==
                          module_of[static_cast<std::size_t>(j)];
      const double w = within ? rng.uniform(0.1, 0.4) : rng.uniform(0.5, 1.0);
      dm(i, j) = w;
      dm(j, i) = w;
    }
  return dm;
}

DissimilarityMatrix perturb_network(const Eigen::Ref<const Matrix>& dm,
                                    double noise_sd, std::uint64_t seed) {
  if (noise_sd < 0) throw std::invalid_argument("noise_sd must be >= 0");
  Matrix out = dm;
  if (noise_sd == 0.0) return out;
  RandomGenerator rng(seed);
  const Eigen::Index n = dm.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = std::max(0.0, dm(i, j) + rng.gaussian(0.0, noise_sd));
      out(i, j) = w;
      out(j, i) = w;
    }
  return out;
}

void LesionSpec::validate(int n_nodes) const {
  std::vector<char> seen(static_cast<std::size_t>(n_nodes), 0);
  for (const auto& cluster : clusters)
    for (int v : cluster) {
      if (v < 0 || v >= n_nodes)
        throw std::invalid_argument("lesion cluster node index out of range");
      if (seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("lesion clusters must be disjoint");
      seen[static_cast<std::size_t>(v)] = 1;
    }
  if (noise_sd < 0) throw std::invalid_argument("noise_sd must be >= 0");
}

DissimilarityMatrix apply_lesion(const Eigen::Ref<const Matrix>& dm,
                                 const LesionSpec& spec, bool literal_zero) {
  const int n = static_cast<int>(dm.rows());
  spec.validate(n);
  Matrix out = dm;
  if (spec.clusters.empty()) return out;

  double disconnect = 0.0;
  if (!literal_zero) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) disconnect = std::max(disconnect, dm(i, j));
  }
  std::vector<char> knocked(static_cast<std::size_t>(n), 0);
  for (const auto& cluster : spec.clusters)
    for (int v : cluster) knocked[static_cast<std::size_t>(v)] = 1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (knocked[static_cast<std::size_t>(i)] || knocked[static_cast<std::size_t>(j)]) {
        out(i, j) = disconnect;
        out(j, i) = disconnect;
      }
  return out;
}

DissimilarityMatrix planted_loop_network(
    int n_nodes, const std::vector<std::vector<int>>& loops,
    std::uint64_t seed) {
  if (n_nodes < 3) throw std::invalid_argument("need >= 3 nodes");
  std::vector<char> used(static_cast<std::size_t>(n_nodes), 0);
  for (const auto& loop : loops) {
    if (loop.size() < 3) throw std::invalid_argument("planted loop needs >= 3 nodes");
    for (int v : loop) {
      if (v < 0 || v >= n_nodes) throw std::invalid_argument("loop node out of range");
      if (used[static_cast<std::size_t>(v)])
        throw std::invalid_argument("planted loops must be disjoint");
      used[static_cast<std::size_t>(v)] = 1;
    }
  }

  RandomGenerator rng(seed);
  Matrix dm = Matrix::Zero(n_nodes, n_nodes);
  for (int i = 0; i < n_nodes; ++i)
    for (int j = i + 1; j < n_nodes; ++j) {
      const double w = rng.uniform(0.5, 1.0);
      dm(i, j) = w;
      dm(j, i) = w;
    }
  for (const auto& loop : loops) {
    const std::size_t k = loop.size();
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b) {
        const bool adjacent = (b == a + 1) || (a == 0 && b == k - 1);
        const double w = adjacent ? rng.uniform(0.15, 0.25) : rng.uniform(0.85, 0.95);
        dm(loop[a], loop[b]) = w;
        dm(loop[b], loop[a]) = w;
      }
  }
  return dm;
}

}  // namespace topoinfer
