#include "topoinfer/ph.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>

namespace topoinfer {

namespace {

struct Edge {
  double value;
  int u, v;  // u < v
};

bool edge_less(const Edge& a, const Edge& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.u != b.u) return a.u < b.u;
  return a.v < b.v;
}

std::vector<Edge> sorted_edges(const Eigen::Ref<const Matrix>& dm) {
  const int n = static_cast<int>(dm.rows());
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({dm(i, j), i, j});
  std::sort(edges.begin(), edges.end(), edge_less);
  return edges;
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n), rank_(n, 0) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

struct Triangle {
  double value;
  std::uint16_t a, b, c;  // a < b < c
};

// Boundary-matrix reduction over Z/2 for the triangle columns. Rows are
// edges indexed by filtration rank; the working column lives in a dense
// flag buffer plus a lazy max-heap of candidate pivots, while settled
// columns are stored sparse.
//
// Two standard prunings keep the O(N^3) triangle stream tractable:
//  - enclosing-radius cutoff: every class alive at t_enc = min_i max_j d(i,j)
//    is coned off by the minimizing vertex, so triangles past t_enc only
//    produce zero-persistence pairs, which are dropped anyway;
//  - compression: rows of union-find tree edges (the negative edges of the
//    dim-0 reduction) cannot be pivots and are removed from the columns.
PersistenceDiagram reduce_triangles(const Eigen::Ref<const Matrix>& dm,
                                    const std::vector<Edge>& edges,
                                    const std::vector<std::uint8_t>& is_tree) {
  const int n = static_cast<int>(dm.rows());
  const std::size_t n_edges = edges.size();

  std::vector<std::uint32_t> rank_of(static_cast<std::size_t>(n) * n);
  for (std::uint32_t r = 0; r < n_edges; ++r) {
    const Edge& e = edges[r];
    rank_of[static_cast<std::size_t>(e.u) * n + e.v] = r;
    rank_of[static_cast<std::size_t>(e.v) * n + e.u] = r;
  }

  double t_enc = 0.0;
  {
    t_enc = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      double ecc = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) ecc = std::max(ecc, dm(i, j));
      t_enc = std::min(t_enc, ecc);
    }
  }

  std::vector<Triangle> tris;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double wij = dm(i, j);
      if (wij > t_enc) continue;
      for (int k = j + 1; k < n; ++k) {
        const double w = std::max(wij, std::max(dm(i, k), dm(j, k)));
        if (w > t_enc) continue;
        tris.push_back({w, static_cast<std::uint16_t>(i),
                        static_cast<std::uint16_t>(j),
                        static_cast<std::uint16_t>(k)});
      }
    }
  std::sort(tris.begin(), tris.end(), [](const Triangle& x, const Triangle& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return x.c < y.c;
  });

  std::vector<std::int32_t> pivot_owner(n_edges, -1);
  std::vector<std::vector<std::uint32_t>> stored;
  std::vector<std::uint8_t> flags(n_edges, 0);
  std::vector<std::uint32_t> touched;
  std::vector<std::uint32_t> heap;

  PersistenceDiagram out;
  out.dim = 1;

  const auto toggle = [&](std::uint32_t r) {
    flags[r] ^= 1;
    touched.push_back(r);
    if (flags[r]) {
      heap.push_back(r);
      std::push_heap(heap.begin(), heap.end());
    }
  };

  for (const Triangle& t : tris) {
    touched.clear();
    heap.clear();
    const std::uint32_t rr[3] = {rank_of[static_cast<std::size_t>(t.a) * n + t.b],
                                 rank_of[static_cast<std::size_t>(t.a) * n + t.c],
                                 rank_of[static_cast<std::size_t>(t.b) * n + t.c]};
    for (std::uint32_t r : rr)
      if (!is_tree[r]) toggle(r);

    while (!heap.empty()) {
      const std::uint32_t pivot = heap.front();
      std::pop_heap(heap.begin(), heap.end());
      heap.pop_back();
      if (!flags[pivot]) continue;  // stale entry
      const std::int32_t owner = pivot_owner[pivot];
      if (owner < 0) {
        const double birth = edges[pivot].value;
        if (birth != t.value) out.pairs.push_back({birth, t.value});
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()),
                      touched.end());
        std::vector<std::uint32_t> col;
        col.reserve(touched.size());
        for (std::uint32_t r : touched)
          if (flags[r]) col.push_back(r);
        pivot_owner[pivot] = static_cast<std::int32_t>(stored.size());
        stored.push_back(std::move(col));
        break;
      }
      // the owner's pivot is this pivot: adding clears it and pushes the rest
      for (std::uint32_t r : stored[static_cast<std::size_t>(owner)]) toggle(r);
    }
    for (std::uint32_t r : touched) flags[r] = 0;
  }
  return out;
}

}  // namespace

DissimilarityMatrix pairwise_distances(
    const Eigen::Ref<const PointCloud>& points) {
  const auto n = points.rows();
  if (n < 1 || points.cols() < 1)
    throw std::invalid_argument("point cloud must be non-empty");
  if (!points.allFinite())
    throw std::invalid_argument("point cloud has non-finite coordinates");
  Matrix dm = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (points.row(i) - points.row(j)).norm();
      dm(i, j) = d;
      dm(j, i) = d;
    }
  return dm;
}

void validate_dissimilarity(const Eigen::Ref<const Matrix>& dm) {
  if (dm.rows() < 1 || dm.rows() != dm.cols())
    throw std::invalid_argument("dissimilarity matrix must be square and non-empty");
  for (Eigen::Index i = 0; i < dm.rows(); ++i) {
    if (dm(i, i) != 0.0)
      throw std::invalid_argument("dissimilarity matrix has nonzero diagonal");
    for (Eigen::Index j = i + 1; j < dm.cols(); ++j) {
      const double w = dm(i, j);
      if (!std::isfinite(w) || w < 0.0)
        throw std::invalid_argument(
            "dissimilarity entries must be finite and nonnegative");
      if (w != dm(j, i))
        throw std::invalid_argument("dissimilarity matrix must be symmetric");
    }
  }
}

std::vector<PersistenceDiagram> rips_persistence(
    const Eigen::Ref<const Matrix>& dm, int max_dim) {
  if (max_dim < 0 || max_dim > 1)
    throw std::invalid_argument("max_dim must be 0 or 1");
  validate_dissimilarity(dm);
  const int n = static_cast<int>(dm.rows());
  if (n > std::numeric_limits<std::uint16_t>::max())
    throw std::invalid_argument("matrix too large for rips_persistence");

  const std::vector<Edge> edges = sorted_edges(dm);

  std::vector<PersistenceDiagram> diagrams(static_cast<std::size_t>(max_dim) + 1);
  diagrams[0].dim = 0;

  UnionFind uf(n);
  std::vector<std::uint8_t> is_tree(edges.size(), 0);
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (uf.unite(edges[e].u, edges[e].v)) {
      is_tree[e] = 1;
      if (edges[e].value != 0.0) diagrams[0].pairs.push_back({0.0, edges[e].value});
    }

  if (max_dim == 1 && n >= 3) diagrams[1] = reduce_triangles(dm, edges, is_tree);
  if (max_dim == 1) diagrams[1].dim = 1;
  return diagrams;
}

std::vector<int> representative_cycle(const Eigen::Ref<const Matrix>& dm,
                                      const PersistencePair& pair) {
  validate_dissimilarity(dm);
  const int n = static_cast<int>(dm.rows());
  const std::vector<Edge> edges = sorted_edges(dm);

  // The birth edge is the first cycle edge (one that closes a loop in the
  // union-find pass) whose value matches the pair's birth.
  UnionFind uf(n);
  std::size_t birth_idx = edges.size();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const bool merged = uf.unite(edges[e].u, edges[e].v);
    if (!merged && std::abs(edges[e].value - pair.birth) <= 1e-9) {
      birth_idx = e;
      break;
    }
  }
  if (birth_idx == edges.size())
    throw std::invalid_argument(
        "no dim-1 pair with this birth value exists for the given matrix");

  const int src = edges[birth_idx].u;
  const int dst = edges[birth_idx].v;

  // Graph of edges that precede the birth edge in filtration order.
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (std::size_t e = 0; e < birth_idx; ++e) {
    adj[edges[e].u].push_back({edges[e].v, edges[e].value});
    adj[edges[e].v].push_back({edges[e].u, edges[e].value});
  }

  // Dijkstra toward dst with lexicographic (hops, total weight) cost.
  struct Cost {
    long hops;
    double weight;
    bool operator<(const Cost& o) const {
      if (hops != o.hops) return hops < o.hops;
      return weight < o.weight;
    }
  };
  const Cost inf{std::numeric_limits<long>::max(),
                 std::numeric_limits<double>::infinity()};
  std::vector<Cost> dist(n, inf);
  using QueueItem = std::pair<Cost, int>;
  auto cmp = [](const QueueItem& a, const QueueItem& b) { return b.first < a.first; };
  std::priority_queue<QueueItem, std::vector<QueueItem>, decltype(cmp)> queue(cmp);
  dist[dst] = {0, 0.0};
  queue.push({dist[dst], dst});
  while (!queue.empty()) {
    auto [c, x] = queue.top();
    queue.pop();
    if (dist[x] < c) continue;
    for (auto [y, w] : adj[x]) {
      const Cost cand{c.hops + 1, c.weight + w};
      if (cand < dist[y]) {
        dist[y] = cand;
        queue.push({cand, y});
      }
    }
  }
  if (dist[src].hops == inf.hops)
    throw std::invalid_argument(
        "birth edge endpoints are not connected below the birth value");

  // Walk from src to dst, always taking the smallest-index neighbor that
  // stays on an optimal path; this is the lexicographically smallest loop.
  std::vector<int> loop{src};
  int cur = src;
  while (cur != dst) {
    int next = -1;
    for (auto [y, w] : adj[cur]) {
      if (dist[y].hops != dist[cur].hops - 1) continue;
      if (dist[y].weight + w != dist[cur].weight) continue;
      if (next < 0 || y < next) next = y;
    }
    if (next < 0)
      throw std::logic_error("path reconstruction failed");
    loop.push_back(next);
    cur = next;
  }
  return loop;
}

}  // namespace topoinfer
