#pragma once

#include <vector>

#include "topoinfer/types.hpp"

namespace topoinfer {

/// Euclidean distance matrix of a point cloud (one point per row).
DissimilarityMatrix pairwise_distances(const Eigen::Ref<const PointCloud>& points);

/// Throws std::invalid_argument unless `dm` is square, symmetric, finite,
/// nonnegative and zero on the diagonal.
void validate_dissimilarity(const Eigen::Ref<const Matrix>& dm);

/// Persistence diagrams of the Rips filtration of `dm`, dimensions
/// 0..max_dim (max_dim is 0 or 1).
///
/// Simplices are ordered by filtration value, then dimension, then
/// lexicographic vertex tuple. Dimension 0 comes from union-find over the
/// ordered edges with the single essential component dropped; dimension 1
/// from column reduction of the triangle boundary matrix over Z/2.
/// Zero-persistence pairs (birth == death) are excluded.
std::vector<PersistenceDiagram> rips_persistence(
    const Eigen::Ref<const Matrix>& dm, int max_dim);

/// Representative loop of a dim-1 pair: the birth edge (u, v) closed by the
/// shortest path (fewest hops, then smallest total weight, then
/// lexicographically smallest node sequence) from u to v through edges that
/// precede the birth edge in the filtration order. At least 3 nodes.
/// Throws std::invalid_argument when the pair cannot come from `dm`.
std::vector<int> representative_cycle(const Eigen::Ref<const Matrix>& dm,
                                      const PersistencePair& pair);

}  // namespace topoinfer
