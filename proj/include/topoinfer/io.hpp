#pragma once

#include <string>
#include <vector>

#include "topoinfer/hk.hpp"
#include "topoinfer/tlsm.hpp"
#include "topoinfer/types.hpp"

namespace topoinfer {

enum class SimilarityMode { dissimilarity, one_minus_abs };

SimilarityMode similarity_mode_from_string(const std::string& s);

/// one_minus_abs: d_ij = 1 - |s_ij| with the diagonal zeroed (entries must
/// be in [-1, 1]); dissimilarity: validated pass-through.
Matrix convert_similarity(const Eigen::Ref<const Matrix>& m, SimilarityMode mode);

/// One row per point, d numeric columns, optional header row.
PointCloud read_point_cloud_csv(const std::string& path);

/// N x N numeric matrix, optional header row.
Matrix read_matrix_csv(const std::string& path);

void write_matrix_csv(const std::string& path, const Eigen::Ref<const Matrix>& m);

/// Diagram JSON: {"dim": int, "pairs": [[b, d], ...],
///                "representatives": [[i, ...], ...] | null}.
/// Files may hold a single diagram object or an array of them.
void write_diagrams_json(const std::string& path,
                         const std::vector<PersistenceDiagram>& diagrams);
std::vector<PersistenceDiagram> read_diagrams_json(const std::string& path);

/// HKVector JSON: {"order": M, "coeffs": [...], "source_size": P}.
void write_hkvector_json(const std::string& path, const HKVector& v);
HKVector read_hkvector_json(const std::string& path);

void write_test_result_json(const std::string& path, const TestResult& r);
TestResult read_test_result_json(const std::string& path);

/// Atlas JSON: {"nodes": [...], "lobe": {"<index>": id, ...},
///              "language_rois": [...]}. Lobe values may be ints or
/// strings; strings are mapped to ids in sorted order.
AtlasLabels read_atlas_json(const std::string& path);
void write_atlas_json(const std::string& path, const AtlasLabels& atlas);

/// PolygonRecord CSV: subject, loop (indices joined by ';'), birth, death, class.
void write_polygon_csv(const std::string& path,
                       const std::vector<PolygonRecord>& records);

}  // namespace topoinfer
