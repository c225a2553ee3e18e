#pragma once

#include <string>
#include <vector>

#include "topoinfer/inference.hpp"
#include "topoinfer/types.hpp"

namespace topoinfer {

/// Lobe-composition class of a K-polygon over the language ROIs: all K
/// nodes from one lobe (LK), all but one (LK1), all but two (LK2).
enum class LKClass { LK, LK1, LK2, none };

std::string to_string(LKClass c);
LKClass lk_class_from_string(const std::string& s);

struct AtlasLabels {
  std::vector<std::string> node_names;
  std::vector<int> lobe;  // lobe id per node, -1 when unlabeled
  std::vector<int> language_rois;

  int size() const { return static_cast<int>(node_names.size()); }
  bool is_language(int node) const;

  /// Throws unless every language ROI carries one of exactly 3 lobe ids.
  void validate() const;
};

/// Synthetic atlas: 36 language ROIs split evenly over 3 lobes
/// (frontal = 0, parietal = 1, temporal = 2), plus n_extra unlabeled nodes.
AtlasLabels synthetic_language_atlas(int n_extra);

/// LK/LK1/LK2 from the lobe counts of the loop nodes. Loops with fewer
/// than 4 nodes or any node outside the language ROIs classify as none.
/// Invariant under rotation and reversal of the loop.
LKClass classify_polygon(const std::vector<int>& loop, const AtlasLabels& atlas);

struct PolygonRecord {
  std::string subject_id;
  std::vector<int> loop;
  double birth = 0.0;
  double death = 0.0;
  LKClass lk_class = LKClass::none;
};

struct TlsmFeatures {
  std::vector<std::string> subject_ids;        // qualifying subjects
  std::vector<PersistenceDiagram> diagrams;    // aligned with subject_ids
  std::vector<PolygonRecord> records;
  std::vector<std::string> dropped;            // subjects with no qualifying polygon
};

/// Per subject: H1 pairs whose representative loop has exactly K nodes and
/// the requested class. Subjects with no qualifying pair go to the drop
/// list. Diagrams keep raw (unstandardized) birth/death values.
TlsmFeatures extract_tlsm_features(
    const std::vector<DissimilarityMatrix>& networks,
    const std::vector<std::string>& subject_ids, const AtlasLabels& atlas,
    LKClass class_filter, int k = 4);

/// Two-sample transposition test on the filtered persistence patterns.
TestResult tlsm_compare(const TlsmFeatures& cohort_a, const TlsmFeatures& cohort_b,
                        const TestOptions& opt);

/// T-ANOVA across three or more filtered cohorts.
TestResult tlsm_compare_multi(const std::vector<TlsmFeatures>& cohorts,
                              const TestOptions& opt);

}  // namespace topoinfer
