#include "topoinfer/tlsm.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "topoinfer/parallel.hpp"
#include "topoinfer/ph.hpp"

namespace topoinfer {

std::string to_string(LKClass c) {
  switch (c) {
    case LKClass::LK: return "LK";
    case LKClass::LK1: return "LK1";
    case LKClass::LK2: return "LK2";
    default: return "none";
  }
}

LKClass lk_class_from_string(const std::string& s) {
  if (s == "LK") return LKClass::LK;
  if (s == "LK1") return LKClass::LK1;
  if (s == "LK2") return LKClass::LK2;
  if (s == "none") return LKClass::none;
  throw std::invalid_argument("unknown LK class: " + s);
}

bool AtlasLabels::is_language(int node) const {
  return std::find(language_rois.begin(), language_rois.end(), node) !=
         language_rois.end();
}

void AtlasLabels::validate() const {
  if (node_names.size() != lobe.size())
    throw std::invalid_argument("atlas: node_names and lobe sizes differ");
  std::set<int> lobes;
  for (int v : language_rois) {
    if (v < 0 || v >= size())
      throw std::invalid_argument("atlas: language ROI index out of range");
    if (lobe[static_cast<std::size_t>(v)] < 0)
      throw std::invalid_argument("atlas: language ROI without lobe label");
    lobes.insert(lobe[static_cast<std::size_t>(v)]);
  }
  if (!language_rois.empty() && lobes.size() != 3)
    throw std::invalid_argument("atlas: language ROIs must span exactly 3 lobes");
}

AtlasLabels synthetic_language_atlas(int n_extra) {
  if (n_extra < 0) throw std::invalid_argument("n_extra must be >= 0");
  AtlasLabels atlas;
  const char* prefixes[3] = {"Frontal_", "Parietal_", "Temporal_"};
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 12; ++i) {
      atlas.node_names.push_back(prefixes[l] + std::to_string(i + 1));
      atlas.lobe.push_back(l);
      atlas.language_rois.push_back(l * 12 + i);
    }
  for (int i = 0; i < n_extra; ++i) {
    atlas.node_names.push_back("Other_" + std::to_string(i + 1));
    atlas.lobe.push_back(-1);
  }
  atlas.validate();
  return atlas;
}

LKClass classify_polygon(const std::vector<int>& loop, const AtlasLabels& atlas) {
  const int k = static_cast<int>(loop.size());
  if (k < 3) throw std::invalid_argument("polygon needs at least 3 nodes");
  std::map<int, int> lobe_count;
  for (int v : loop) {
    if (v < 0 || v >= atlas.size())
      throw std::invalid_argument("polygon node outside the atlas");
    if (!atlas.is_language(v)) return LKClass::none;
    ++lobe_count[atlas.lobe[static_cast<std::size_t>(v)]];
  }
  if (k < 4) return LKClass::none;
  int max_same = 0;
  for (const auto& [l, c] : lobe_count) max_same = std::max(max_same, c);
  if (max_same == k) return LKClass::LK;
  if (max_same == k - 1) return LKClass::LK1;
  if (max_same == k - 2) return LKClass::LK2;
  return LKClass::none;
}

TlsmFeatures extract_tlsm_features(
    const std::vector<DissimilarityMatrix>& networks,
    const std::vector<std::string>& subject_ids, const AtlasLabels& atlas,
    LKClass class_filter, int k) {
  atlas.validate();
  if (class_filter == LKClass::none)
    throw std::invalid_argument("class filter must be LK, LK1 or LK2");
  if (k < 4) throw std::invalid_argument("polygon order K must be >= 4");
  if (networks.size() != subject_ids.size())
    throw std::invalid_argument("one subject id per network required");
  for (const auto& dm : networks)
    if (dm.rows() != atlas.size())
      throw std::invalid_argument("network size does not match the atlas");

  const int n = static_cast<int>(networks.size());
  std::vector<PersistenceDiagram> kept(static_cast<std::size_t>(n));
  std::vector<std::vector<PolygonRecord>> recs(static_cast<std::size_t>(n));

  parallel_for(n, [&](int s) {
    const DissimilarityMatrix& dm = networks[static_cast<std::size_t>(s)];
    const PersistenceDiagram h1 = rips_persistence(dm, 1)[1];
    PersistenceDiagram d;
    d.dim = 1;
    d.representatives.emplace();
    for (const PersistencePair& pair : h1.pairs) {
      const std::vector<int> loop = representative_cycle(dm, pair);
      if (static_cast<int>(loop.size()) != k) continue;
      if (classify_polygon(loop, atlas) != class_filter) continue;
      d.pairs.push_back(pair);
      d.representatives->push_back(loop);
      recs[static_cast<std::size_t>(s)].push_back(
          {subject_ids[static_cast<std::size_t>(s)], loop, pair.birth,
           pair.death, class_filter});
    }
    kept[static_cast<std::size_t>(s)] = std::move(d);
  });

  TlsmFeatures out;
  for (int s = 0; s < n; ++s) {
    if (kept[static_cast<std::size_t>(s)].empty()) {
      out.dropped.push_back(subject_ids[static_cast<std::size_t>(s)]);
      continue;
    }
    out.subject_ids.push_back(subject_ids[static_cast<std::size_t>(s)]);
    out.diagrams.push_back(std::move(kept[static_cast<std::size_t>(s)]));
    out.records.insert(out.records.end(),
                       recs[static_cast<std::size_t>(s)].begin(),
                       recs[static_cast<std::size_t>(s)].end());
  }
  return out;
}

TestResult tlsm_compare(const TlsmFeatures& cohort_a, const TlsmFeatures& cohort_b,
                        const TestOptions& opt) {
  if (cohort_a.diagrams.empty())
    throw std::invalid_argument("cohort A has no qualifying subjects");
  if (cohort_b.diagrams.empty())
    throw std::invalid_argument("cohort B has no qualifying subjects");
  return two_sample_test(cohort_a.diagrams, cohort_b.diagrams, opt);
}

TestResult tlsm_compare_multi(const std::vector<TlsmFeatures>& cohorts,
                              const TestOptions& opt) {
  if (cohorts.size() < 2) throw std::invalid_argument("need at least 2 cohorts");
  std::vector<std::vector<PersistenceDiagram>> groups;
  for (std::size_t i = 0; i < cohorts.size(); ++i) {
    if (cohorts[i].diagrams.empty())
      throw std::invalid_argument("cohort " + std::to_string(i + 1) +
                                  " has no qualifying subjects");
    groups.push_back(cohorts[i].diagrams);
  }
  return t_anova_test(groups, opt);
}

}  // namespace topoinfer
