#pragma once

#include "citematch/log.hpp"

namespace citematch {

template <typename Lookup>
MatchResult select_best(const std::string& source_id, std::uint32_t reference_index,
                        const ParsedCitation& citation, std::span<const std::string> candidate_ids,
                        Lookup&& docs_by_id, const LinearModel& model, double threshold) {
  MatchResult result;
  result.sourceDocId = source_id;
  result.referenceIndex = reference_index;
  const std::string* best_id = nullptr;
  double best_score = 0.0;
  for (const auto& id : candidate_ids) {
    if (id == source_id) continue;
    const DocumentRecord* doc = docs_by_id(id);
    if (!doc) {
      warn("candidate '" + id + "' has no metadata in the corpus; skipped");
      continue;
    }
    const double s = model.score(feature_vector(citation, *doc, FeatureMode::Pipeline));
    if (!best_id || s > best_score || (s == best_score && id < *best_id)) {
      best_id = &id;
      best_score = s;
    }
  }
  if (best_id) {
    result.score = best_score;
    if (best_score >= threshold) result.matchedDocId = *best_id;
  }
  return result;
}

}  // namespace citematch
