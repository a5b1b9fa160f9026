#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citematch/records.hpp"

namespace citematch {

// Character trigrams (code points, not bytes) with multiplicity.
using TrigramMultiset = std::map<std::string, int>;

TrigramMultiset trigram_multiset(std::string_view s);

// Dice coefficient 2|A∩B| / (|A|+|B|) over trigram multisets. When both
// strings are shorter than three characters the result is 1 iff they are equal.
double sim_trigram(std::string_view s, std::string_view t);

// Dice coefficient over multisets of lowercased word tokens; punctuation is
// ignored. Two token-free strings compare as 1.
double sim_token(std::string_view s, std::string_view t);

std::size_t levenshtein(std::string_view a, std::string_view b);

// Levenshtein distance, except that a short (<= 2 characters) prefix of the
// other token counts as distance 1, so "J" vs "John" is 1.
std::size_t edit_distance_ex(std::string_view a, std::string_view b);

// 1 - edit_distance_ex / longer length, in [0, 1]. Tokens must be non-empty.
double token_pair_similarity(std::string_view a, std::string_view b);

struct BoundaryPositions {
  std::vector<double> a;
  std::vector<double> b;
};

// Normalised [0,1] positions of two author token sequences after aligning
// exactly equal tokens ("boundaries") to their averaged position.
BoundaryPositions boundary_positions(std::span<const std::string> tokens_a,
                                     std::span<const std::string> tokens_b);

// Maximum total weight of a one-to-one partial matching between rows and
// columns of a non-negative weight matrix (Hungarian algorithm).
// `assignment`, when given, receives the matched column of every row (-1 if none).
double max_weight_assignment(const std::vector<std::vector<double>>& weights,
                             std::vector<int>* assignment = nullptr);

// Heaviest token matching with pair weight
//   token_pair_similarity * (1 - |position distance|),
// normalised by the longer sequence.
double sim_author_complex(std::span<const std::string> a, std::span<const std::string> b);

struct SimpleAuthorSimilarity {
  double tokenSim = 0.0;
  double trigramSim = 0.0;
};

SimpleAuthorSimilarity sim_author_simple(std::string_view a, std::string_view b);

std::size_t lcs_length(std::u32string_view a, std::u32string_view b);
double sim_source(std::string_view a, std::string_view b);
double sim_title(std::string_view a, std::string_view b);
double sim_year(const std::set<std::int64_t>& a, const std::set<std::int64_t>& b);
double sim_pages(const std::set<std::int64_t>& a, const std::set<std::int64_t>& b);

struct WholeStringSimilarity {
  double raw = 0.0;
  double letters = 0.0;
  double digits = 0.0;
};

WholeStringSimilarity whole_string_features(std::string_view a, std::string_view b);

// Full: every feature. Simple: Full with the simple author measure only.
// Pipeline: simple author measure, no whole-string features.
enum class FeatureMode { Full, Simple, Pipeline };

inline bool has_author_complex(FeatureMode m) { return m == FeatureMode::Full; }
inline bool has_whole_string(FeatureMode m) { return m != FeatureMode::Pipeline; }

const char* to_string(FeatureMode mode);
std::optional<FeatureMode> parse_feature_mode(std::string_view name);

struct SimilarityFeatures {
  FeatureMode mode = FeatureMode::Full;
  std::optional<double> authorComplex;
  double authorTokenSim = 0.0;
  double authorTrigramSim = 0.0;
  double sourceLcs = 0.0;
  double titleTrigram = 0.0;
  double yearEqual = 0.0;
  double pagesJaccard = 0.0;
  std::optional<double> wholeRaw;
  std::optional<double> wholeLetters;
  std::optional<double> wholeDigits;

  // Feature names of a mode, in the order used by values().
  static std::span<const std::string_view> names(FeatureMode mode);
  std::vector<double> values() const;
  static SimilarityFeatures from_values(FeatureMode mode, std::span<const double> values);
};

SimilarityFeatures feature_vector(const ParsedCitation& a, const ParsedCitation& b,
                                  FeatureMode mode);
SimilarityFeatures feature_vector(const ParsedCitation& a, const DocumentRecord& b,
                                  FeatureMode mode);

}  // namespace citematch
