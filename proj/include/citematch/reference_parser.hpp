#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "citematch/records.hpp"
#include "citematch/tokenizer.hpp"

namespace citematch {

// Declaration order is the canonical order used to break Viterbi ties.
enum class TokenLabel : std::uint8_t { Author, Title, Source, Year, Pages, Other };

inline constexpr std::size_t kLabelCount = 6;
inline constexpr std::array<TokenLabel, kLabelCount> kAllLabels = {
    TokenLabel::Author, TokenLabel::Title, TokenLabel::Source,
    TokenLabel::Year,   TokenLabel::Pages, TokenLabel::Other};

const char* to_string(TokenLabel label);
std::optional<TokenLabel> parse_label(std::string_view name);

// Named word lists used by the dictionary-membership features. The set of
// names is fixed; the contents can be replaced.
class Dictionaries {
 public:
  static constexpr std::array<std::string_view, 4> kNames = {"city", "month", "journal",
                                                             "particle"};

  Dictionaries() = default;

  // Small built-in lists.
  static Dictionaries bundled();

  void set(std::string_view name, const std::vector<std::string>& words);
  // UTF-8, one word per line; blank lines and lines starting with '#' skipped.
  void load(std::string_view name, const std::string& path);

  bool contains(std::string_view name, std::string_view word) const;
  bool contains(std::size_t dict, std::string_view lowered) const;

 private:
  static std::size_t index_of(std::string_view name);
  std::array<std::unordered_set<std::string>, kNames.size()> words_;
};

// Binary token features. Each of the 42 per-token features is instantiated for
// the focus token (prefix "0:") and for the window offsets -2, -1, +1, +2
// (prefixes "-2:", "-1:", "+1:", "+2:"). Window positions that fall outside
// the sequence fire "<offset>:oob" instead. A constant "bias" feature fires
// for every token. Total inventory: 5 * 43 + 1 = 216 names.
namespace features {

inline constexpr std::size_t kPerToken = 42;
inline constexpr std::size_t kSlotWidth = kPerToken + 1;  // + oob
inline constexpr std::array<int, 5> kOffsets = {-2, -1, 0, 1, 2};
inline constexpr std::size_t kBias = kOffsets.size() * kSlotWidth;
inline constexpr std::size_t kCount = kBias + 1;

// Names of the per-token features, in id order.
std::span<const std::string_view> base_names();
std::string name(std::size_t id);
std::optional<std::size_t> id(std::string_view name);

// Bit mask over the 42 per-token features of tokens[i].
std::uint64_t token_facts(std::span<const Token> tokens, std::size_t i,
                          const Dictionaries& dicts);

}  // namespace features

class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::vector<std::uint32_t> active) : active_(std::move(active)) {}

  // 1 if the named feature fires, 0 otherwise (including unknown names).
  int value(std::string_view name) const;
  const std::vector<std::uint32_t>& active() const { return active_; }
  std::vector<std::string> active_names() const;

  bool operator==(const FeatureVector&) const = default;

 private:
  std::vector<std::uint32_t> active_;  // sorted ids
};

FeatureVector extract_features(std::span<const Token> tokens, std::size_t i,
                               const Dictionaries& dicts);

struct LabeledSequence {
  std::vector<Token> tokens;
  std::vector<TokenLabel> labels;
};

class TaggerModel {
 public:
  TaggerModel();

  double emission(std::size_t feature, TokenLabel label) const {
    return emission_[feature * kLabelCount + static_cast<std::size_t>(label)];
  }
  // prev = nullopt is the sequence start.
  double transition(std::optional<TokenLabel> prev, TokenLabel label) const {
    const std::size_t row = prev ? static_cast<std::size_t>(*prev) + 1 : 0;
    return transition_[row * kLabelCount + static_cast<std::size_t>(label)];
  }

  std::vector<TokenLabel> tag(std::span<const Token> tokens, const Dictionaries& dicts) const;
  double score(std::span<const Token> tokens, std::span<const TokenLabel> labels,
               const Dictionaries& dicts) const;

  // Versioned tab-separated text; only non-zero weights are written.
  void save(std::ostream& out) const;
  static TaggerModel load(std::istream& in);
  void save(const std::string& path) const;
  static TaggerModel load(const std::string& path);

  bool operator==(const TaggerModel&) const = default;

 private:
  friend class TaggerTrainer;

  std::vector<TokenLabel> viterbi(const std::vector<std::vector<std::uint32_t>>& active) const;

  std::vector<double> emission_;    // kCount x kLabelCount
  std::vector<double> transition_;  // (kLabelCount + 1) x kLabelCount, row 0 = start
};

struct TaggerTrainingOptions {
  int epochs = 10;
  std::uint64_t seed = 1;
  bool shuffle = true;
};

// Averaged structured perceptron over Viterbi decoding.
TaggerModel train_tagger(std::span<const LabeledSequence> corpus,
                         const TaggerTrainingOptions& options, const Dictionaries& dicts);

inline std::vector<TokenLabel> tag(std::span<const Token> tokens, const TaggerModel& model,
                                   const Dictionaries& dicts) {
  return model.tag(tokens, dicts);
}

// Builds a ParsedCitation from labelled tokens of `raw`. Title and source
// texts keep the original spacing inside contiguous labelled runs.
ParsedCitation assemble(std::string_view raw, std::span<const Token> tokens,
                        std::span<const TokenLabel> labels);

ParsedCitation parse_reference(std::string_view raw, const TaggerModel& model,
                               const Dictionaries& dicts);

}  // namespace citematch
