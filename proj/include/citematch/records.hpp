#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace citematch {

// A field-tagged citation.
struct ParsedCitation {
  std::string raw;
  std::string authorText;
  std::string titleText;
  std::string sourceText;
  std::set<std::int64_t> yearNumbers;
  std::set<std::int64_t> pageNumbers;
  std::vector<std::string> authorTokens;

  bool operator==(const ParsedCitation&) const = default;
};

// A reference entry of a document: either a raw string that still needs
// parsing, or an already parsed citation.
using Reference = std::variant<std::string, ParsedCitation>;

struct DocumentRecord {
  std::string id;
  std::vector<std::string> authors;
  std::string title;
  std::string journal;
  std::optional<std::int64_t> year;
  std::set<std::int64_t> pages;
  std::vector<Reference> references;

  bool operator==(const DocumentRecord&) const = default;
};

struct MatchResult {
  std::string sourceDocId;
  std::int64_t referenceIndex = 0;
  std::optional<std::string> matchedDocId;
  double score = 0.0;

  bool operator==(const MatchResult&) const = default;
};

// Structured metadata rendered into the textual inputs the similarity
// measures consume: authors joined by spaces, journal as source.
ParsedCitation as_citation(const DocumentRecord& doc);

// Word tokens (letters or alphanumeric) of the author names, lowercased.
std::vector<std::string> author_index_tokens(const DocumentRecord& doc);

void to_json(nlohmann::json& j, const ParsedCitation& c);
void from_json(const nlohmann::json& j, ParsedCitation& c);
void to_json(nlohmann::json& j, const DocumentRecord& d);
void from_json(const nlohmann::json& j, DocumentRecord& d);
void to_json(nlohmann::json& j, const MatchResult& r);
void from_json(const nlohmann::json& j, MatchResult& r);

// Compact canonical serialization (sorted keys, no whitespace).
std::string to_canonical_json(const DocumentRecord& d);
std::string to_canonical_json(const MatchResult& r);
std::string to_canonical_json(const ParsedCitation& c);

}  // namespace citematch
