#include "citematch/records.hpp"

#include "citematch/error.hpp"
#include "citematch/tokenizer.hpp"
#include "citematch/unicode.hpp"

namespace citematch {

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

template <typename T>
T field_or(const nlohmann::json& j, const char* name, T fallback) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

}  // namespace

ParsedCitation as_citation(const DocumentRecord& doc) {
  ParsedCitation c;
  c.authorText = join(doc.authors, " ");
  c.titleText = doc.title;
  c.sourceText = doc.journal;
  if (doc.year) c.yearNumbers.insert(*doc.year);
  c.pageNumbers = doc.pages;
  for (const auto& name : doc.authors) {
    for (auto& t : tokenize(name)) {
      if (t.is_word()) c.authorTokens.push_back(std::move(t.text));
    }
  }
  std::string raw = join(doc.authors, ", ");
  if (!doc.title.empty()) raw += ". " + doc.title;
  if (!doc.journal.empty()) raw += ". " + doc.journal;
  if (doc.year) raw += ", " + std::to_string(*doc.year);
  if (!doc.pages.empty()) {
    raw += ", pp. " + std::to_string(*doc.pages.begin());
    if (doc.pages.size() > 1) raw += "-" + std::to_string(*doc.pages.rbegin());
  }
  raw += ".";
  c.raw = std::move(raw);
  return c;
}

std::vector<std::string> author_index_tokens(const DocumentRecord& doc) {
  std::vector<std::string> out;
  for (const auto& name : doc.authors) {
    for (const auto& t : tokenize(name)) {
      if (t.is_word()) out.push_back(unicode::to_lower(t.text));
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const ParsedCitation& c) {
  j = nlohmann::json{{"raw", c.raw},
                     {"authorText", c.authorText},
                     {"titleText", c.titleText},
                     {"sourceText", c.sourceText},
                     {"yearNumbers", c.yearNumbers},
                     {"pageNumbers", c.pageNumbers},
                     {"authorTokens", c.authorTokens}};
}

void from_json(const nlohmann::json& j, ParsedCitation& c) {
  if (!j.is_object()) throw DataError("parsed citation must be a JSON object");
  c.raw = field_or<std::string>(j, "raw", "");
  c.authorText = field_or<std::string>(j, "authorText", "");
  c.titleText = field_or<std::string>(j, "titleText", "");
  c.sourceText = field_or<std::string>(j, "sourceText", "");
  c.yearNumbers = field_or<std::set<std::int64_t>>(j, "yearNumbers", {});
  c.pageNumbers = field_or<std::set<std::int64_t>>(j, "pageNumbers", {});
  if (j.contains("authorTokens") && !j["authorTokens"].is_null()) {
    c.authorTokens = j["authorTokens"].get<std::vector<std::string>>();
  } else {
    c.authorTokens.clear();
    for (auto& t : tokenize(c.authorText)) {
      if (t.is_word()) c.authorTokens.push_back(std::move(t.text));
    }
  }
}

void to_json(nlohmann::json& j, const DocumentRecord& d) {
  nlohmann::json refs = nlohmann::json::array();
  for (const auto& r : d.references) {
    if (const auto* s = std::get_if<std::string>(&r)) {
      refs.push_back(*s);
    } else {
      refs.push_back(std::get<ParsedCitation>(r));
    }
  }
  j = nlohmann::json{{"id", d.id},
                     {"authors", d.authors},
                     {"title", d.title},
                     {"journal", d.journal},
                     {"year", d.year ? nlohmann::json(*d.year) : nlohmann::json(nullptr)},
                     {"pages", d.pages},
                     {"references", std::move(refs)}};
}

void from_json(const nlohmann::json& j, DocumentRecord& d) {
  if (!j.is_object()) throw DataError("document record must be a JSON object");
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw DataError("document record needs a non-empty string id");
  }
  d.id = id->get<std::string>();
  d.authors = field_or<std::vector<std::string>>(j, "authors", {});
  d.title = field_or<std::string>(j, "title", "");
  d.journal = field_or<std::string>(j, "journal", "");
  d.year.reset();
  if (j.contains("year") && !j["year"].is_null()) d.year = j["year"].get<std::int64_t>();
  d.pages = field_or<std::set<std::int64_t>>(j, "pages", {});
  d.references.clear();
  if (j.contains("references") && !j["references"].is_null()) {
    for (const auto& r : j["references"]) {
      if (r.is_string()) {
        d.references.emplace_back(r.get<std::string>());
      } else {
        d.references.emplace_back(r.get<ParsedCitation>());
      }
    }
  }
}

void to_json(nlohmann::json& j, const MatchResult& r) {
  j = nlohmann::json{{"sourceDocId", r.sourceDocId},
                     {"referenceIndex", r.referenceIndex},
                     {"matchedDocId", r.matchedDocId ? nlohmann::json(*r.matchedDocId)
                                                     : nlohmann::json(nullptr)},
                     {"score", r.score}};
}

void from_json(const nlohmann::json& j, MatchResult& r) {
  r.sourceDocId = j.at("sourceDocId").get<std::string>();
  r.referenceIndex = j.at("referenceIndex").get<std::int64_t>();
  r.matchedDocId.reset();
  if (!j.at("matchedDocId").is_null()) r.matchedDocId = j["matchedDocId"].get<std::string>();
  r.score = j.at("score").get<double>();
}

namespace {
std::string dump(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}
}  // namespace

std::string to_canonical_json(const DocumentRecord& d) { return dump(d); }
std::string to_canonical_json(const MatchResult& r) { return dump(r); }
std::string to_canonical_json(const ParsedCitation& c) { return dump(c); }

}  // namespace citematch
