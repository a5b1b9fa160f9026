#include "citematch/rotation_index.hpp"

#include <algorithm>
#include <unordered_set>

#include "citematch/error.hpp"
#include "citematch/field_similarity.hpp"
#include "citematch/unicode.hpp"

namespace citematch {

namespace {

constexpr char kSentinel = '$';

std::size_t code_points(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

}  // namespace

std::vector<std::string> rotations(std::string_view w) {
  if (w.empty()) throw DataError("cannot index an empty token");
  if (w.find(kSentinel) != std::string_view::npos) {
    throw DataError("token '" + std::string(w) + "' contains the reserved character '$'");
  }
  std::u32string chars = unicode::to_u32(w);
  chars.push_back(U'$');
  std::vector<std::string> out;
  out.reserve(chars.size());
  for (std::size_t i = 0; i < chars.size(); ++i) {
    std::u32string r = chars.substr(i) + chars.substr(0, i);
    out.push_back(unicode::to_utf8(r));
  }
  return out;
}

std::string unrotate(std::string_view key) {
  const auto pos = key.find(kSentinel);
  if (pos == std::string_view::npos) throw DataError("rotation key without '$'");
  return std::string(key.substr(pos + 1)) + std::string(key.substr(0, pos));
}

RotationIndex RotationIndex::build(std::span<const DocumentRecord> docs) {
  std::map<std::string, std::set<std::string>, std::less<>> by_token;
  std::unordered_set<std::string> ids;
  for (const auto& doc : docs) {
    if (!ids.insert(doc.id).second) throw DataError("duplicate document id '" + doc.id + "'");
    for (auto& token : author_index_tokens(doc)) by_token[std::move(token)].insert(doc.id);
  }
  RotationIndex index;
  for (const auto& [token, doc_ids] : by_token) {
    for (auto& key : rotations(token)) {
      index.entries_[std::move(key)] = PostingList(doc_ids.begin(), doc_ids.end());
    }
  }
  return index;
}

void RotationIndex::add(std::string_view token, const std::string& doc_id) {
  const auto lowered = unicode::to_lower(token);
  for (auto& key : rotations(lowered)) {
    auto& postings = entries_[std::move(key)];
    auto it = std::lower_bound(postings.begin(), postings.end(), doc_id);
    if (it == postings.end() || *it != doc_id) postings.insert(it, doc_id);
  }
}

void RotationIndex::scan_from(
    std::string_view from,
    const std::function<bool(std::string_view key, const AppendPostings&)>& visit) const {
  for (auto it = entries_.lower_bound(from); it != entries_.end(); ++it) {
    const PostingList& postings = it->second;
    const AppendPostings append = [&postings](std::set<std::string>& out) {
      out.insert(postings.begin(), postings.end());
    };
    if (!visit(it->first, append)) return;
  }
}

void MapFileRotationIndex::scan_from(
    std::string_view from,
    const std::function<bool(std::string_view key, const AppendPostings&)>& visit) const {
  reader_.scan_from(from, [&](std::string_view key, std::string_view value) {
    const AppendPostings append = [value](std::set<std::string>& out) {
      const auto ids = nlohmann::json::parse(value);
      for (const auto& id : ids) out.insert(id.get<std::string>());
    };
    return visit(key, append);
  });
}

std::set<std::string> lookup_token(const RotationKeySource& index, std::string_view q,
                                   const LookupOptions& options) {
  const std::string query = unicode::to_lower(q);
  std::set<std::string> out;
  for (const auto& r : rotations(query)) {
    const std::size_t n = code_points(r);
    // Drop the last code point: r = b + c.
    std::size_t cut = r.size() - 1;
    while (cut > 0 && (static_cast<unsigned char>(r[cut]) & 0xC0) == 0x80) --cut;
    const std::string_view b(r.data(), cut);
    index.scan_from(b, [&](std::string_view key, const RotationKeySource::AppendPostings& append) {
      if (!key.starts_with(b)) return false;
      const std::size_t len = code_points(key);
      if (len <= n || (len <= n + 1 && key.starts_with(r))) {
        if (!options.exact_verify || levenshtein(unrotate(key), query) <= 1) append(out);
      }
      return true;
    });
  }
  return out;
}

std::vector<Candidate> filter_candidates(const std::map<std::string, std::size_t>& counts) {
  std::size_t best = 0;
  for (const auto& [id, c] : counts) best = std::max(best, c);
  const std::size_t threshold = std::max<std::size_t>(1, best > 0 ? best - 1 : 0);
  std::vector<Candidate> out;
  for (const auto& [id, c] : counts) {
    if (c >= threshold) out.push_back({id, c});
  }
  return out;
}

std::vector<Candidate> candidates(const RotationKeySource& index, const ParsedCitation& citation,
                                  const LookupOptions& options) {
  std::set<std::string> tokens;
  for (const auto& t : citation.authorTokens) {
    if (!t.empty()) tokens.insert(unicode::to_lower(t));
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& t : tokens) {
    for (const auto& id : lookup_token(index, t, options)) ++counts[id];
  }
  return filter_candidates(counts);
}

}  // namespace citematch
