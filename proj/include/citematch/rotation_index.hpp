#pragma once

#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citematch/mapfile.hpp"
#include "citematch/records.hpp"

namespace citematch {

// Sorted, duplicate-free document ids.
using PostingList = std::vector<std::string>;

// The |w|+1 rotations of w + '$', starting with w + '$'. Rotation is by code
// point, so UTF-8 tokens stay valid.
std::vector<std::string> rotations(std::string_view w);

// Inverse of a rotation: the token whose rotation `key` is.
std::string unrotate(std::string_view key);

// Ordered key source the lookup scans: an in-memory map or a MapFile.
class RotationKeySource {
 public:
  virtual ~RotationKeySource() = default;
  // Visits keys >= `from` in order until `visit` returns false. The second
  // argument appends that key's postings to a set when called.
  using AppendPostings = std::function<void(std::set<std::string>&)>;
  virtual void scan_from(
      std::string_view from,
      const std::function<bool(std::string_view key, const AppendPostings&)>& visit) const = 0;
};

class RotationIndex : public RotationKeySource {
 public:
  using Entries = std::map<std::string, PostingList, std::less<>>;

  RotationIndex() = default;
  // Author tokens of every document, lowercased. Duplicate ids are rejected.
  static RotationIndex build(std::span<const DocumentRecord> docs);

  void add(std::string_view token, const std::string& doc_id);
  const Entries& entries() const { return entries_; }

  void scan_from(std::string_view from,
                 const std::function<bool(std::string_view key, const AppendPostings&)>& visit)
      const override;

 private:
  Entries entries_;
};

// Rotation index stored as a MapFile whose values are JSON arrays of ids.
class MapFileRotationIndex : public RotationKeySource {
 public:
  explicit MapFileRotationIndex(const std::filesystem::path& dir) : reader_(dir) {}

  const MapFileReader& reader() const { return reader_; }

  void scan_from(std::string_view from,
                 const std::function<bool(std::string_view key, const AppendPostings&)>& visit)
      const override;

 private:
  MapFileReader reader_;
};

struct LookupOptions {
  // Drop retrieved keys whose token is more than one edit away from the query.
  bool exact_verify = false;
};

// Approximate lookup: for each rotation r = b·c of q + '$' (|c| = 1), collect
// keys with prefix b and length <= |r|, and keys with prefix r and length
// <= |r| + 1. Returns the union of their postings.
std::set<std::string> lookup_token(const RotationKeySource& index, std::string_view q,
                                   const LookupOptions& options = {});

struct Candidate {
  std::string docId;
  std::size_t matchCount = 0;

  bool operator==(const Candidate&) const = default;
};

// Documents retrieved by at least max(1, M - 1) distinct author tokens of the
// citation, M being the best count. Sorted by document id.
std::vector<Candidate> candidates(const RotationKeySource& index, const ParsedCitation& citation,
                                  const LookupOptions& options = {});

// The filter step alone, given per-document counts.
std::vector<Candidate> filter_candidates(const std::map<std::string, std::size_t>& counts);

}  // namespace citematch
