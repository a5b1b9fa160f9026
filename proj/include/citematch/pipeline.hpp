#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "citematch/match_model.hpp"
#include "citematch/records.hpp"
#include "citematch/reference_parser.hpp"
#include "citematch/rotation_index.hpp"
#include "citematch/seqfile.hpp"

namespace citematch {

// --- corpus storage --------------------------------------------------------

struct IngestRejection {
  std::size_t line = 0;
  std::string reason;
};

// JSON-lines corpus, one DocumentRecord per line. Malformed lines are
// reported in `rejections` and skipped; blank lines are ignored.
std::vector<DocumentRecord> read_corpus_jsonl(std::istream& in,
                                              std::vector<IngestRejection>& rejections);
void write_corpus_jsonl(std::ostream& out, std::span<const DocumentRecord> docs);

// SeqFile corpus: key = document id, value = canonical JSON record.
std::uint64_t write_corpus_seq(const std::filesystem::path& path,
                               std::span<const DocumentRecord> docs);
std::vector<DocumentRecord> read_corpus_seq(const std::filesystem::path& path);

// --- jobs ------------------------------------------------------------------

struct PipelineOptions {
  std::size_t workers = 1;
  std::size_t partitions = 4;
  std::filesystem::path scratch;  // defaults next to the output
  std::size_t memory_budget = 256u << 20;
  std::size_t index_interval = 128;
};

struct IndexBuildStats {
  std::uint64_t documents = 0;
  std::uint64_t tokens = 0;
  std::uint64_t entries = 0;
  double grouping_seconds = 0.0;
  double rotation_seconds = 0.0;
  double sort_seconds = 0.0;
  double total_seconds() const { return grouping_seconds + rotation_seconds + sort_seconds; }
};

// Index building as two map-reduce passes plus a sort into a MapFile:
// doc -> (token, id) -> grouped ids per token -> (rotation key, ids).
IndexBuildStats job_build_index(const std::filesystem::path& docs_seq,
                                const std::filesystem::path& out_dir,
                                const PipelineOptions& options = {});

// Composite (document id, reference index) key; sorts and groups bytewise.
std::string citation_key(std::string_view doc_id, std::uint32_t reference_index);
std::pair<std::string, std::uint32_t> split_citation_key(std::string_view key);

struct MatchOptions {
  double threshold = 0.5;
  bool exact_verify = false;
  PipelineOptions pipeline;
};

struct MatchStats {
  std::uint64_t citations = 0;
  std::uint64_t matched = 0;
  std::uint64_t unmatched = 0;
  std::uint64_t candidate_pairs = 0;
  double extraction_seconds = 0.0;
  double heuristic_seconds = 0.0;
  double selection_seconds = 0.0;
};

struct MatchResources {
  const LinearModel& model;
  const TaggerModel& parser;
  const Dictionaries& dicts;
};

// Citation extraction (map), heuristic candidate retrieval (map) and best
// match selection (reduce). Writes MatchResult JSON values keyed by
// citation_key to `output_seq`.
MatchStats job_match(const std::filesystem::path& docs_seq, const std::filesystem::path& index_dir,
                     const MatchResources& resources, const MatchOptions& options,
                     const std::filesystem::path& output_seq);

// Straight-line single-threaded matcher over an in-memory index; the oracle
// for job_match. Ordered like read_match_results.
std::vector<MatchResult> match_reference(std::span<const DocumentRecord> docs,
                                         const RotationIndex& index,
                                         const MatchResources& resources,
                                         const MatchOptions& options);

// Matches one citation against candidate documents. `docs_by_id` resolves
// candidate metadata; unknown ids are skipped with a warning.
template <typename Lookup>
MatchResult select_best(const std::string& source_id, std::uint32_t reference_index,
                        const ParsedCitation& citation, std::span<const std::string> candidate_ids,
                        Lookup&& docs_by_id, const LinearModel& model, double threshold);

// (citation_key, canonical JSON) records sorted by key.
std::vector<KVRecord> match_records(std::span<const MatchResult> results);

// Results of a match output file ordered by (sourceDocId, referenceIndex).
// The file itself is in partition order.
std::vector<MatchResult> read_match_results(const std::filesystem::path& seq);

// Human-readable job summaries; elapsed times as h:mm:ss.ss per phase.
void print_index_summary(std::ostream& out, const IndexBuildStats& stats);
void print_match_summary(std::ostream& out, const MatchStats& stats);

}  // namespace citematch

#include "citematch/pipeline_impl.hpp"
