#include "citematch/pipeline.hpp"

#include <algorithm>
#include <tuple>
#include <chrono>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "citematch/mapreduce.hpp"

namespace citematch {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string dump(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::filesystem::path work_dir(const PipelineOptions& options, const std::filesystem::path& out,
                               const std::string& name) {
  auto base = options.scratch.empty() ? (out.has_parent_path() ? out.parent_path()
                                                               : std::filesystem::path("."))
                                      : options.scratch;
  return base / ("_" + name + "-" + out.filename().string());
}

JobSpec job_spec(const PipelineOptions& options, std::string name, std::filesystem::path input,
                 std::filesystem::path output, const std::filesystem::path& scratch) {
  JobSpec spec;
  spec.name = std::move(name);
  spec.inputs = {std::move(input)};
  spec.output = std::move(output);
  spec.scratch = scratch;
  spec.workers = options.workers;
  spec.partitions = options.partitions;
  spec.memory_budget = options.memory_budget;
  return spec;
}

void check_unique_ids(const std::filesystem::path& docs_seq) {
  SeqReader in(docs_seq);
  std::unordered_set<std::string> ids;
  KVRecord rec;
  while (in.next(rec)) {
    if (!ids.insert(rec.key).second) throw DataError("duplicate document id '" + rec.key + "'");
  }
}

std::unordered_map<std::string, DocumentRecord> load_metadata(const std::filesystem::path& docs_seq) {
  std::unordered_map<std::string, DocumentRecord> out;
  for (auto& doc : read_corpus_seq(docs_seq)) {
    auto id = doc.id;
    out.emplace(std::move(id), std::move(doc));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Corpus storage

std::vector<DocumentRecord> read_corpus_jsonl(std::istream& in,
                                              std::vector<IngestRejection>& rejections) {
  std::vector<DocumentRecord> docs;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto doc = nlohmann::json::parse(line).get<DocumentRecord>();
      for (const auto& ref : doc.references) {
        if (const auto* parsed = std::get_if<ParsedCitation>(&ref)) {
          for (const auto& t : parsed->authorTokens) {
            if (t.find('$') != std::string::npos) {
              throw DataError("author token '" + t + "' contains the reserved character '$'");
            }
          }
        }
      }
      if (!ids.insert(doc.id).second) throw DataError("duplicate document id '" + doc.id + "'");
      docs.push_back(std::move(doc));
    } catch (const std::exception& e) {
      rejections.push_back({lineno, e.what()});
    }
  }
  return docs;
}

void write_corpus_jsonl(std::ostream& out, std::span<const DocumentRecord> docs) {
  for (const auto& d : docs) out << to_canonical_json(d) << '\n';
}

std::uint64_t write_corpus_seq(const std::filesystem::path& path,
                               std::span<const DocumentRecord> docs) {
  SeqWriter w(path);
  for (const auto& d : docs) w.append(d.id, to_canonical_json(d));
  return w.close();
}

std::vector<DocumentRecord> read_corpus_seq(const std::filesystem::path& path) {
  std::vector<DocumentRecord> docs;
  SeqReader in(path);
  KVRecord rec;
  while (in.next(rec)) {
    try {
      docs.push_back(nlohmann::json::parse(rec.value).get<DocumentRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": bad document record '" + rec.key + "': " + e.what());
    }
  }
  return docs;
}

// ---------------------------------------------------------------------------
// Index building

IndexBuildStats job_build_index(const std::filesystem::path& docs_seq,
                                const std::filesystem::path& out_dir,
                                const PipelineOptions& options) {
  check_unique_ids(docs_seq);
  const auto work = work_dir(options, out_dir, "build-index");
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);
  IndexBuildStats stats;

  try {
    auto start = Clock::now();
    const auto tokens_path = work / "tokens.seq";
    const MapFn extract_tokens = [](const KVRecord& in, Emitter& out) {
      const auto doc = nlohmann::json::parse(in.value).get<DocumentRecord>();
      for (auto& token : author_index_tokens(doc)) out.emit(std::move(token), doc.id);
    };
    const ReduceFn group_ids = [](std::string_view token, std::span<const std::string> ids,
                                  Emitter& out) {
      std::set<std::string> unique(ids.begin(), ids.end());
      out.emit(std::string(token), dump(nlohmann::json(unique)));
    };
    const auto grouped = run_job(job_spec(options, "group-tokens", docs_seq, tokens_path, work),
                                 extract_tokens, group_ids);
    stats.documents = grouped.input_records;
    stats.tokens = grouped.output_records;
    stats.grouping_seconds = seconds_since(start);

    start = Clock::now();
    const auto rotations_path = work / "rotations.seq";
    const MapFn rotate = [](const KVRecord& in, Emitter& out) {
      for (auto& key : rotations(in.key)) out.emit(std::move(key), in.value);
    };
    run_job(job_spec(options, "rotate", tokens_path, rotations_path, work), rotate);
    stats.rotation_seconds = seconds_since(start);

    start = Clock::now();
    MapFileOptions mf;
    mf.interval = options.index_interval;
    mf.scratch = work / "sort";
    mf.memory_budget = options.memory_budget;
    stats.entries = mapfile_build(rotations_path, out_dir, mf).records;
    stats.sort_seconds = seconds_since(start);
  } catch (...) {
    std::filesystem::remove_all(work);
    throw;
  }
  std::filesystem::remove_all(work);
  return stats;
}

// ---------------------------------------------------------------------------
// Matching

std::string citation_key(std::string_view doc_id, std::uint32_t reference_index) {
  std::string key;
  put_u32be(key, static_cast<std::uint32_t>(doc_id.size()));
  key.append(doc_id);
  put_u32be(key, reference_index);
  return key;
}

std::pair<std::string, std::uint32_t> split_citation_key(std::string_view key) {
  const auto* p = reinterpret_cast<const unsigned char*>(key.data());
  if (key.size() < 8) throw DataError("malformed citation key");
  const std::uint32_t len = get_u32be(p);
  if (key.size() != 8 + std::size_t{len}) throw DataError("malformed citation key");
  return {std::string(key.substr(4, len)), get_u32be(p + 4 + len)};
}

MatchStats job_match(const std::filesystem::path& docs_seq, const std::filesystem::path& index_dir,
                     const MatchResources& resources, const MatchOptions& options,
                     const std::filesystem::path& output_seq) {
  if (resources.model.mode() != FeatureMode::Pipeline) {
    throw UsageError("the matching job needs a Pipeline-mode match model");
  }
  const MapFileRotationIndex index(index_dir);
  const auto metadata = load_metadata(docs_seq);
  const auto work = work_dir(options.pipeline, output_seq, "match");
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);
  const LookupOptions lookup{options.exact_verify};
  MatchStats stats;

  try {
    // Citation extraction.
    auto start = Clock::now();
    const auto citations_path = work / "citations.seq";
    const MapFn extract = [](const KVRecord& in, Emitter& out) {
      const auto doc = nlohmann::json::parse(in.value).get<DocumentRecord>();
      for (std::size_t i = 0; i < doc.references.size(); ++i) {
        nlohmann::json value;
        if (const auto* raw = std::get_if<std::string>(&doc.references[i])) {
          value["raw"] = *raw;
        } else {
          value["parsed"] = std::get<ParsedCitation>(doc.references[i]);
        }
        out.emit(citation_key(doc.id, static_cast<std::uint32_t>(i)), dump(value));
      }
    };
    stats.citations = run_job(job_spec(options.pipeline, "extract-citations", docs_seq,
                                       citations_path, work),
                              extract)
                          .output_records;
    stats.extraction_seconds = seconds_since(start);

    // Heuristic matching.
    start = Clock::now();
    const auto heuristic_path = work / "heuristic.seq";
    const MapFn heuristic = [&](const KVRecord& in, Emitter& out) {
      const auto value = nlohmann::json::parse(in.value);
      const ParsedCitation citation =
          value.contains("parsed")
              ? value["parsed"].get<ParsedCitation>()
              : parse_reference(value["raw"].get<std::string>(), resources.parser, resources.dicts);
      // The citation travels once per key; candidates follow it in map order.
      out.emit(in.key, dump(nlohmann::json{{"citation", citation}}));
      for (const auto& c : candidates(index, citation, lookup)) {
        out.emit(in.key, dump(nlohmann::json{{"candidate", c.docId}}));
      }
    };
    stats.candidate_pairs = run_job(job_spec(options.pipeline, "heuristic-match", citations_path,
                                             heuristic_path, work),
                                    heuristic)
                                .output_records -
                            stats.citations;
    stats.heuristic_seconds = seconds_since(start);

    // Best-match selection.
    start = Clock::now();
    const MapFn identity = [](const KVRecord& in, Emitter& out) { out.emit(in.key, in.value); };
    const ReduceFn select = [&](std::string_view key, std::span<const std::string> values,
                                Emitter& out) {
      const auto [source_id, ref_index] = split_citation_key(key);
      ParsedCitation citation;
      std::vector<std::string> ids;
      for (const auto& value : values) {
        const auto v = nlohmann::json::parse(value);
        if (v.contains("citation")) {
          citation = v["citation"].get<ParsedCitation>();
        } else {
          ids.push_back(v["candidate"].get<std::string>());
        }
      }
      auto lookup_doc = [&](const std::string& id) -> const DocumentRecord* {
        auto it = metadata.find(id);
        return it == metadata.end() ? nullptr : &it->second;
      };
      const auto result = select_best(source_id, ref_index, citation, ids, lookup_doc,
                                      resources.model, options.threshold);
      out.emit(std::string(key), to_canonical_json(result));
    };
    run_job(job_spec(options.pipeline, "select-best", heuristic_path, output_seq, work), identity,
            select);
    stats.selection_seconds = seconds_since(start);
  } catch (...) {
    std::filesystem::remove_all(work);
    throw;
  }
  std::filesystem::remove_all(work);

  SeqReader results(output_seq);
  KVRecord rec;
  while (results.next(rec)) {
    const auto j = nlohmann::json::parse(rec.value);
    (j["matchedDocId"].is_null() ? stats.unmatched : stats.matched) += 1;
  }
  return stats;
}

std::vector<MatchResult> match_reference(std::span<const DocumentRecord> docs,
                                         const RotationIndex& index,
                                         const MatchResources& resources,
                                         const MatchOptions& options) {
  std::unordered_map<std::string, const DocumentRecord*> by_id;
  for (const auto& d : docs) by_id.emplace(d.id, &d);
  auto lookup_doc = [&](const std::string& id) -> const DocumentRecord* {
    auto it = by_id.find(id);
    return it == by_id.end() ? nullptr : it->second;
  };
  const LookupOptions lookup{options.exact_verify};
  std::vector<MatchResult> out;
  for (const auto& doc : docs) {
    for (std::size_t i = 0; i < doc.references.size(); ++i) {
      const auto& ref = doc.references[i];
      const ParsedCitation citation =
          std::holds_alternative<ParsedCitation>(ref)
              ? std::get<ParsedCitation>(ref)
              : parse_reference(std::get<std::string>(ref), resources.parser, resources.dicts);
      std::vector<std::string> ids;
      for (const auto& c : candidates(index, citation, lookup)) ids.push_back(c.docId);
      out.push_back(select_best(doc.id, static_cast<std::uint32_t>(i), citation, ids, lookup_doc,
                                resources.model, options.threshold));
    }
  }
  std::sort(out.begin(), out.end(), [](const MatchResult& a, const MatchResult& b) {
    return std::tie(a.sourceDocId, a.referenceIndex) < std::tie(b.sourceDocId, b.referenceIndex);
  });
  return out;
}

std::vector<KVRecord> match_records(std::span<const MatchResult> results) {
  std::vector<KVRecord> out;
  out.reserve(results.size());
  for (const auto& r : results) {
    out.push_back({citation_key(r.sourceDocId, static_cast<std::uint32_t>(r.referenceIndex)),
                   to_canonical_json(r)});
  }
  std::sort(out.begin(), out.end(),
            [](const KVRecord& a, const KVRecord& b) { return a.key < b.key; });
  return out;
}

std::vector<MatchResult> read_match_results(const std::filesystem::path& seq) {
  std::vector<MatchResult> out;
  for (const auto& rec : seq_read(seq)) {
    out.push_back(nlohmann::json::parse(rec.value).get<MatchResult>());
  }
  std::sort(out.begin(), out.end(), [](const MatchResult& a, const MatchResult& b) {
    return std::tie(a.sourceDocId, a.referenceIndex) < std::tie(b.sourceDocId, b.referenceIndex);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Summaries

namespace {

std::string clock_time(double seconds) {
  const auto total = static_cast<long long>(seconds);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%lld:%02lld:%05.2f", total / 3600, (total / 60) % 60,
                seconds - static_cast<double>(total - total % 60));
  return buf;
}

void phase(std::ostream& out, const char* name, double seconds) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "  %-26s %s\n", name, clock_time(seconds).c_str());
  out << buf;
}

}  // namespace

void print_index_summary(std::ostream& out, const IndexBuildStats& stats) {
  out << "documents        " << stats.documents << "\n"
      << "distinct tokens  " << stats.tokens << "\n"
      << "index entries    " << stats.entries << "\n"
      << "phase timings:\n";
  phase(out, "Grouping author tokens", stats.grouping_seconds);
  phase(out, "Generating rotations", stats.rotation_seconds);
  phase(out, "Sorting into MapFile", stats.sort_seconds);
  phase(out, "Index building", stats.total_seconds());
}

void print_match_summary(std::ostream& out, const MatchStats& stats) {
  out << "citations processed  " << stats.citations << "\n"
      << "matched              " << stats.matched << "\n"
      << "unmatched            " << stats.unmatched << "\n"
      << "candidate pairs      " << stats.candidate_pairs << "\n"
      << "phase timings:\n";
  phase(out, "Citation extraction", stats.extraction_seconds);
  phase(out, "Heuristic matching", stats.heuristic_seconds);
  phase(out, "Selecting the best match", stats.selection_seconds);
}

}  // namespace citematch
