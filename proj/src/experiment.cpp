#include "citematch/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>

#include <omp.h>

#include "citematch/error.hpp"
#include "citematch/pipeline.hpp"
#include "citematch/synthetic.hpp"

namespace citematch {

namespace {

std::size_t row_offset(std::size_t i, std::size_t n) { return i * n - i * (i + 1) / 2; }

void score_row(std::span<const ParsedCitation> items, const LinearModel& model, std::size_t i,
               double* out) {
  for (std::size_t j = i + 1; j < items.size(); ++j) {
    out[j - i - 1] = model.score(feature_vector(items[i], items[j], model.mode()));
  }
}

std::vector<ParsedCitation> parse_all(std::span<const LabeledCitation> items,
                                      const TaggerModel& tagger, const Dictionaries& dicts) {
  std::vector<ParsedCitation> out;
  out.reserve(items.size());
  for (const auto& c : items) out.push_back(parse_reference(c.text, tagger, dicts));
  return out;
}

std::vector<LabeledSequence> sequences(std::span<const LabeledCitation> items) {
  std::vector<LabeledSequence> out;
  out.reserve(items.size());
  for (const auto& c : items) out.push_back(c.sequence());
  return out;
}

}  // namespace

std::vector<double> pairwise_scores(std::span<const ParsedCitation> items, const LinearModel& model,
                                    std::size_t workers) {
  const std::size_t n = items.size();
  std::vector<double> out(n < 2 ? 0 : n * (n - 1) / 2);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4) num_threads(static_cast<int>(std::max<std::size_t>(1, workers)))
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto row = static_cast<std::size_t>(i);
    score_row(items, model, row, out.data() + row_offset(row, n));
  }
  return out;
}

std::vector<double> pairwise_scores_serial(std::span<const ParsedCitation> items,
                                           const LinearModel& model) {
  const std::size_t n = items.size();
  std::vector<double> out;
  out.reserve(n < 2 ? 0 : n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out.push_back(model.score(feature_vector(items[i], items[j], model.mode())));
    }
  }
  return out;
}

std::vector<Edge> threshold_edges(std::size_t n, std::span<const double> upper, double threshold) {
  if (upper.size() != (n < 2 ? 0 : n * (n - 1) / 2)) {
    throw UsageError("score triangle does not match the item count");
  }
  std::vector<Edge> edges;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      if (is_match(upper[k], threshold)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

double token_accuracy(const TaggerModel& model, const Dictionaries& dicts,
                      std::span<const LabeledSequence> gold) {
  std::size_t total = 0;
  std::size_t right = 0;
  for (const auto& seq : gold) {
    const auto labels = model.tag(seq.tokens, dicts);
    for (std::size_t i = 0; i < labels.size(); ++i) right += labels[i] == seq.labels[i];
    total += labels.size();
  }
  return total == 0 ? 1.0 : static_cast<double>(right) / static_cast<double>(total);
}

std::vector<LabeledFeatures> citation_pair_examples(std::span<const ParsedCitation> items,
                                                    std::span<const std::string> clusters,
                                                    FeatureMode mode, std::uint64_t seed,
                                                    double negative_ratio) {
  if (items.size() != clusters.size()) throw UsageError("one cluster id per citation expected");
  std::vector<LabeledFeatures> out;
  std::vector<Edge> negatives;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      if (clusters[i] == clusters[j]) {
        out.push_back({feature_vector(items[i], items[j], mode), true});
      } else {
        negatives.emplace_back(i, j);
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::shuffle(negatives.begin(), negatives.end(), rng);
  const auto keep = std::min<std::size_t>(
      negatives.size(),
      static_cast<std::size_t>(negative_ratio * static_cast<double>(std::max<std::size_t>(out.size(), 1))));
  negatives.resize(keep);
  std::sort(negatives.begin(), negatives.end());
  for (const auto& [i, j] : negatives) out.push_back({feature_vector(items[i], items[j], mode), false});
  return out;
}

std::vector<LabeledFeatures> document_pair_examples(std::span<const ParsedCitation> items,
                                                    std::span<const std::string> cited_ids,
                                                    std::span<const DocumentRecord> docs,
                                                    const RotationIndex& index, FeatureMode mode,
                                                    std::uint64_t seed, std::size_t hard_negatives,
                                                    std::size_t random_negatives) {
  if (items.size() != cited_ids.size()) throw UsageError("one cited id per citation expected");
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < docs.size(); ++i) by_id.emplace(docs[i].id, i);
  std::mt19937_64 rng(seed);
  std::vector<LabeledFeatures> out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto it = by_id.find(cited_ids[k]);
    if (it == by_id.end()) throw DataError("cited document '" + cited_ids[k] + "' not in corpus");
    out.push_back({feature_vector(items[k], docs[it->second], mode), true});

    std::vector<std::size_t> hard;
    for (const auto& c : candidates(index, items[k])) {
      const auto h = by_id.find(c.docId);
      if (h != by_id.end() && h->second != it->second) hard.push_back(h->second);
    }
    std::shuffle(hard.begin(), hard.end(), rng);
    hard.resize(std::min(hard.size(), hard_negatives));
    for (auto h : hard) out.push_back({feature_vector(items[k], docs[h], mode), false});

    if (docs.size() > 1) {
      std::uniform_int_distribution<std::size_t> pick(0, docs.size() - 2);
      for (std::size_t r = 0; r < random_negatives; ++r) {
        std::size_t d = pick(rng);
        if (d >= it->second) ++d;
        out.push_back({feature_vector(items[k], docs[d], mode), false});
      }
    }
  }
  return out;
}

ClusterReport evaluate_clusters(const Clustering& gold, const Clustering& predicted) {
  return {cluster_recall(gold, predicted), pairwise_metrics(gold, predicted)};
}

std::vector<FoldResult> cross_validate(std::span<const LabeledCitation> data,
                                       const Dictionaries& dicts, const CrossValOptions& options) {
  const std::size_t slices = options.slices;
  if (slices < 3) throw UsageError("cross-validation needs at least 3 slices");
  std::vector<std::string> cluster_names;
  for (const auto& c : data) {
    if (c.cluster.empty()) throw DataError("cross-validation needs a cluster id on every citation");
    cluster_names.push_back(c.cluster);
  }
  std::sort(cluster_names.begin(), cluster_names.end());
  cluster_names.erase(std::unique(cluster_names.begin(), cluster_names.end()), cluster_names.end());
  if (cluster_names.size() < slices) throw DataError("fewer clusters than slices");
  std::mt19937_64 rng(options.seed);
  std::shuffle(cluster_names.begin(), cluster_names.end(), rng);
  std::map<std::string, std::size_t> slice_of;
  for (std::size_t k = 0; k < cluster_names.size(); ++k) slice_of[cluster_names[k]] = k % slices;

  std::vector<std::vector<LabeledCitation>> slice_items(slices);
  for (const auto& c : data) slice_items[slice_of[c.cluster]].push_back(c);

  std::vector<FoldResult> folds;
  for (std::size_t f = 0; f < slices; ++f) {
    const auto& parser_set = slice_items[f];
    const auto& matcher_set = slice_items[(f + 1) % slices];
    const auto& test_set = slice_items[(f + 2) % slices];

    const auto parser_seqs = sequences(parser_set);
    const auto tagger = train_tagger(parser_seqs, options.tagger, dicts);

    FoldResult fold;
    fold.fold = f;
    fold.test_citations = test_set.size();
    fold.parser_accuracy = token_accuracy(tagger, dicts, sequences(test_set));

    const auto matcher_parsed = parse_all(matcher_set, tagger, dicts);
    const auto test_parsed = parse_all(test_set, tagger, dicts);
    std::vector<std::string> matcher_clusters;
    for (const auto& c : matcher_set) matcher_clusters.push_back(c.cluster);

    std::map<std::string, std::size_t> test_cluster_ids;
    std::vector<std::size_t> gold_labels;
    for (const auto& c : test_set) {
      gold_labels.push_back(test_cluster_ids.emplace(c.cluster, test_cluster_ids.size()).first->second);
    }
    fold.test_clusters = test_cluster_ids.size();
    const auto gold = Clustering::from_labels(gold_labels);

    for (auto mode : {FeatureMode::Full, FeatureMode::Simple}) {
      const auto examples =
          citation_pair_examples(matcher_parsed, matcher_clusters, mode, options.seed + f);
      const auto model = train_matcher(examples, options.matcher);
      const auto scores = pairwise_scores(test_parsed, model, options.workers);
      const auto edges = threshold_edges(test_parsed.size(), scores, options.threshold);
      const auto report = evaluate_clusters(gold, single_link(test_parsed.size(), edges));
      (mode == FeatureMode::Full ? fold.complex : fold.simple) = report;
    }
    folds.push_back(fold);
  }
  return folds;
}

void print_cross_validation(std::ostream& out, std::span<const FoldResult> folds) {
  auto table = [&](const char* title, auto member) {
    out << title << "\n";
    char buf[64];
    out << "                    ";
    for (const auto& f : folds) {
      std::snprintf(buf, sizeof buf, "%10s", ("fold" + std::to_string(f.fold)).c_str());
      out << buf;
    }
    out << "      avg.\n";
    auto row = [&](const char* name, auto get) {
      std::snprintf(buf, sizeof buf, "%-20s", name);
      out << buf;
      double sum = 0.0;
      for (const auto& f : folds) {
        const double v = 100.0 * get(f.*member);
        sum += v;
        std::snprintf(buf, sizeof buf, "%9.2f%%", v);
        out << buf;
      }
      std::snprintf(buf, sizeof buf, "%9.2f%%", folds.empty() ? 0.0 : sum / static_cast<double>(folds.size()));
      out << buf << "\n";
    };
    row("cluster recall", [](const ClusterReport& r) { return r.cluster_recall; });
    row("pairwise precision", [](const ClusterReport& r) { return r.pairwise.precision; });
    row("pairwise recall", [](const ClusterReport& r) { return r.pairwise.recall; });
    row("pairwise F1", [](const ClusterReport& r) { return r.pairwise.f1; });
  };
  table("Matching results with complex author similarity", &FoldResult::complex);
  out << "\n";
  table("Matching results with simple author similarity", &FoldResult::simple);
}

SyntheticMatchResult synthetic_matching(const SyntheticMatchOptions& options) {
  if (options.scratch.empty()) throw UsageError("synthetic matching needs a scratch directory");
  const auto corpus = synth::make_citation_corpus(options.documents, options.refs_min,
                                                  options.refs_max, options.seed);
  const auto& docs = corpus.documents;
  std::unordered_map<std::string, std::size_t> doc_index;
  for (std::size_t i = 0; i < docs.size(); ++i) doc_index.emplace(docs[i].id, i);

  const std::size_t quarter = docs.size() / 4;
  const std::size_t half = docs.size() / 2;
  std::vector<LabeledCitation> parser_set;
  std::vector<LabeledCitation> matcher_set;
  std::vector<std::size_t> test_ids;  // indexes into corpus.citations
  for (std::size_t k = 0; k < corpus.citations.size(); ++k) {
    const std::size_t cited = doc_index.at(corpus.citations[k].cluster);
    if (cited < quarter) {
      parser_set.push_back(corpus.citations[k]);
    } else if (cited < half) {
      matcher_set.push_back(corpus.citations[k]);
    } else {
      test_ids.push_back(k);
    }
  }

  const Dictionaries dicts = Dictionaries::bundled();
  const auto tagger = train_tagger(sequences(parser_set), options.tagger, dicts);

  SyntheticMatchResult result;
  {
    std::vector<LabeledSequence> test_seqs;
    for (auto k : test_ids) test_seqs.push_back(corpus.citations[k].sequence());
    result.parser_accuracy = token_accuracy(tagger, dicts, test_seqs);
  }

  const auto index = RotationIndex::build(docs);
  const auto matcher_parsed = parse_all(matcher_set, tagger, dicts);
  std::vector<std::string> cited_ids;
  for (const auto& c : matcher_set) cited_ids.push_back(c.cluster);
  const auto examples = document_pair_examples(matcher_parsed, cited_ids, docs, index,
                                               FeatureMode::Pipeline, options.seed);
  const auto model = train_matcher(examples, options.matcher);

  std::filesystem::create_directories(options.scratch);
  const auto docs_seq = options.scratch / "docs.seq";
  const auto index_dir = options.scratch / "index";
  const auto matches_seq = options.scratch / "matches.seq";
  write_corpus_seq(docs_seq, docs);
  PipelineOptions pipeline;
  pipeline.workers = options.workers;
  pipeline.scratch = options.scratch;
  job_build_index(docs_seq, index_dir, pipeline);
  MatchOptions match;
  match.threshold = options.threshold;
  match.pipeline = pipeline;
  job_match(docs_seq, index_dir, MatchResources{model, tagger, dicts}, match, matches_seq);

  std::map<std::pair<std::size_t, std::size_t>, MatchResult> by_place;
  for (auto& r : read_match_results(matches_seq)) {
    const std::size_t citing = doc_index.at(r.sourceDocId);
    by_place.emplace(std::make_pair(citing, static_cast<std::size_t>(r.referenceIndex)), std::move(r));
  }

  const std::size_t n = docs.size();
  std::vector<std::size_t> gold(n + test_ids.size());
  std::iota(gold.begin(), gold.begin() + static_cast<std::ptrdiff_t>(n), std::size_t{0});
  std::vector<Edge> edges;
  for (std::size_t t = 0; t < test_ids.size(); ++t) {
    const auto& c = corpus.citations[test_ids[t]];
    const std::size_t cited = doc_index.at(c.cluster);
    gold[n + t] = cited;
    const auto it = by_place.find(corpus.placement[test_ids[t]]);
    if (it == by_place.end() || !it->second.matchedDocId) continue;
    ++result.matched;
    const std::size_t matched = doc_index.at(*it->second.matchedDocId);
    result.correct += matched == cited;
    edges.emplace_back(matched, n + t);
  }
  result.test_citations = test_ids.size();
  result.report = evaluate_clusters(Clustering::from_labels(gold), single_link(gold.size(), edges));
  return result;
}

}  // namespace citematch
