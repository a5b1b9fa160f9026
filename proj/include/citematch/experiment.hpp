#pragma once

// Evaluation harness: citation-pair scoring, training-pair construction,
// three-slice cross-validation and the end-to-end synthetic matching run.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "citematch/clustering_eval.hpp"
#include "citematch/labeled.hpp"
#include "citematch/match_model.hpp"
#include "citematch/rotation_index.hpp"

namespace citematch {

// Upper triangle of the score matrix, row-major: (0,1), (0,2), ..., (1,2), ...
// The parallel version splits rows across `workers` threads.
std::vector<double> pairwise_scores(std::span<const ParsedCitation> items, const LinearModel& model,
                                    std::size_t workers);
std::vector<double> pairwise_scores_serial(std::span<const ParsedCitation> items,
                                           const LinearModel& model);

// Pairs (i, j), i < j, whose score reaches `threshold`, in row-major order.
std::vector<Edge> threshold_edges(std::size_t n, std::span<const double> upper, double threshold);

double token_accuracy(const TaggerModel& model, const Dictionaries& dicts,
                      std::span<const LabeledSequence> gold);

// Every same-cluster pair as a match, and up to `negative_ratio` times as many
// random cross-cluster pairs as non-matches.
std::vector<LabeledFeatures> citation_pair_examples(std::span<const ParsedCitation> items,
                                                    std::span<const std::string> clusters,
                                                    FeatureMode mode, std::uint64_t seed,
                                                    double negative_ratio = 4.0);

// Each citation against the document it cites (match), against up to
// `hard_negatives` other documents retrieved by the index, and against
// `random_negatives` random documents (non-matches).
std::vector<LabeledFeatures> document_pair_examples(std::span<const ParsedCitation> items,
                                                    std::span<const std::string> cited_ids,
                                                    std::span<const DocumentRecord> docs,
                                                    const RotationIndex& index, FeatureMode mode,
                                                    std::uint64_t seed,
                                                    std::size_t hard_negatives = 6,
                                                    std::size_t random_negatives = 2);

struct ClusterReport {
  double cluster_recall = 0.0;
  PairwiseMetrics pairwise;
};

ClusterReport evaluate_clusters(const Clustering& gold, const Clustering& predicted);

struct CrossValOptions {
  std::size_t slices = 3;
  std::uint64_t seed = 1;
  TaggerTrainingOptions tagger;
  MatcherTrainingOptions matcher;
  double threshold = 0.5;
  std::size_t workers = 1;
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t test_citations = 0;
  std::size_t test_clusters = 0;
  double parser_accuracy = 0.0;
  ClusterReport complex;  // Full features
  ClusterReport simple;   // Simple features
};

// Clusters are dealt into slices at random. Fold f trains the parser on slice
// f, the matcher on slice f+1 and tests on slice f+2 (mod slices); test
// citations are parsed, scored pairwise, thresholded and single-linked.
std::vector<FoldResult> cross_validate(std::span<const LabeledCitation> data,
                                       const Dictionaries& dicts, const CrossValOptions& options);

// Two tables, complex then simple author similarity, one column per fold plus
// the average, percentages with two decimals.
void print_cross_validation(std::ostream& out, std::span<const FoldResult> folds);

struct SyntheticMatchOptions {
  std::size_t documents = 300;
  std::size_t refs_min = 3;
  std::size_t refs_max = 6;
  std::uint64_t seed = 7;
  TaggerTrainingOptions tagger;
  MatcherTrainingOptions matcher;
  double threshold = 0.5;
  std::size_t workers = 1;
  std::filesystem::path scratch;  // required
};

struct SyntheticMatchResult {
  std::size_t test_citations = 0;
  std::size_t matched = 0;
  std::size_t correct = 0;
  double parser_accuracy = 0.0;
  ClusterReport report;
};

// Generates a citing corpus, trains the parser on the citations of the first
// quarter of documents and the matcher on the second quarter, then runs the
// index and match jobs and evaluates the citations of the second half.
// Items are all documents plus the test citations; a citation's gold cluster
// is its cited document, its predicted cluster the matched one.
SyntheticMatchResult synthetic_matching(const SyntheticMatchOptions& options);

}  // namespace citematch
