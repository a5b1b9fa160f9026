// citematch: command-line front end for the citation matching pipeline.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "citematch/clustering_eval.hpp"
#include "citematch/error.hpp"
#include "citematch/experiment.hpp"
#include "citematch/labeled.hpp"
#include "citematch/pipeline.hpp"
#include "citematch/synthetic.hpp"

namespace fs = std::filesystem;
using namespace citematch;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kIo = 4, kInternal = 1 };

// Output paths must have an existing parent directory.
const CLI::Validator kWritablePath(
    [](std::string& path) -> std::string {
      const fs::path parent = fs::path(path).parent_path();
      if (!parent.empty() && !fs::is_directory(parent)) {
        return "parent directory does not exist: " + parent.string();
      }
      return {};
    },
    "WRITABLE");

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// --dict name=path, repeatable.
struct DictFlags {
  std::vector<std::string> specs;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--dict", specs, "Replace a bundled word list: name=path (city, month, journal, particle)")
        ->check([](const std::string& spec) -> std::string {
          const auto eq = spec.find('=');
          if (eq == std::string::npos) return "expected name=path";
          const auto name = spec.substr(0, eq);
          if (std::find(Dictionaries::kNames.begin(), Dictionaries::kNames.end(), name) ==
              Dictionaries::kNames.end()) {
            return "unknown dictionary '" + name + "'";
          }
          if (!fs::is_regular_file(spec.substr(eq + 1))) return "no such file: " + spec.substr(eq + 1);
          return {};
        });
  }

  Dictionaries load() const {
    auto dicts = Dictionaries::bundled();
    for (const auto& spec : specs) {
      const auto eq = spec.find('=');
      dicts.load(spec.substr(0, eq), spec.substr(eq + 1));
    }
    return dicts;
  }
};

std::vector<LabeledCitation> load_labeled(const fs::path& path) {
  auto in = open_in(path);
  return read_labeled_citations(in);
}

std::vector<DocumentRecord> load_corpus_jsonl(const fs::path& path) {
  auto in = open_in(path);
  std::vector<IngestRejection> rejections;
  auto docs = read_corpus_jsonl(in, rejections);
  if (!rejections.empty()) {
    throw DataError(path.string() + " line " + std::to_string(rejections.front().line) + ": " +
                    rejections.front().reason);
  }
  return docs;
}

// "id TAB citation text" lines.
std::vector<std::pair<std::string, std::string>> load_citation_lines(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError(path.string() + " line " + std::to_string(lineno) + ": expected id<TAB>citation");
    }
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

// --- commands ---------------------------------------------------------------

struct IngestCmd {
  std::string docs, out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("ingest", "Convert a JSON-lines corpus into a SeqFile");
    cmd->add_option("--docs", docs, "JSON-lines corpus")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "Output SeqFile")->required()->check(kWritablePath);
    cmd->callback([this] { code = run(); });
  }

  int run() {
    auto in = open_in(docs);
    std::vector<IngestRejection> rejections;
    const auto records = read_corpus_jsonl(in, rejections);
    write_corpus_seq(out, records);
    for (const auto& r : rejections) {
      std::cerr << docs << ":" << r.line << ": rejected: " << r.reason << "\n";
    }
    std::cout << "ingested " << records.size() << " documents";
    if (!rejections.empty()) std::cout << ", rejected " << rejections.size() << " lines";
    std::cout << "\n";
    return rejections.empty() ? kOk : kData;
  }

  int code = kOk;
};

struct BuildIndexCmd {
  std::string docs, out, scratch;
  std::size_t workers = default_workers();
  std::size_t interval = 128;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("build-index", "Build the on-disk author rotation index");
    cmd->add_option("--docs", docs, "Corpus SeqFile (from ingest)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "Index directory")->required()->check(kWritablePath);
    cmd->add_option("--workers", workers, "Parallel workers")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--interval", interval, "Index sampling interval")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--scratch", scratch, "Scratch directory")->check(CLI::ExistingDirectory);
    cmd->callback([this] { code = run(); });
  }

  int run() {
    PipelineOptions options;
    options.workers = workers;
    options.index_interval = interval;
    options.scratch = scratch;
    const auto stats = job_build_index(docs, out, options);
    print_index_summary(std::cout, stats);
    return kOk;
  }

  int code = kOk;
};

struct MatchCmd {
  std::string docs, index, parser_model, match_model, out, scratch;
  double threshold = 0.5;
  std::size_t workers = default_workers();
  bool exact_verify = false;
  DictFlags dicts;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("match", "Match every reference of a corpus against the index");
    cmd->add_option("--docs", docs, "Corpus SeqFile")->required()->check(CLI::ExistingFile);
    cmd->add_option("--index", index, "Index directory")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--parser-model", parser_model, "Tagger model")->required()->check(CLI::ExistingFile);
    cmd->add_option("--match-model", match_model, "Pipeline-mode match model")->required()->check(CLI::ExistingFile);
    cmd->add_option("--threshold", threshold, "Acceptance threshold; 0 keeps every best candidate")
        ->check(CLI::Range(0.0, 1.0))->capture_default_str();
    cmd->add_option("--workers", workers, "Parallel workers")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_flag("--exact-verify", exact_verify, "Drop index hits more than one edit from the query token");
    cmd->add_option("--out", out, "MatchResult JSON lines; the SeqFile goes to <out>.seq")
        ->required()->check(kWritablePath);
    cmd->add_option("--scratch", scratch, "Scratch directory")->check(CLI::ExistingDirectory);
    dicts.add_to(cmd);
    cmd->callback([this] { code = run(); });
  }

  int run() {
    const auto model = LinearModel::load(match_model);
    const auto parser = TaggerModel::load(parser_model);
    const auto dictionaries = dicts.load();
    MatchOptions options;
    options.threshold = threshold;
    options.exact_verify = exact_verify;
    options.pipeline.workers = workers;
    options.pipeline.scratch = scratch;
    const fs::path seq = out + ".seq";
    const auto stats = job_match(docs, index, MatchResources{model, parser, dictionaries}, options, seq);

    auto jsonl = open_out(out);
    for (const auto& r : read_match_results(seq)) jsonl << to_canonical_json(r) << '\n';
    finish(jsonl, out);
    print_match_summary(std::cout, stats);
    return kOk;
  }

  int code = kOk;
};

struct TrainParserCmd {
  std::string data, out;
  TaggerTrainingOptions options;
  bool no_shuffle = false;
  DictFlags dicts;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("train-parser", "Train the reference tagger on labeled citations");
    cmd->add_option("--data", data, "Labeled citations (JSON lines)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "Model file")->required()->check(kWritablePath);
    cmd->add_option("--epochs", options.epochs, "Training epochs")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--seed", options.seed, "Shuffle seed")->capture_default_str();
    cmd->add_flag("--no-shuffle", no_shuffle, "Keep corpus order in every epoch");
    dicts.add_to(cmd);
    cmd->callback([this] { code = run(); });
  }

  int run() {
    options.shuffle = !no_shuffle;
    const auto dictionaries = dicts.load();
    std::vector<LabeledSequence> corpus;
    for (const auto& c : load_labeled(data)) corpus.push_back(c.sequence());
    const auto model = train_tagger(corpus, options, dictionaries);
    model.save(out);
    std::cout << "sequences          " << corpus.size() << "\n"
              << "training accuracy  " << percent(token_accuracy(model, dictionaries, corpus)) << "\n";
    return kOk;
  }

  int code = kOk;
};

struct TrainMatcherCmd {
  std::string data, out;
  MatcherTrainingOptions options;
  bool no_calibrate = false;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("train-matcher", "Train the match classifier on a feature table");
    cmd->add_option("--data", data, "Feature table (TSV with a label column)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "Model file")->required()->check(kWritablePath);
    cmd->add_option("--epochs", options.epochs, "Training epochs")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--lambda", options.lambda, "Regularisation strength")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--seed", options.seed, "Shuffle seed")->capture_default_str();
    cmd->add_flag("--no-calibrate", no_calibrate, "Keep the identity score calibration");
    cmd->callback([this] { code = run(); });
  }

  int run() {
    options.calibrate = !no_calibrate;
    auto in = open_in(data);
    const auto examples = read_feature_table(in);
    MatcherTrainingReport report;
    const auto model = train_matcher(examples, options, &report);
    model.save(out);
    std::size_t right = 0;
    for (const auto& ex : examples) right += is_match(model.score(ex.features), model.midpoint()) == ex.match;
    std::cout << "examples           " << examples.size() << "\n"
              << "mode               " << to_string(model.mode()) << "\n"
              << "training accuracy  " << percent(static_cast<double>(right) / static_cast<double>(examples.size()))
              << "\n"
              << "final objective    " << report.checkpoint_objective.back() << "\n";
    return kOk;
  }

  int code = kOk;
};

struct ScoreCmd {
  std::string citations, parser_model, match_model, out;
  std::size_t workers = default_workers();
  DictFlags dicts;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("score", "Score every pair of citation strings");
    cmd->add_option("--citations", citations, "Lines of id<TAB>citation")->required()->check(CLI::ExistingFile);
    cmd->add_option("--parser-model", parser_model, "Tagger model")->required()->check(CLI::ExistingFile);
    cmd->add_option("--match-model", match_model, "Match model")->required()->check(CLI::ExistingFile);
    cmd->add_option("--workers", workers, "Parallel workers")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--out", out, "Scores: idA<TAB>idB<TAB>score")->required()->check(kWritablePath);
    dicts.add_to(cmd);
    cmd->callback([this] { code = run(); });
  }

  int run() {
    const auto model = LinearModel::load(match_model);
    const auto parser = TaggerModel::load(parser_model);
    const auto dictionaries = dicts.load();
    const auto lines = load_citation_lines(citations);
    std::vector<ParsedCitation> parsed;
    for (const auto& [id, text] : lines) parsed.push_back(parse_reference(text, parser, dictionaries));
    const auto scores = pairwise_scores(parsed, model, workers);
    auto file = open_out(out);
    std::size_t k = 0;
    char buf[32];
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (std::size_t j = i + 1; j < lines.size(); ++j, ++k) {
        std::snprintf(buf, sizeof buf, "%.6f", scores[k]);
        file << lines[i].first << '\t' << lines[j].first << '\t' << buf << '\n';
      }
    }
    finish(file, out);
    std::cout << "scored " << scores.size() << " pairs of " << lines.size() << " citations\n";
    return kOk;
  }

  int code = kOk;
};

struct ClusterCmd {
  std::string scores, out;
  double threshold = 0.5;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("cluster", "Single-link clusters from pairwise scores");
    cmd->add_option("--scores", scores, "Lines of idA<TAB>idB<TAB>score")->required()->check(CLI::ExistingFile);
    cmd->add_option("--threshold", threshold, "Link pairs scoring at least this")->capture_default_str();
    cmd->add_option("--out", out, "Clusters: item<TAB>cluster")->required()->check(kWritablePath);
    cmd->callback([this] { code = run(); });
  }

  int run() {
    auto in = open_in(scores);
    std::vector<std::tuple<std::string, std::string, double>> rows;
    std::map<std::string, std::size_t> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::string a, b, s;
      if (!std::getline(fields, a, '\t') || !std::getline(fields, b, '\t') || !std::getline(fields, s)) {
        throw DataError(scores + " line " + std::to_string(lineno) + ": expected idA<TAB>idB<TAB>score");
      }
      double v;
      try {
        std::size_t used = 0;
        v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
      } catch (const std::exception&) {
        throw DataError(scores + " line " + std::to_string(lineno) + ": bad score '" + s + "'");
      }
      ids.emplace(a, 0);
      ids.emplace(b, 0);
      rows.emplace_back(std::move(a), std::move(b), v);
    }
    NamedClustering named;
    for (auto& [id, index] : ids) {
      index = named.items.size();
      named.items.push_back(id);
    }
    std::vector<Edge> edges;
    for (const auto& [a, b, v] : rows) {
      if (v < threshold || a == b) continue;
      edges.emplace_back(std::min(ids[a], ids[b]), std::max(ids[a], ids[b]));
    }
    named.clustering = single_link(named.items.size(), edges);
    auto file = open_out(out);
    write_clustering(file, named);
    finish(file, out);
    std::cout << "items     " << named.items.size() << "\n"
              << "clusters  " << named.clustering.clusters().size() << "\n";
    return kOk;
  }

  int code = kOk;
};

struct EvaluateCmd {
  std::string gold, pred;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("evaluate", "Compare predicted clusters with gold clusters");
    cmd->add_option("--gold", gold, "Gold clusters: item<TAB>cluster")->required()->check(CLI::ExistingFile);
    cmd->add_option("--pred", pred, "Predicted clusters: item<TAB>cluster")->required()->check(CLI::ExistingFile);
    cmd->callback([this] { code = run(); });
  }

  int run() {
    auto gin = open_in(gold);
    auto pin = open_in(pred);
    const auto g = read_clustering(gin);
    const auto p = read_clustering(pin);
    const auto aligned = align_to(g, p);
    const auto report = evaluate_clusters(g.clustering, aligned);
    char buf[96];
    auto row = [&](const char* name, double v) {
      std::snprintf(buf, sizeof buf, "%-20s %9s\n", name, percent(v).c_str());
      std::cout << buf;
    };
    std::cout << "items " << g.items.size() << ", gold clusters " << g.clustering.clusters().size()
              << ", predicted clusters " << aligned.clusters().size() << "\n";
    row("cluster recall", report.cluster_recall);
    row("pairwise precision", report.pairwise.precision);
    row("pairwise recall", report.pairwise.recall);
    row("pairwise F1", report.pairwise.f1);
    std::cout << "(no predicted links counts as precision 100%, no gold links as recall 100%)\n";
    return kOk;
  }

  int code = kOk;
};

struct GenerateCmd {
  std::size_t documents = 300, refs_min = 3, refs_max = 6;
  std::uint64_t seed = 1;
  std::string style = "varied";
  bool no_perturb = false;
  std::string out_docs, out_labeled, out_gold, out_citations;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("generate", "Write a synthetic citing corpus and its gold data");
    cmd->add_option("--documents", documents, "Documents")->check(CLI::Range(2, 10000000))->capture_default_str();
    cmd->add_option("--refs-min", refs_min, "Minimum renderings per document")->capture_default_str();
    cmd->add_option("--refs-max", refs_max, "Maximum renderings per document")->capture_default_str();
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd->add_option("--style", style, "varied or two-template")
        ->check(CLI::IsMember({"varied", "two-template"}))->capture_default_str();
    cmd->add_flag("--no-perturb", no_perturb, "No abbreviations, typos or truncation");
    cmd->add_option("--out-docs", out_docs, "Corpus JSON lines")->check(kWritablePath);
    cmd->add_option("--out-labeled", out_labeled, "Labeled citations JSON lines (cluster = cited id)")
        ->check(kWritablePath);
    cmd->add_option("--out-gold", out_gold, "Gold clusters of the citations")->check(kWritablePath);
    cmd->add_option("--out-citations", out_citations, "Lines of id<TAB>citation")->check(kWritablePath);
    cmd->callback([this] { code = run(); });
  }

  int run() {
    if (refs_min > refs_max) throw UsageError("--refs-min exceeds --refs-max");
    synth::RenderOptions render;
    render.style = style == "two-template" ? synth::Style::TwoTemplate : synth::Style::Varied;
    render.perturb = !no_perturb;
    const auto corpus = synth::make_citation_corpus(documents, refs_min, refs_max, seed, render);
    auto cite_id = [](std::size_t k) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "c%06zu", k);
      return std::string(buf);
    };
    if (!out_docs.empty()) {
      auto f = open_out(out_docs);
      write_corpus_jsonl(f, corpus.documents);
      finish(f, out_docs);
    }
    if (!out_labeled.empty()) {
      auto f = open_out(out_labeled);
      write_labeled_citations(f, corpus.citations);
      finish(f, out_labeled);
    }
    if (!out_gold.empty()) {
      auto f = open_out(out_gold);
      for (std::size_t k = 0; k < corpus.citations.size(); ++k) {
        f << cite_id(k) << '\t' << corpus.citations[k].cluster << '\n';
      }
      finish(f, out_gold);
    }
    if (!out_citations.empty()) {
      auto f = open_out(out_citations);
      for (std::size_t k = 0; k < corpus.citations.size(); ++k) {
        f << cite_id(k) << '\t' << corpus.citations[k].text << '\n';
      }
      finish(f, out_citations);
    }
    std::cout << "documents  " << corpus.documents.size() << "\n"
              << "citations  " << corpus.citations.size() << "\n";
    return kOk;
  }

  int code = kOk;
};

struct FeaturizeCmd {
  std::string labeled, parser_model, mode = "Pipeline", docs, out;
  std::uint64_t seed = 1;
  DictFlags dicts;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "featurize", "Turn labeled citations into a matcher feature table");
    cmd->add_option("--labeled", labeled, "Labeled citations with cluster ids")->required()->check(CLI::ExistingFile);
    cmd->add_option("--parser-model", parser_model, "Tagger model")->required()->check(CLI::ExistingFile);
    cmd->add_option("--mode", mode, "Full, Simple or Pipeline")
        ->check(CLI::IsMember({"Full", "Simple", "Pipeline"}))->capture_default_str();
    cmd->add_option("--docs", docs,
                    "Corpus JSON lines: pair citations with documents (cluster = document id) "
                    "instead of with each other")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Negative sampling seed")->capture_default_str();
    cmd->add_option("--out", out, "Feature table")->required()->check(kWritablePath);
    dicts.add_to(cmd);
    cmd->callback([this] { code = run(); });
  }

  int run() {
    const auto parser = TaggerModel::load(parser_model);
    const auto dictionaries = dicts.load();
    const auto items = load_labeled(labeled);
    std::vector<ParsedCitation> parsed;
    std::vector<std::string> clusters;
    for (const auto& c : items) {
      parsed.push_back(parse_reference(c.text, parser, dictionaries));
      clusters.push_back(c.cluster);
    }
    const auto feature_mode = *parse_feature_mode(mode);
    std::vector<LabeledFeatures> examples;
    if (docs.empty()) {
      examples = citation_pair_examples(parsed, clusters, feature_mode, seed);
    } else {
      const auto corpus = load_corpus_jsonl(docs);
      const auto index = RotationIndex::build(corpus);
      examples = document_pair_examples(parsed, clusters, corpus, index, feature_mode, seed);
    }
    auto f = open_out(out);
    write_feature_table(f, examples);
    finish(f, out);
    const auto positives = std::count_if(examples.begin(), examples.end(), [](const auto& e) { return e.match; });
    std::cout << "examples   " << examples.size() << " (" << positives << " matches)\n";
    return kOk;
  }

  int code = kOk;
};

struct CrossvalCmd {
  std::string labeled;
  CrossValOptions options;
  DictFlags dicts;

  void attach(CLI::App& app) {
    options.workers = default_workers();
    auto* cmd = app.add_subcommand("crossval", "Three-slice cross-validation over labeled citation clusters");
    cmd->add_option("--labeled", labeled, "Labeled citations with cluster ids")->required()->check(CLI::ExistingFile);
    cmd->add_option("--slices", options.slices, "Slices (at least 3)")->check(CLI::Range(3, 1000))->capture_default_str();
    cmd->add_option("--seed", options.seed, "Slice assignment seed")->capture_default_str();
    cmd->add_option("--threshold", options.threshold, "Link threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    cmd->add_option("--workers", options.workers, "Parallel workers")->check(CLI::PositiveNumber)->capture_default_str();
    dicts.add_to(cmd);
    cmd->callback([this] { code = run(); });
  }

  int run() {
    const auto dictionaries = dicts.load();
    const auto data = load_labeled(labeled);
    const auto folds = cross_validate(data, dictionaries, options);
    for (const auto& f : folds) {
      std::cout << "fold" << f.fold << ": " << f.test_citations << " test citations in "
                << f.test_clusters << " clusters, parser token accuracy "
                << percent(f.parser_accuracy) << "\n";
    }
    std::cout << "\n";
    print_cross_validation(std::cout, folds);
    return kOk;
  }

  int code = kOk;
};

int exit_code(const Error& e) {
  switch (e.category()) {
    case Error::Category::Usage: return kUsage;
    case Error::Category::Data: return kData;
    case Error::Category::Io: return kIo;
  }
  return kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Citation matching: parse references, index authors, match and evaluate"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");

  IngestCmd ingest;
  BuildIndexCmd build_index;
  MatchCmd match;
  TrainParserCmd train_parser;
  TrainMatcherCmd train_matcher_cmd;
  ScoreCmd score_cmd;
  ClusterCmd cluster;
  EvaluateCmd evaluate;
  GenerateCmd generate;
  FeaturizeCmd featurize;
  CrossvalCmd crossval;
  ingest.attach(app);
  build_index.attach(app);
  match.attach(app);
  train_parser.attach(app);
  train_matcher_cmd.attach(app);
  score_cmd.attach(app);
  cluster.attach(app);
  evaluate.attach(app);
  generate.attach(app);
  featurize.attach(app);
  crossval.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  for (int rc : {ingest.code, build_index.code, match.code, train_parser.code, train_matcher_cmd.code,
                 score_cmd.code, cluster.code, evaluate.code, generate.code, featurize.code,
                 crossval.code}) {
    if (rc != kOk) return rc;
  }
  return kOk;
}
