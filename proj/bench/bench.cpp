// Serial reference vs OpenMP kernels at several worker counts.
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "citematch/experiment.hpp"
#include "citematch/mapreduce.hpp"
#include "citematch/pipeline.hpp"
#include "citematch/synthetic.hpp"

using namespace citematch;
namespace fs = std::filesystem;

namespace {

template <typename Fn>
double seconds(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const std::string& what, const std::string& variant, double secs, double base) {
  std::cout << std::left << std::setw(18) << what << std::setw(14) << variant << std::right << std::fixed
            << std::setprecision(3) << std::setw(9) << secs << " s" << std::setw(8) << std::setprecision(2)
            << base / secs << "x\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("citematch benchmarks");
  std::size_t items = 400, documents = 2000, lines = 200000;
  std::vector<std::size_t> workers;
  std::string scratch = (fs::temp_directory_path() / "citematch-bench").string();
  app.add_option("--items", items, "Citations scored pairwise")->capture_default_str();
  app.add_option("--documents", documents, "Documents for the match job (two citations each)")->capture_default_str();
  app.add_option("--lines", lines, "Input records of the word-count job")->capture_default_str();
  app.add_option("--workers", workers, "Worker counts to try (default 1, 2, 4 and hardware threads)");
  app.add_option("--scratch", scratch, "Scratch directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  if (workers.empty()) {
    workers = {1, 2, 4};
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw > 4) workers.push_back(hw);
  }
  fs::create_directories(scratch);
  std::cout << "hardware threads: " << std::thread::hardware_concurrency() << "\n\n";

  {
    synth::Rng rng(1);
    const auto docs = synth::make_documents(items, rng);
    std::vector<ParsedCitation> parsed;
    for (const auto& d : docs) parsed.push_back(as_citation(d));
    const LinearModel model(FeatureMode::Full, std::vector<double>(10, 1.0), -5.0);
    std::vector<double> ref;
    const double base = seconds([&] { ref = pairwise_scores_serial(parsed, model); });
    row("pairwise scores", "serial", base, base);
    for (auto w : workers) {
      std::vector<double> got;
      const double s = seconds([&] { got = pairwise_scores(parsed, model, w); });
      row("pairwise scores", std::to_string(w) + " workers", s, base);
      if (got != ref) std::cout << "  output differs from the serial loop\n";
    }
    std::cout << "\n";
  }

  {
    std::mt19937_64 rng(2);
    std::vector<KVRecord> input;
    for (std::size_t i = 0; i < lines; ++i) {
      std::string line;
      for (int k = 0; k < 8; ++k) line += std::string(1, static_cast<char>('a' + rng() % 26)) + std::to_string(rng() % 500) + " ";
      input.push_back({std::to_string(i), line});
    }
    const MapFn map = [](const KVRecord& r, Emitter& out) {
      std::istringstream in(r.value);
      std::string w;
      while (in >> w) out.emit(w, "1");
    };
    const ReduceFn reduce = [](std::string_view k, std::span<const std::string> v, Emitter& out) {
      out.emit(std::string(k), std::to_string(v.size()));
    };
    seq_write(fs::path(scratch) / "wc.seq", input);
    std::vector<KVRecord> ref;
    const double base = seconds([&] { ref = run_job_serial(input, map, reduce, 4); });
    row("word count", "serial", base, base);
    for (auto w : workers) {
      JobSpec spec;
      spec.inputs = {fs::path(scratch) / "wc.seq"};
      spec.output = fs::path(scratch) / "wc-out.seq";
      spec.scratch = fs::path(scratch) / "wc-work";
      spec.workers = w;
      const double s = seconds([&] { run_job(spec, map, reduce); });
      row("word count", std::to_string(w) + " workers", s, base);
      if (seq_read(spec.output) != ref) std::cout << "  output differs from the serial runner\n";
    }
    std::cout << "\n";
  }

  {
    const auto corpus = synth::make_citation_corpus(documents, 2, 2, 3);
    const auto train = synth::make_citation_corpus(150, 2, 3, 4);
    const auto dicts = Dictionaries::bundled();
    std::vector<LabeledSequence> seqs;
    for (const auto& c : train.citations) seqs.push_back(c.sequence());
    const auto tagger = train_tagger(seqs, {}, dicts);
    const LinearModel model(FeatureMode::Pipeline, std::vector<double>(6, 1.0), -3.0);
    const MatchResources res{model, tagger, dicts};
    const auto docs_seq = fs::path(scratch) / "docs.seq";
    write_corpus_seq(docs_seq, corpus.documents);
    MatchOptions mo;
    mo.pipeline.scratch = scratch;
    job_build_index(docs_seq, fs::path(scratch) / "index", mo.pipeline);
    const auto index = RotationIndex::build(corpus.documents);
    const double base = seconds([&] { match_reference(corpus.documents, index, res, mo); });
    row("match job", "serial", base, base);
    for (auto w : workers) {
      mo.pipeline.workers = w;
      const double s = seconds([&] { job_match(docs_seq, fs::path(scratch) / "index", res, mo, fs::path(scratch) / "m.seq"); });
      row("match job", std::to_string(w) + " workers", s, base);
    }
  }
  fs::remove_all(scratch);
  return 0;
}
