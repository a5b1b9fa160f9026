#include <doctest.h>

#include <random>
#include <sstream>

#include "citematch/error.hpp"
#include "citematch/experiment.hpp"
#include "citematch/labeled.hpp"
#include "citematch/synthetic.hpp"
#include "oracles.hpp"

using namespace citematch;
using doctest::Approx;

TEST_CASE("abbreviation helpers") {
  CHECK(synth::truncate_word("Applied", 4) == "Appl.");
  CHECK(synth::truncate_word("of", 4) == "of");
  CHECK(synth::drop_vowels("Journal") == "Jrnl");
  CHECK(synth::drop_vowels("Algorithms") == "Algrthms");
}

TEST_CASE("documents are deterministic and well formed") {
  synth::Rng a(5), b(5);
  const auto x = synth::make_documents(50, a);
  const auto y = synth::make_documents(50, b);
  CHECK(x == y);
  std::set<std::string> ids;
  for (const auto& d : x) {
    CHECK(ids.insert(d.id).second);
    CHECK(d.authors.size() >= 1);
    CHECK(d.authors.size() <= 4);
    CHECK_FALSE(d.title.empty());
    REQUIRE(d.year.has_value());
    CHECK(*d.year >= 1960);
    CHECK(*d.year <= 2012);
    CHECK(d.pages.size() == 2);
  }
  CHECK(x[0].id == "doc00000");
}

TEST_CASE("renderings carry one label per token") {
  synth::Rng rng(6);
  const auto docs = synth::make_documents(200, rng);
  for (auto style : {synth::Style::Varied, synth::Style::TwoTemplate}) {
    synth::RenderOptions opt;
    opt.style = style;
    for (const auto& d : docs) {
      const auto c = synth::render(d, rng, opt);
      CHECK(c.cluster == d.id);
      const auto seq = c.sequence();
      CHECK(seq.tokens.size() == c.labels.size());
      CHECK(std::count(c.labels.begin(), c.labels.end(), TokenLabel::Author) > 0);
      CHECK(std::count(c.labels.begin(), c.labels.end(), TokenLabel::Title) > 0);
      // The year is always rendered and labelled as such.
      bool year = false;
      for (std::size_t i = 0; i < seq.tokens.size(); ++i)
        year |= seq.labels[i] == TokenLabel::Year && seq.tokens[i].text == std::to_string(*d.year);
      CHECK(year);
    }
  }
}

TEST_CASE("citation corpus placement") {
  const auto corpus = synth::make_citation_corpus(40, 2, 3, 9);
  CHECK(corpus.citations.size() == corpus.placement.size());
  CHECK(corpus.citations.size() >= 80);
  CHECK(corpus.citations.size() <= 120);
  std::size_t refs = 0;
  for (const auto& d : corpus.documents) refs += d.references.size();
  CHECK(refs == corpus.citations.size());
  for (std::size_t k = 0; k < corpus.citations.size(); ++k) {
    const auto [citing, ref] = corpus.placement[k];
    const auto& d = corpus.documents[citing];
    CHECK(d.id != corpus.citations[k].cluster);
    REQUIRE(ref < d.references.size());
    CHECK(std::get<std::string>(d.references[ref]) == corpus.citations[k].text);
  }
  const auto again = synth::make_citation_corpus(40, 2, 3, 9);
  CHECK(again.documents == corpus.documents);
}

TEST_CASE("labelled citation files") {
  const auto corpus = synth::make_citation_corpus(10, 1, 2, 1);
  std::stringstream ss;
  write_labeled_citations(ss, corpus.citations);
  const auto back = read_labeled_citations(ss);
  REQUIRE(back.size() == corpus.citations.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].text == corpus.citations[i].text);
    CHECK(back[i].labels == corpus.citations[i].labels);
    CHECK(back[i].cluster == corpus.citations[i].cluster);
  }
  std::istringstream bad(R"({"text":"a b","labels":["Author"]})" "\n");
  CHECK_THROWS_AS(read_labeled_citations(bad), DataError);
  std::istringstream unknown(R"({"text":"a","labels":["Editor"]})" "\n");
  CHECK_THROWS_AS(read_labeled_citations(unknown), DataError);
}

TEST_CASE("parallel pairwise scores equal the serial loop") {
  synth::Rng rng(10);
  const auto docs = synth::make_documents(60, rng);
  std::vector<ParsedCitation> items;
  for (const auto& d : docs) items.push_back(as_citation(d));
  const LinearModel m(FeatureMode::Full, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, -5.0);
  const auto serial = pairwise_scores_serial(items, m);
  CHECK(serial.size() == items.size() * (items.size() - 1) / 2);
  for (std::size_t w : {1, 2, 7}) CHECK(pairwise_scores(items, m, w) == serial);
  // Upper triangle, row by row.
  CHECK(serial[0] == Approx(score(m, feature_vector(items[0], items[1], FeatureMode::Full))));
  CHECK(serial[items.size() - 1] == Approx(score(m, feature_vector(items[1], items[2], FeatureMode::Full))));

  const std::vector<double> upper = {0.9, 0.2, 0.5};  // (0,1) (0,2) (1,2)
  CHECK(threshold_edges(3, upper, 0.5) == std::vector<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("end-to-end synthetic matching is accurate") {
  oracle::TempDir dir("synth");
  SyntheticMatchOptions opt;
  opt.documents = 120;
  opt.scratch = dir / "work";
  const auto r = synthetic_matching(opt);
  CHECK(r.test_citations > 100);
  CHECK(r.correct <= r.matched);
  CHECK(r.parser_accuracy > 0.9);
  CHECK(r.report.pairwise.f1 > 0.9);
}

TEST_CASE("cross-validation folds") {
  const auto corpus = synth::make_citation_corpus(60, 2, 4, 3);
  CrossValOptions opt;
  opt.workers = 2;
  const auto folds = cross_validate(corpus.citations, Dictionaries::bundled(), opt);
  REQUIRE(folds.size() == 3);
  std::size_t total = 0;
  for (const auto& f : folds) {
    total += f.test_citations;
    CHECK(f.parser_accuracy > 0.8);
    CHECK(f.complex.pairwise.f1 > 0.7);
    CHECK(f.simple.pairwise.f1 > 0.7);
  }
  CHECK(total == corpus.citations.size());
  std::ostringstream out;
  print_cross_validation(out, folds);
  CHECK(out.str().find("Matching results with complex author similarity") != std::string::npos);
  CHECK(out.str().find("Matching results with simple author similarity") != std::string::npos);
}
