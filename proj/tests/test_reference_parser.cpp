#include <doctest.h>

#include <random>
#include <sstream>

#include "citematch/error.hpp"
#include "citematch/log.hpp"
#include "citematch/reference_parser.hpp"
#include "citematch/synthetic.hpp"

using namespace citematch;
using L = TokenLabel;

namespace {

const Dictionaries& dicts() {
  static const Dictionaries d = Dictionaries::bundled();
  return d;
}

LabeledSequence labeled(std::string_view text, std::vector<TokenLabel> labels) {
  LabeledSequence s{tokenize(text), std::move(labels)};
  REQUIRE(s.tokens.size() == s.labels.size());
  return s;
}

std::vector<LabeledSequence> two_template_corpus(std::size_t n, std::uint64_t seed) {
  synth::Rng rng(seed);
  const auto docs = synth::make_documents(n, rng);
  synth::RenderOptions opts;
  opts.style = synth::Style::TwoTemplate;
  std::vector<LabeledSequence> out;
  for (const auto& d : docs) out.push_back(synth::render(d, rng, opts).sequence());
  return out;
}

double accuracy(const TaggerModel& m, const std::vector<LabeledSequence>& data) {
  std::size_t right = 0, total = 0;
  for (const auto& s : data) {
    const auto got = m.tag(s.tokens, dicts());
    for (std::size_t i = 0; i < got.size(); ++i) right += got[i] == s.labels[i];
    total += got.size();
  }
  return static_cast<double>(right) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("feature inventory") {
  CHECK(features::base_names().size() == 42);
  CHECK(features::kCount == 216);
  for (std::size_t id = 0; id < features::kCount; ++id) {
    CHECK(features::id(features::name(id)) == id);
  }
  CHECK(features::name(features::kBias) == "bias");
  CHECK(features::id("+2:oob").has_value());
  CHECK_FALSE(features::id("0:nonsense").has_value());
}

TEST_CASE("a lone year token") {
  const auto toks = tokenize("1996");
  const auto f = extract_features(toks, 0, dicts());
  CHECK(f.value("0:all_digits") == 1);
  CHECK(f.value("0:is_dot") == 0);
  CHECK(f.value("0:is_first") == 1);
  CHECK(f.value("0:is_last") == 1);
  CHECK(f.value("-1:oob") == 1);
  CHECK(f.value("+2:oob") == 1);
  CHECK(f.value("bias") == 1);
}

TEST_CASE("an acronym is upper case and capitalized") {
  const auto toks = tokenize("IEEE");
  const auto f = extract_features(toks, 0, dicts());
  CHECK(f.value("0:all_upper") == 1);
  CHECK(f.value("0:capitalized") == 1);
  CHECK(f.value("0:all_lower") == 0);
}

TEST_CASE("a dot fires no character-class feature") {
  const auto toks = tokenize("Smith . 1999");
  const auto f = extract_features(toks, 1, dicts());
  CHECK(f.value("0:is_dot") == 1);
  for (auto name : {"all_digits", "all_lower", "all_upper", "capitalized", "roman", "mixed_alnum"}) {
    CHECK(f.value(std::string("0:") + name) == 0);
  }
  CHECK(f.value("-1:capitalized") == 1);
  CHECK(f.value("+1:four_digit") == 1);
}

TEST_CASE("words and dictionaries are case-insensitive") {
  Dictionaries d;
  d.set("city", {"Warsaw"});
  const auto toks = tokenize("WARSAW Vol");
  CHECK(extract_features(toks, 0, d).value("0:dict_city") == 1);
  CHECK(extract_features(toks, 1, d).value("0:word_vol") == 1);
  CHECK(d.contains("city", "warsaw"));
  CHECK_FALSE(d.contains("month", "warsaw"));
}

TEST_CASE("out of range position is rejected") {
  const auto toks = tokenize("a b");
  CHECK_THROWS_AS(extract_features(toks, 2, dicts()), UsageError);
}

TEST_CASE("window features are position-consistent") {
  synth::Rng rng(3);
  const auto docs = synth::make_documents(30, rng);
  for (const auto& d : docs) {
    const auto toks = synth::render(d, rng).sequence().tokens;
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
      const auto here = extract_features(toks, i, dicts()).active_names();
      const auto next = extract_features(toks, i + 1, dicts()).active_names();
      std::vector<std::string> plus_one, focus;
      for (const auto& n : here)
        if (n.rfind("+1:", 0) == 0) plus_one.push_back(n.substr(3));
      for (const auto& n : next)
        if (n.rfind("0:", 0) == 0) focus.push_back(n.substr(2));
      CHECK(plus_one == focus);
    }
  }
}

TEST_CASE("a constant corpus teaches a constant tagger") {
  std::vector<LabeledSequence> corpus;
  for (auto text : {"Smith, J. 1999", "A title here.", "Proc. of X"}) {
    auto toks = tokenize(text);
    corpus.push_back({toks, std::vector<TokenLabel>(toks.size(), L::Other)});
  }
  const auto model = train_tagger(corpus, {}, dicts());
  for (const auto& l : model.tag(tokenize("Doe, A. Something (2001) 12-14"), dicts())) CHECK(l == L::Other);
}

TEST_CASE("two-template corpus is learned exactly") {
  const auto corpus = two_template_corpus(120, 9);
  TaggerTrainingOptions opts;
  opts.epochs = 20;
  const auto model = train_tagger(corpus, opts, dicts());
  CHECK(accuracy(model, corpus) == doctest::Approx(1.0));
}

TEST_CASE("a single sequence is reproduced") {
  const auto s = labeled("Smith, J.: Fast parsing. Jrnl of Things, 1999.",
                         {L::Author, L::Author, L::Author, L::Author, L::Other, L::Title, L::Title,
                          L::Other, L::Source, L::Source, L::Source, L::Other, L::Year, L::Other});
  const auto model = train_tagger(std::vector<LabeledSequence>{s}, {}, dicts());
  CHECK(model.tag(s.tokens, dicts()) == s.labels);
}

TEST_CASE("untrained tagger falls back to the first canonical label") {
  const TaggerModel zero;
  for (const auto& l : zero.tag(tokenize("Smith 1999 ."), dicts())) CHECK(l == L::Author);
  CHECK(zero.tag({}, dicts()).empty());
}

TEST_CASE("viterbi finds the best-scoring labeling") {
  const auto corpus = two_template_corpus(40, 2);
  TaggerTrainingOptions opts;
  opts.epochs = 3;
  const auto model = train_tagger(corpus, opts, dicts());
  synth::Rng rng(4);
  std::uniform_int_distribution<int> word(0, 4);
  const std::vector<std::string> vocab = {"Smith", ",", "1999", "Jrnl", "."};
  for (int round = 0; round < 30; ++round) {
    std::string text;
    const int len = 1 + round % 4;
    for (int i = 0; i < len; ++i) text += vocab[word(rng)] + " ";
    const auto toks = tokenize(text);
    const auto best = model.tag(toks, dicts());
    const double best_score = model.score(toks, best, dicts());
    // Exhaustive search over all 6^n labelings.
    std::vector<TokenLabel> labels(toks.size(), L::Author);
    std::size_t combos = 1;
    for (std::size_t i = 0; i < toks.size(); ++i) combos *= kLabelCount;
    double top = -1e300;
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t x = c;
      for (auto& l : labels) {
        l = kAllLabels[x % kLabelCount];
        x /= kLabelCount;
      }
      top = std::max(top, model.score(toks, labels, dicts()));
    }
    CHECK(best_score == doctest::Approx(top).epsilon(1e-12));
  }
}

TEST_CASE("trained tagger scores its output at least as high as gold") {
  const auto corpus = two_template_corpus(60, 5);
  const auto model = train_tagger(corpus, {}, dicts());
  for (const auto& s : corpus) {
    const auto got = model.tag(s.tokens, dicts());
    CHECK(model.score(s.tokens, got, dicts()) >= model.score(s.tokens, s.labels, dicts()) - 1e-9);
  }
}

TEST_CASE("training is deterministic and the model file round-trips") {
  const auto corpus = two_template_corpus(50, 6);
  const auto a = train_tagger(corpus, {}, dicts());
  const auto b = train_tagger(corpus, {}, dicts());
  CHECK(a == b);
  std::stringstream buf;
  a.save(buf);
  CHECK(TaggerModel::load(buf) == a);
  std::stringstream bad("something else\n");
  CHECK_THROWS_AS(TaggerModel::load(bad), DataError);
}

TEST_CASE("training needs data") {
  CHECK_THROWS_AS(train_tagger(std::vector<LabeledSequence>{}, {}, dicts()), UsageError);
}

TEST_CASE("assemble builds the fields") {
  {
    const auto toks = tokenize("Smith , 1999");
    const auto c = assemble("Smith , 1999", toks, std::vector{L::Author, L::Other, L::Year});
    CHECK(c.authorTokens == std::vector<std::string>{"Smith"});
    CHECK(c.yearNumbers == std::set<std::int64_t>{1999});
    CHECK(c.authorText == "Smith");
  }
  {
    const auto toks = tokenize("Doe, J. Title");
    const auto c = assemble("Doe, J. Title", toks, std::vector{L::Author, L::Author, L::Author, L::Author, L::Title});
    CHECK(c.yearNumbers.empty());
    CHECK(c.authorTokens == std::vector<std::string>{"Doe", "J"});
    CHECK(c.titleText == "Title");
  }
  {
    const auto toks = tokenize("pp. 120-135");
    const auto c = assemble("pp. 120-135", toks, std::vector{L::Other, L::Other, L::Pages, L::Pages, L::Pages});
    CHECK(c.pageNumbers == std::set<std::int64_t>{120, 135});
  }
}

TEST_CASE("overflowing numbers are dropped with a warning") {
  std::vector<std::string> warnings;
  set_warning_sink([&](std::string_view m) { warnings.emplace_back(m); });
  const std::string raw = "99999999999999999999999 2001";
  const auto c = assemble(raw, tokenize(raw), std::vector{L::Year, L::Year});
  set_warning_sink(nullptr);
  CHECK(c.yearNumbers == std::set<std::int64_t>{2001});
  CHECK(warnings.size() == 1);
}

TEST_CASE("parse_reference ties tagger and assembly together") {
  const auto corpus = two_template_corpus(150, 8);
  const auto model = train_tagger(corpus, {}, dicts());
  const std::string raw = "J. Kowalski, A. Nowak: Sparse linear models. Journal of Applied Statistics, 1998.";
  const auto c = parse_reference(raw, model, dicts());
  CHECK(c.raw == raw);
  CHECK(c.authorTokens == std::vector<std::string>{"J", "Kowalski", "A", "Nowak"});
  CHECK(c.yearNumbers == std::set<std::int64_t>{1998});
  CHECK(c.titleText == "Sparse linear models");
  CHECK(c.sourceText == "Journal of Applied Statistics");
}
