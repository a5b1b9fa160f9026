#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "citematch/error.hpp"
#include "citematch/field_similarity.hpp"
#include "citematch/tokenizer.hpp"
#include "oracles.hpp"

using namespace citematch;
using doctest::Approx;
using Words = std::vector<std::string>;

namespace {

// Complex author similarity recomputed with the exhaustive assignment.
double complex_by_brute_force(const Words& a, const Words& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const auto pos = boundary_positions(a, b);
  std::vector<std::vector<double>> w(a.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      w[i][j] = token_pair_similarity(a[i], b[j]) * (1.0 - std::abs(pos.a[i] - pos.b[j]));
  return oracle::brute_assignment(w) / static_cast<double>(std::max(a.size(), b.size()));
}

Words random_authors(std::mt19937_64& rng, std::size_t max_len) {
  static const Words pool = {"j", "john", "smith", "jane", "doe", "a", "anna", "nowak", "jon", "smyth", "d"};
  Words out(std::uniform_int_distribution<std::size_t>(0, max_len)(rng));
  for (auto& w : out) w = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  return out;
}

}  // namespace

TEST_CASE("trigram multisets") {
  CHECK(trigram_multiset("abcd") == TrigramMultiset{{"abc", 1}, {"bcd", 1}});
  CHECK(trigram_multiset("aaaa") == TrigramMultiset{{"aaa", 2}});
  CHECK(trigram_multiset("ab").empty());
  // Code points, not bytes.
  CHECK(trigram_multiset("żółw") == TrigramMultiset{{"żół", 1}, {"ółw", 1}});
}

TEST_CASE("trigram similarity") {
  CHECK(sim_trigram("abcdef", "abcdef") == 1.0);
  CHECK(sim_trigram("abcd", "abce") == Approx(0.5));
  CHECK(sim_trigram("abc", "xyz") == 0.0);
  CHECK(sim_trigram("ab", "ab") == 1.0);
  CHECK(sim_trigram("ab", "ac") == 0.0);
  CHECK(sim_trigram("", "abc") == 0.0);
}

TEST_CASE("trigram similarity agrees with the counting oracle") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const auto s = oracle::random_word(rng, 0, 12, "abc");
    const auto t = oracle::random_word(rng, 0, 12, "abc");
    const double want = oracle::dice(oracle::trigrams(s), oracle::trigrams(t));
    if (want < 0) {
      CHECK(sim_trigram(s, t) == (s == t ? 1.0 : 0.0));
    } else {
      CHECK(sim_trigram(s, t) == Approx(want));
    }
    CHECK(sim_trigram(s, t) == sim_trigram(t, s));
  }
}

TEST_CASE("token similarity") {
  CHECK(sim_token("J Smith", "Smith J") == 1.0);
  CHECK(sim_token("J Smith", "J Doe") == Approx(0.5));
  CHECK(sim_token("", "x") == 0.0);
  CHECK(sim_token("", "") == 1.0);
  CHECK(sim_token("Smith, J.", "smith j") == 1.0);
}

TEST_CASE("edit distance with the initials exception") {
  CHECK(edit_distance_ex("cat", "cut") == 1);
  CHECK(edit_distance_ex("J", "John") == 1);
  CHECK(levenshtein("J", "John") == 3);
  CHECK(edit_distance_ex("jo", "JOHN") == 1);
  CHECK(edit_distance_ex("same", "same") == 0);
  CHECK(edit_distance_ex("abc", "abcdef") == 3);  // prefix, but not short
}

TEST_CASE("edit distance against the DP oracle") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto a = oracle::random_word(rng, 0, 7, "abcd");
    const auto b = oracle::random_word(rng, 0, 7, "abcd");
    const auto lev = oracle::levenshtein(a, b);
    CHECK(levenshtein(a, b) == lev);
    const bool exception = a != b && std::min(a.size(), b.size()) <= 2 &&
                           (a.size() <= b.size() ? b.rfind(a, 0) == 0 : a.rfind(b, 0) == 0);
    CHECK(edit_distance_ex(a, b) <= lev);
    CHECK(edit_distance_ex(a, b) == (exception ? 1 : lev));
  }
}

TEST_CASE("token pair similarity") {
  CHECK(token_pair_similarity("smith", "smith") == 1.0);
  CHECK(token_pair_similarity("cat", "cut") == Approx(1.0 - 1.0 / 3.0));
  CHECK(token_pair_similarity("J", "John") == Approx(0.75));
  CHECK_THROWS_AS(token_pair_similarity("", "x"), UsageError);
}

TEST_CASE("boundary positions") {
  {
    const Words a = {"john", "smith", "jane"};
    const auto p = boundary_positions(a, a);
    CHECK(p.a == p.b);
  }
  {
    const auto p = boundary_positions(Words{"a", "b"}, Words{"x", "y", "z"});
    CHECK(p.a == std::vector<double>{0.25, 0.75});
    CHECK(p.b[0] == Approx(1.0 / 6));
    CHECK(p.b[1] == Approx(0.5));
    CHECK(p.b[2] == Approx(5.0 / 6));
  }
  {
    const auto p = boundary_positions(Words{"x", "q"}, Words{"q"});
    CHECK(p.a[1] == Approx(0.625));
    CHECK(p.b[0] == Approx(0.625));
    // "x" rescaled within [0, 0.75] -> [0, 0.625].
    CHECK(p.a[0] == Approx(0.25 * 0.625 / 0.75));
  }
}

TEST_CASE("crossing boundaries") {
  const auto p = boundary_positions(Words{"x", "y"}, Words{"y", "x"});
  const auto q = boundary_positions(Words{"y", "x"}, Words{"x", "y"});
  CHECK(p.a == q.b);
  CHECK(p.b == q.a);
}

TEST_CASE("boundary position properties") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_authors(rng, 6), b = random_authors(rng, 6);
    const auto p = boundary_positions(a, b);
    REQUIRE(p.a.size() == a.size());
    REQUIRE(p.b.size() == b.size());
    const auto q = boundary_positions(b, a);
    CHECK(q.a == p.b);
    CHECK(q.b == p.a);
    for (const auto* side : {&p.a, &p.b}) {
      for (std::size_t k = 0; k < side->size(); ++k) {
        CHECK((*side)[k] >= 0.0);
        CHECK((*side)[k] <= 1.0);
        if (k > 0) CHECK((*side)[k] >= (*side)[k - 1]);
      }
    }
  }
}

TEST_CASE("assignment solver equals exhaustive search") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const auto rows = std::uniform_int_distribution<std::size_t>(0, 6)(rng);
    const auto cols = std::uniform_int_distribution<std::size_t>(rows == 0 ? 0 : 1, 6)(rng);
    std::vector<std::vector<double>> w(rows, std::vector<double>(cols));
    for (auto& r : w)
      for (auto& x : r) x = weight(rng) < 0.2 ? 0.0 : weight(rng);
    std::vector<int> assignment;
    const double got = max_weight_assignment(w, &assignment);
    CHECK(got == Approx(oracle::brute_assignment(w)).epsilon(1e-12));
    double sum = 0.0;
    std::set<int> used;
    for (std::size_t r = 0; r < rows; ++r) {
      if (assignment[r] < 0) continue;
      CHECK(used.insert(assignment[r]).second);
      sum += w[r][static_cast<std::size_t>(assignment[r])];
    }
    CHECK(sum == Approx(got));
  }
}

TEST_CASE("complex author similarity") {
  const Words a = {"John", "Smith", "Jane", "Doe"};
  CHECK(sim_author_complex(a, a) == Approx(1.0));
  const Words swapped = {"Jane", "Smith", "John", "Doe"};
  const double s = sim_author_complex(a, swapped);
  CHECK(s < 1.0);
  CHECK(s == Approx(complex_by_brute_force(a, swapped)).epsilon(1e-12));
  CHECK(sim_author_complex(Words{}, Words{}) == 1.0);
  CHECK(sim_author_complex(Words{}, a) == 0.0);
}

TEST_CASE("complex author similarity equals the brute-force oracle") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_authors(rng, 6), b = random_authors(rng, 6);
    const double got = sim_author_complex(a, b);
    CHECK(got == Approx(complex_by_brute_force(a, b)).epsilon(1e-12));
    CHECK(got == Approx(sim_author_complex(b, a)).epsilon(1e-12));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0 + 1e-12);
  }
}

TEST_CASE("simple author similarity") {
  const auto same = sim_author_simple("John Smith", "John Smith");
  CHECK(same.tokenSim == 1.0);
  CHECK(same.trigramSim == 1.0);
  const auto none = sim_author_simple("abc", "xyz");
  CHECK(none.tokenSim == 0.0);
  CHECK(none.trigramSim == 0.0);
  const auto flipped = sim_author_simple("Smith J", "J Smith");
  CHECK(flipped.tokenSim == 1.0);
  CHECK(flipped.trigramSim < 1.0);
  CHECK(flipped.trigramSim ==
        Approx(oracle::dice(oracle::trigrams("smith j"), oracle::trigrams("j smith"))));
}

TEST_CASE("source similarity") {
  CHECK(sim_source("jrnl", "journal") == 1.0);
  CHECK(sim_source("Journal  of X", "journal of x") == 1.0);
  CHECK(sim_source("appl.", "applied") >= 0.8);
  CHECK(sim_source("appl.", "applied") ==
        Approx(static_cast<double>(oracle::lcs("appl.", "applied")) / 5.0));
  CHECK(sim_source("", "") == 1.0);
  CHECK(sim_source("", "x") == 0.0);
  std::mt19937_64 rng(6);
  for (int i = 0; i < 300; ++i) {
    const auto a = oracle::random_word(rng, 1, 10, "abcd");
    const auto b = oracle::random_word(rng, 1, 10, "abcd");
    CHECK(sim_source(a, b) ==
          Approx(static_cast<double>(oracle::lcs(a, b)) / static_cast<double>(std::min(a.size(), b.size()))));
  }
}

TEST_CASE("title similarity") {
  const std::string title = "approximate string matching ok";  // 30 characters
  REQUIRE(title.size() == 30);
  CHECK(sim_title(title, title) == 1.0);
  CHECK(sim_title(title, "") == 0.0);
  std::string typo = title;
  typo[10] = 'x';
  const double want = oracle::dice(oracle::trigrams(title), oracle::trigrams(typo));
  CHECK(sim_title(title, typo) == Approx(want));
  CHECK(sim_title(title, typo) > 0.8);
  CHECK(sim_title("Sparse Models", "sparse models") == 1.0);
}

TEST_CASE("year similarity") {
  CHECK(sim_year({1997}, {1997}) == 1.0);
  CHECK(sim_year({1997}, {1998}) == 0.0);
  CHECK(sim_year({120, 1995}, {1995}) == 1.0);
  CHECK(sim_year({}, {1995}) == 0.0);
  CHECK(sim_year({1999, 2001}, {1999}) == 1.0);
  CHECK(sim_year({1999, 2001}, {2001}) == 0.0);
}

TEST_CASE("pages similarity") {
  CHECK(sim_pages({120, 135}, {120, 135}) == 1.0);
  CHECK(sim_pages({120, 135}, {120, 140}) == Approx(1.0 / 3.0));
  CHECK(sim_pages({}, {7}) == 0.0);
  CHECK(sim_pages({}, {}) == 0.0);
}

TEST_CASE("whole-string features") {
  const auto same = whole_string_features("Smith 1999 Title", "Smith 1999 Title");
  CHECK(same.raw == 1.0);
  CHECK(same.letters == 1.0);
  CHECK(same.digits == 1.0);
  const auto no_digits = whole_string_features("Smith Title", "Doe Other");
  CHECK(no_digits.digits == 1.0);
  const std::string a = "Smith J Fast parsing 1999", b = "Smith J Slow parsing 1999";
  const auto diff = whole_string_features(a, b);
  CHECK(diff.raw == Approx(oracle::dice(oracle::trigrams(a), oracle::trigrams(b))));
  CHECK(diff.letters == Approx(oracle::dice(oracle::trigrams("SmithJFastparsing"),
                                            oracle::trigrams("SmithJSlowparsing"))));
}

TEST_CASE("feature vectors by mode") {
  ParsedCitation c;
  c.raw = "Smith, J. Fast parsing. Jrnl. 1999.";
  c.authorText = "Smith J";
  c.authorTokens = {"Smith", "J"};
  c.titleText = "Fast parsing";
  c.sourceText = "Jrnl";
  c.yearNumbers = {1999};
  const auto full = feature_vector(c, c, FeatureMode::Full);
  for (double v : full.values()) CHECK((v == 1.0 || v == 0.0));
  CHECK(full.pagesJaccard == 0.0);
  CHECK(full.yearEqual == 1.0);
  CHECK(*full.authorComplex == Approx(1.0));
  CHECK(full.values().size() == 10);
  CHECK(feature_vector(c, c, FeatureMode::Pipeline).values().size() == 6);
  CHECK(feature_vector(c, c, FeatureMode::Simple).values().size() == 9);
  CHECK_FALSE(feature_vector(c, c, FeatureMode::Pipeline).authorComplex.has_value());
  CHECK_FALSE(feature_vector(c, c, FeatureMode::Pipeline).wholeRaw.has_value());
}

TEST_CASE("feature vector composes the field measures") {
  ParsedCitation a, b;
  a.raw = "Kim C, Palski A. 1980. Gradient protein. Prcdngs Algrthms 5: 387-390.";
  a.authorTokens = {"Kim", "C", "Palski", "A"};
  a.titleText = "Gradient protein";
  a.sourceText = "Prcdngs Algrthms";
  a.yearNumbers = {1980};
  a.pageNumbers = {387, 390};
  DocumentRecord d;
  d.id = "d";
  d.authors = {"Carlos Kim", "Anna Palski"};
  d.title = "Gradient protein efficient representations";
  d.journal = "Proceedings of Algorithms";
  d.year = 1980;
  d.pages = {387, 390};
  b = as_citation(d);
  const auto f = feature_vector(a, d, FeatureMode::Full);
  CHECK(*f.authorComplex == Approx(sim_author_complex(a.authorTokens, b.authorTokens)));
  CHECK(f.authorTokenSim == Approx(sim_token("Kim C Palski A", "Carlos Kim Anna Palski")));
  CHECK(f.sourceLcs == Approx(sim_source(a.sourceText, "Proceedings of Algorithms")));
  CHECK(f.titleTrigram == Approx(sim_title(a.titleText, d.title)));
  CHECK(f.yearEqual == 1.0);
  CHECK(f.pagesJaccard == 1.0);
  CHECK(*f.wholeRaw == Approx(sim_trigram(a.raw, b.raw)));
  // Symmetry.
  const auto g = feature_vector(b, a, FeatureMode::Full);
  CHECK(f.values() == g.values());
}

TEST_CASE("mode names round-trip") {
  for (auto m : {FeatureMode::Full, FeatureMode::Simple, FeatureMode::Pipeline}) {
    CHECK(parse_feature_mode(to_string(m)) == m);
  }
  CHECK_FALSE(parse_feature_mode("full").has_value());
}
