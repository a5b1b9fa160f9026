#include "citematch/field_similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "citematch/error.hpp"
#include "citematch/tokenizer.hpp"
#include "citematch/unicode.hpp"

namespace citematch {

namespace {

// Three code points packed into one integer; each fits in 21 bits.
std::vector<std::uint64_t> packed_trigrams(std::string_view s) {
  const auto cps = unicode::to_u32(s);
  std::vector<std::uint64_t> out;
  if (cps.size() < 3) return out;
  out.reserve(cps.size() - 2);
  for (std::size_t i = 0; i + 2 < cps.size(); ++i) {
    out.push_back((std::uint64_t{cps[i]} << 42) | (std::uint64_t{cps[i + 1]} << 21) |
                  std::uint64_t{cps[i + 2]});
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename T>
std::size_t multiset_intersection(const std::vector<T>& a, const std::vector<T>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

template <typename T>
double dice(const std::vector<T>& a, const std::vector<T>& b) {
  return 2.0 * static_cast<double>(multiset_intersection(a, b)) /
         static_cast<double>(a.size() + b.size());
}

std::vector<std::string> lowered_words(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(s)) {
    if (t.is_word()) out.push_back(unicode::to_lower(t.text));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t levenshtein_u32(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (std::size_t i = 0; i < s.size();) {
    auto d = unicode::decode_at(s, i);
    if (unicode::is_space(d.code)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out.append(s.substr(i, d.length));
    }
    i += d.length;
  }
  return out;
}

std::string keep_if(std::string_view s, bool (*pred)(char32_t)) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    auto d = unicode::decode_at(s, i);
    if (pred(d.code)) out.append(s.substr(i, d.length));
    i += d.length;
  }
  return out;
}

std::string join_words(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::optional<std::int64_t> closest_to_2000(const std::set<std::int64_t>& years) {
  std::optional<std::int64_t> best;
  for (auto y : years) {
    // Ascending iteration keeps the smaller year on ties.
    if (!best || std::llabs(y - 2000) < std::llabs(*best - 2000)) best = y;
  }
  return best;
}

}  // namespace

TrigramMultiset trigram_multiset(std::string_view s) {
  TrigramMultiset out;
  const auto cps = unicode::to_u32(s);
  for (std::size_t i = 0; i + 2 < cps.size(); ++i) {
    ++out[unicode::to_utf8(std::u32string_view(cps).substr(i, 3))];
  }
  return out;
}

double sim_trigram(std::string_view s, std::string_view t) {
  const auto a = packed_trigrams(s);
  const auto b = packed_trigrams(t);
  if (a.empty() && b.empty()) return s == t ? 1.0 : 0.0;
  return dice(a, b);
}

double sim_token(std::string_view s, std::string_view t) {
  const auto a = lowered_words(s);
  const auto b = lowered_words(t);
  if (a.empty() && b.empty()) return 1.0;
  return dice(a, b);
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein_u32(unicode::to_u32(a), unicode::to_u32(b));
}

std::size_t edit_distance_ex(std::string_view a, std::string_view b) {
  if (a == b) return 0;
  const auto ua = unicode::to_u32(unicode::to_lower(a));
  const auto ub = unicode::to_u32(unicode::to_lower(b));
  const auto& shorter = ua.size() <= ub.size() ? ua : ub;
  const auto& longer = ua.size() <= ub.size() ? ub : ua;
  if (shorter.size() <= 2 && longer.compare(0, shorter.size(), shorter) == 0) return 1;
  return levenshtein(a, b);
}

double token_pair_similarity(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) throw UsageError("token_pair_similarity needs non-empty tokens");
  const double longest = static_cast<double>(std::max(unicode::length(a), unicode::length(b)));
  const double sim = 1.0 - static_cast<double>(edit_distance_ex(a, b)) / longest;
  return std::clamp(sim, 0.0, 1.0);
}

BoundaryPositions boundary_positions(std::span<const std::string> tokens_a,
                                     std::span<const std::string> tokens_b) {
  const std::size_t na = tokens_a.size();
  const std::size_t nb = tokens_b.size();
  BoundaryPositions out{std::vector<double>(na), std::vector<double>(nb)};
  for (std::size_t i = 0; i < na; ++i) out.a[i] = (static_cast<double>(i) + 0.5) / na;
  for (std::size_t j = 0; j < nb; ++j) out.b[j] = (static_cast<double>(j) + 0.5) / nb;

  std::vector<std::string> la(na), lb(nb);
  for (std::size_t i = 0; i < na; ++i) la[i] = unicode::to_lower(tokens_a[i]);
  for (std::size_t j = 0; j < nb; ++j) lb[j] = unicode::to_lower(tokens_b[j]);

  // Equal-token pairs swept by anti-diagonal (i + j), nearer the main
  // diagonal first, keeping only pairs that neither reuse a token nor cross
  // an accepted one. A mirrored tie (i,j) / (j,i) of the same token would be
  // resolved by argument order, so both are dropped.
  struct Candidate {
    std::size_t i, j;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      if (la[i] == lb[j]) cands.push_back({i, j});
  auto key = [&](const Candidate& c) {
    const std::size_t off = c.i > c.j ? c.i - c.j : c.j - c.i;
    return std::tuple<std::size_t, std::size_t, const std::string&>(c.i + c.j, off, la[c.i]);
  };
  std::stable_sort(cands.begin(), cands.end(),
                   [&](const Candidate& x, const Candidate& y) { return key(x) < key(y); });

  std::vector<Candidate> accepted;
  auto compatible = [&](const Candidate& c) {
    for (const auto& a : accepted) {
      if (a.i == c.i || a.j == c.j) return false;
      if ((a.i < c.i) != (a.j < c.j)) return false;
    }
    return true;
  };
  for (std::size_t k = 0; k < cands.size();) {
    std::size_t end = k + 1;
    while (end < cands.size() && key(cands[end]) == key(cands[k])) ++end;
    std::vector<Candidate> fit;
    for (std::size_t t = k; t < end; ++t)
      if (compatible(cands[t])) fit.push_back(cands[t]);
    if (fit.size() == 1) accepted.push_back(fit[0]);
    k = end;
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const Candidate& x, const Candidate& y) { return x.i < y.i; });

  struct Boundary {
    std::ptrdiff_t i, j;
    double initial_a, initial_b, aligned;
  };
  std::vector<Boundary> boundaries{{-1, -1, 0.0, 0.0, 0.0}};
  for (const auto& c : accepted) {
    boundaries.push_back({static_cast<std::ptrdiff_t>(c.i), static_cast<std::ptrdiff_t>(c.j),
                          out.a[c.i], out.b[c.j], (out.a[c.i] + out.b[c.j]) / 2.0});
  }
  boundaries.push_back({static_cast<std::ptrdiff_t>(na), static_cast<std::ptrdiff_t>(nb), 1.0,
                        1.0, 1.0});

  auto rescale = [](std::vector<double>& pos, std::ptrdiff_t lo, std::ptrdiff_t hi,
                    double l, double r, double l2, double r2) {
    for (std::ptrdiff_t k = lo + 1; k < hi; ++k) {
      auto& p = pos[static_cast<std::size_t>(k)];
      p = l2 + (p - l) * (r2 - l2) / (r - l);
    }
  };
  for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
    const auto& lo = boundaries[k];
    const auto& hi = boundaries[k + 1];
    rescale(out.a, lo.i, hi.i, lo.initial_a, hi.initial_a, lo.aligned, hi.aligned);
    rescale(out.b, lo.j, hi.j, lo.initial_b, hi.initial_b, lo.aligned, hi.aligned);
  }
  for (std::size_t k = 1; k + 1 < boundaries.size(); ++k) {
    out.a[static_cast<std::size_t>(boundaries[k].i)] = boundaries[k].aligned;
    out.b[static_cast<std::size_t>(boundaries[k].j)] = boundaries[k].aligned;
  }
  return out;
}

double max_weight_assignment(const std::vector<std::vector<double>>& weights,
                             std::vector<int>* assignment) {
  const std::size_t rows = weights.size();
  const std::size_t cols = rows ? weights[0].size() : 0;
  if (assignment) assignment->assign(rows, -1);
  if (rows == 0 || cols == 0) return 0.0;

  // Minimise cost = -weight on an n x m matrix with n <= m (transpose if needed).
  const bool transposed = rows > cols;
  const std::size_t n = transposed ? cols : rows;
  const std::size_t m = transposed ? rows : cols;
  auto cost = [&](std::size_t i, std::size_t j) {
    return transposed ? -weights[j - 1][i - 1] : -weights[i - 1][j - 1];
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  double total = 0.0;
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    const std::size_t r = transposed ? j - 1 : p[j] - 1;
    const std::size_t c = transposed ? p[j] - 1 : j - 1;
    total += weights[r][c];
    if (assignment) (*assignment)[r] = static_cast<int>(c);
  }
  return total;
}

double sim_author_complex(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const auto pos = boundary_positions(a, b);
  std::vector<std::vector<double>> w(a.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      w[i][j] = token_pair_similarity(a[i], b[j]) * (1.0 - std::fabs(pos.a[i] - pos.b[j]));
    }
  }
  const double total = max_weight_assignment(w);
  return std::clamp(total / static_cast<double>(std::max(a.size(), b.size())), 0.0, 1.0);
}

SimpleAuthorSimilarity sim_author_simple(std::string_view a, std::string_view b) {
  return {sim_token(a, b), sim_trigram(unicode::to_lower(a), unicode::to_lower(b))};
}

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

double sim_source(std::string_view a, std::string_view b) {
  const auto ua = unicode::to_u32(unicode::to_lower(collapse_whitespace(a)));
  const auto ub = unicode::to_u32(unicode::to_lower(collapse_whitespace(b)));
  if (ua.empty() && ub.empty()) return 1.0;
  if (ua.empty() || ub.empty()) return 0.0;
  return static_cast<double>(lcs_length(ua, ub)) /
         static_cast<double>(std::min(ua.size(), ub.size()));
}

double sim_title(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) return 0.0;
  return sim_trigram(unicode::to_lower(a), unicode::to_lower(b));
}

double sim_year(const std::set<std::int64_t>& a, const std::set<std::int64_t>& b) {
  const auto ya = closest_to_2000(a);
  const auto yb = closest_to_2000(b);
  return ya && yb && *ya == *yb ? 1.0 : 0.0;
}

double sim_pages(const std::set<std::int64_t>& a, const std::set<std::int64_t>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  for (auto x : a) common += b.count(x);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

WholeStringSimilarity whole_string_features(std::string_view a, std::string_view b) {
  return {sim_trigram(a, b),
          sim_trigram(keep_if(a, unicode::is_letter), keep_if(b, unicode::is_letter)),
          sim_trigram(keep_if(a, unicode::is_digit), keep_if(b, unicode::is_digit))};
}

const char* to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::Full: return "Full";
    case FeatureMode::Simple: return "Simple";
    case FeatureMode::Pipeline: break;
  }
  return "Pipeline";
}

std::optional<FeatureMode> parse_feature_mode(std::string_view name) {
  if (name == "Full") return FeatureMode::Full;
  if (name == "Simple") return FeatureMode::Simple;
  if (name == "Pipeline") return FeatureMode::Pipeline;
  return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, 10> kFullNames = {
    "authorComplex", "authorTokenSim", "authorTrigramSim", "sourceLcs", "titleTrigram",
    "yearEqual",     "pagesJaccard",   "wholeRaw",         "wholeLetters", "wholeDigits"};
constexpr std::array<std::string_view, 9> kSimpleNames = {
    "authorTokenSim", "authorTrigramSim", "sourceLcs",    "titleTrigram", "yearEqual",
    "pagesJaccard",   "wholeRaw",         "wholeLetters", "wholeDigits"};
constexpr std::array<std::string_view, 6> kPipelineNames = {
    "authorTokenSim", "authorTrigramSim", "sourceLcs", "titleTrigram", "yearEqual",
    "pagesJaccard"};

}  // namespace

std::span<const std::string_view> SimilarityFeatures::names(FeatureMode mode) {
  if (mode == FeatureMode::Full) return kFullNames;
  if (mode == FeatureMode::Simple) return kSimpleNames;
  return kPipelineNames;
}

std::vector<double> SimilarityFeatures::values() const {
  std::vector<double> out;
  if (has_author_complex(mode)) out.push_back(authorComplex.value_or(0.0));
  out.insert(out.end(),
             {authorTokenSim, authorTrigramSim, sourceLcs, titleTrigram, yearEqual, pagesJaccard});
  if (has_whole_string(mode)) {
    out.insert(out.end(),
               {wholeRaw.value_or(0.0), wholeLetters.value_or(0.0), wholeDigits.value_or(0.0)});
  }
  return out;
}

SimilarityFeatures SimilarityFeatures::from_values(FeatureMode mode,
                                                   std::span<const double> values) {
  if (values.size() != names(mode).size()) {
    throw UsageError("expected " + std::to_string(names(mode).size()) + " feature values for " +
                     to_string(mode) + " mode");
  }
  SimilarityFeatures f;
  f.mode = mode;
  std::size_t k = 0;
  if (has_author_complex(mode)) f.authorComplex = values[k++];
  f.authorTokenSim = values[k++];
  f.authorTrigramSim = values[k++];
  f.sourceLcs = values[k++];
  f.titleTrigram = values[k++];
  f.yearEqual = values[k++];
  f.pagesJaccard = values[k++];
  if (has_whole_string(mode)) {
    f.wholeRaw = values[k++];
    f.wholeLetters = values[k++];
    f.wholeDigits = values[k++];
  }
  return f;
}

SimilarityFeatures feature_vector(const ParsedCitation& a, const ParsedCitation& b,
                                  FeatureMode mode) {
  SimilarityFeatures f;
  f.mode = mode;
  const auto simple = sim_author_simple(join_words(a.authorTokens), join_words(b.authorTokens));
  f.authorTokenSim = simple.tokenSim;
  f.authorTrigramSim = simple.trigramSim;
  f.sourceLcs = sim_source(a.sourceText, b.sourceText);
  f.titleTrigram = sim_title(a.titleText, b.titleText);
  f.yearEqual = sim_year(a.yearNumbers, b.yearNumbers);
  f.pagesJaccard = sim_pages(a.pageNumbers, b.pageNumbers);
  if (has_author_complex(mode)) f.authorComplex = sim_author_complex(a.authorTokens, b.authorTokens);
  if (has_whole_string(mode)) {
    const auto whole = whole_string_features(a.raw, b.raw);
    f.wholeRaw = whole.raw;
    f.wholeLetters = whole.letters;
    f.wholeDigits = whole.digits;
  }
  return f;
}

SimilarityFeatures feature_vector(const ParsedCitation& a, const DocumentRecord& b,
                                  FeatureMode mode) {
  return feature_vector(a, as_citation(b), mode);
}

}  // namespace citematch
