#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "citematch/error.hpp"
#include "citematch/log.hpp"
#include "citematch/reference_parser.hpp"
#include "citematch/unicode.hpp"

namespace citematch {

namespace detail {
std::vector<std::vector<std::uint32_t>> sequence_features(std::span<const Token> tokens,
                                                          const Dictionaries& dicts);
}  // namespace detail

namespace {

constexpr const char* kTaggerMagic = "citematch-tagger";
constexpr int kTaggerVersion = 1;
constexpr std::size_t kTransitionRows = kLabelCount + 1;

std::size_t idx(TokenLabel l) { return static_cast<std::size_t>(l); }

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  return buf;
}

}  // namespace

const char* to_string(TokenLabel label) {
  switch (label) {
    case TokenLabel::Author: return "Author";
    case TokenLabel::Title: return "Title";
    case TokenLabel::Source: return "Source";
    case TokenLabel::Year: return "Year";
    case TokenLabel::Pages: return "Pages";
    case TokenLabel::Other: return "Other";
  }
  return "?";
}

std::optional<TokenLabel> parse_label(std::string_view name) {
  for (auto l : kAllLabels) {
    if (name == to_string(l)) return l;
  }
  return std::nullopt;
}

TaggerModel::TaggerModel()
    : emission_(features::kCount * kLabelCount, 0.0),
      transition_(kTransitionRows * kLabelCount, 0.0) {}

std::vector<TokenLabel> TaggerModel::viterbi(
    const std::vector<std::vector<std::uint32_t>>& active) const {
  const std::size_t n = active.size();
  if (n == 0) return {};
  std::vector<std::array<double, kLabelCount>> best(n);
  std::vector<std::array<std::uint8_t, kLabelCount>> back(n);

  auto emit = [&](std::size_t t, std::size_t y) {
    double s = 0.0;
    for (auto f : active[t]) s += emission_[f * kLabelCount + y];
    return s;
  };

  for (std::size_t y = 0; y < kLabelCount; ++y) best[0][y] = transition_[y] + emit(0, y);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t y = 0; y < kLabelCount; ++y) {
      double top = -std::numeric_limits<double>::infinity();
      std::uint8_t arg = 0;
      for (std::size_t p = 0; p < kLabelCount; ++p) {
        const double s = best[t - 1][p] + transition_[(p + 1) * kLabelCount + y];
        if (s > top) {
          top = s;
          arg = static_cast<std::uint8_t>(p);
        }
      }
      best[t][y] = top + emit(t, y);
      back[t][y] = arg;
    }
  }

  std::size_t last = 0;
  for (std::size_t y = 1; y < kLabelCount; ++y) {
    if (best[n - 1][y] > best[n - 1][last]) last = y;
  }
  std::vector<TokenLabel> labels(n);
  for (std::size_t t = n; t-- > 0;) {
    labels[t] = kAllLabels[last];
    if (t > 0) last = back[t][last];
  }
  return labels;
}

std::vector<TokenLabel> TaggerModel::tag(std::span<const Token> tokens,
                                         const Dictionaries& dicts) const {
  return viterbi(detail::sequence_features(tokens, dicts));
}

double TaggerModel::score(std::span<const Token> tokens, std::span<const TokenLabel> labels,
                          const Dictionaries& dicts) const {
  if (tokens.size() != labels.size()) throw UsageError("token/label count mismatch");
  const auto active = detail::sequence_features(tokens, dicts);
  double s = 0.0;
  std::optional<TokenLabel> prev;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    s += transition(prev, labels[t]);
    for (auto f : active[t]) s += emission(f, labels[t]);
    prev = labels[t];
  }
  return s;
}

void TaggerModel::save(std::ostream& out) const {
  out << kTaggerMagic << '\t' << kTaggerVersion << '\n';
  out << "features\t" << features::kCount << '\n';
  for (std::size_t f = 0; f < features::kCount; ++f) {
    for (auto l : kAllLabels) {
      const double w = emission(f, l);
      if (w != 0.0) out << "E\t" << features::name(f) << '\t' << to_string(l) << '\t'
                        << format_weight(w) << '\n';
    }
  }
  for (std::size_t row = 0; row < kTransitionRows; ++row) {
    for (auto l : kAllLabels) {
      const double w = transition_[row * kLabelCount + idx(l)];
      if (w == 0.0) continue;
      out << "T\t" << (row == 0 ? "START" : to_string(kAllLabels[row - 1])) << '\t'
          << to_string(l) << '\t' << format_weight(w) << '\n';
    }
  }
}

TaggerModel TaggerModel::load(std::istream& in) {
  auto fail = [](std::size_t line, const std::string& why) {
    return DataError("tagger model line " + std::to_string(line) + ": " + why);
  };
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw DataError("empty tagger model");
  {
    std::istringstream hs(line);
    std::string magic;
    int version = 0;
    hs >> magic >> version;
    if (magic != kTaggerMagic) throw fail(lineno, "not a tagger model");
    if (version != kTaggerVersion) throw fail(lineno, "unsupported version");
  }
  TaggerModel model;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, '\t');) cols.push_back(c);
    auto weight = [&](const std::string& s) {
      try {
        std::size_t used = 0;
        double w = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return w;
      } catch (const std::exception&) {
        throw fail(lineno, "bad weight '" + s + "'");
      }
    };
    if (cols[0] == "features") {
      if (cols.size() != 2 || cols[1] != std::to_string(features::kCount)) {
        throw fail(lineno, "feature inventory mismatch");
      }
    } else if (cols[0] == "E" && cols.size() == 4) {
      auto f = features::id(cols[1]);
      auto l = parse_label(cols[2]);
      if (!f) throw fail(lineno, "unknown feature '" + cols[1] + "'");
      if (!l) throw fail(lineno, "unknown label '" + cols[2] + "'");
      model.emission_[*f * kLabelCount + idx(*l)] = weight(cols[3]);
    } else if (cols[0] == "T" && cols.size() == 4) {
      std::size_t row = 0;
      if (cols[1] != "START") {
        auto p = parse_label(cols[1]);
        if (!p) throw fail(lineno, "unknown label '" + cols[1] + "'");
        row = idx(*p) + 1;
      }
      auto l = parse_label(cols[2]);
      if (!l) throw fail(lineno, "unknown label '" + cols[2] + "'");
      model.transition_[row * kLabelCount + idx(*l)] = weight(cols[3]);
    } else {
      throw fail(lineno, "unrecognised record");
    }
  }
  return model;
}

void TaggerModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  save(out);
  if (!out) throw IoError("write failed: " + path);
}

TaggerModel TaggerModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load(in);
}

// Weight vector with lazily maintained running average (Daume's trick):
// avg = w - acc / steps.
class TaggerTrainer {
 public:
  TaggerTrainer() : acc_emission_(features::kCount * kLabelCount, 0.0),
                    acc_transition_(kTransitionRows * kLabelCount, 0.0) {}

  void learn(const std::vector<std::vector<std::uint32_t>>& active,
             const std::vector<TokenLabel>& gold) {
    const auto predicted = model_.viterbi(active);
    if (predicted != gold) {
      std::size_t prev_gold = 0, prev_pred = 0;  // transition rows; 0 = start
      for (std::size_t t = 0; t < gold.size(); ++t) {
        const std::size_t g = idx(gold[t]);
        const std::size_t p = idx(predicted[t]);
        if (g != p) {
          for (auto f : active[t]) {
            bump_emission(f * kLabelCount + g, 1.0);
            bump_emission(f * kLabelCount + p, -1.0);
          }
        }
        if (g != p || prev_gold != prev_pred) {
          bump_transition(prev_gold * kLabelCount + g, 1.0);
          bump_transition(prev_pred * kLabelCount + p, -1.0);
        }
        prev_gold = g + 1;
        prev_pred = p + 1;
      }
    }
    ++steps_;
  }

  TaggerModel averaged() const {
    TaggerModel out = model_;
    for (std::size_t i = 0; i < out.emission_.size(); ++i) {
      out.emission_[i] -= acc_emission_[i] / steps_;
    }
    for (std::size_t i = 0; i < out.transition_.size(); ++i) {
      out.transition_[i] -= acc_transition_[i] / steps_;
    }
    return out;
  }

 private:
  void bump_emission(std::size_t i, double d) {
    model_.emission_[i] += d;
    acc_emission_[i] += steps_ * d;
  }
  void bump_transition(std::size_t i, double d) {
    model_.transition_[i] += d;
    acc_transition_[i] += steps_ * d;
  }

  TaggerModel model_;
  std::vector<double> acc_emission_;
  std::vector<double> acc_transition_;
  double steps_ = 1.0;
};

TaggerModel train_tagger(std::span<const LabeledSequence> corpus,
                         const TaggerTrainingOptions& options, const Dictionaries& dicts) {
  if (corpus.empty()) throw UsageError("cannot train a tagger on an empty corpus");
  if (options.epochs < 1) throw UsageError("epochs must be positive");

  std::vector<std::vector<std::vector<std::uint32_t>>> cached;
  cached.reserve(corpus.size());
  for (const auto& seq : corpus) {
    if (seq.tokens.empty()) throw UsageError("training sequence without tokens");
    if (seq.tokens.size() != seq.labels.size()) {
      throw UsageError("training sequence has mismatched token/label counts");
    }
    cached.push_back(detail::sequence_features(seq.tokens, dicts));
  }

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);
  TaggerTrainer trainer;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    if (options.shuffle) std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) trainer.learn(cached[i], corpus[i].labels);
  }
  return trainer.averaged();
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

std::optional<std::int64_t> parse_integer(std::string_view text) {
  std::int64_t value = 0;
  for (std::size_t i = 0; i < text.size();) {
    auto d = unicode::decode_at(text, i);
    const int digit = unicode::digit_value(d.code);
    if (digit < 0) return std::nullopt;
    if (value > (std::numeric_limits<std::int64_t>::max() - digit) / 10) return std::nullopt;
    value = value * 10 + digit;
    i += d.length;
  }
  return value;
}

// Texts of the tokens carrying `label`. Adjacent tokens keep the original
// gap (collapsed to one space); separate runs are joined by one space.
std::string field_text(std::span<const Token> tokens,
                       std::span<const TokenLabel> labels, TokenLabel label) {
  std::string out;
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (labels[i] != label) continue;
    if (prev) {
      if (*prev + 1 == i) {
        if (tokens[i].start > tokens[*prev].end) out += ' ';
      } else {
        out += ' ';
      }
    }
    out += tokens[i].text;
    prev = i;
  }
  return out;
}

}  // namespace

ParsedCitation assemble(std::string_view raw, std::span<const Token> tokens,
                        std::span<const TokenLabel> labels) {
  if (tokens.size() != labels.size()) throw UsageError("token/label count mismatch");
  ParsedCitation c;
  c.raw = std::string(raw);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    switch (labels[i]) {
      case TokenLabel::Author:
        if (!c.authorText.empty()) c.authorText += ' ';
        c.authorText += t.text;
        if (t.is_word()) c.authorTokens.push_back(t.text);
        break;
      case TokenLabel::Year:
      case TokenLabel::Pages:
        if (t.kind == TokenKind::Digits) {
          auto v = parse_integer(t.text);
          if (!v) {
            warn("ignoring out-of-range number '" + t.text + "' in reference");
          } else {
            (labels[i] == TokenLabel::Year ? c.yearNumbers : c.pageNumbers).insert(*v);
          }
        }
        break;
      default:
        break;
    }
  }
  c.titleText = field_text(tokens, labels, TokenLabel::Title);
  c.sourceText = field_text(tokens, labels, TokenLabel::Source);
  return c;
}

ParsedCitation parse_reference(std::string_view raw, const TaggerModel& model,
                               const Dictionaries& dicts) {
  const auto tokens = tokenize(raw);
  const auto labels = model.tag(tokens, dicts);
  return assemble(raw, tokens, labels);
}

}  // namespace citematch
