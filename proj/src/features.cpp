#include <algorithm>
#include <fstream>

#include "citematch/error.hpp"
#include "citematch/reference_parser.hpp"
#include "citematch/unicode.hpp"

namespace citematch {

// ---------------------------------------------------------------------------
// Dictionaries

namespace {

const std::vector<std::string> kCities = {
    "amsterdam", "athens",    "austin",     "barcelona", "beijing",   "berkeley",  "berlin",
    "boston",    "cambridge", "chicago",    "copenhagen", "dordrecht", "edinburgh", "geneva",
    "heidelberg", "helsinki", "hong",       "kong",      "kyoto",     "lisbon",    "london",
    "madrid",    "melbourne", "montreal",   "moscow",    "munich",    "new",       "york",
    "oxford",    "paris",     "philadelphia", "pittsburgh", "prague",  "princeton", "rome",
    "san",       "francisco", "seattle",    "singapore", "stanford",  "stockholm", "sydney",
    "tokyo",     "toronto",   "vancouver",  "vienna",    "warsaw",    "washington", "zurich"};

const std::vector<std::string> kMonths = {
    "january", "february", "march", "april",   "may", "june", "july", "august", "september",
    "october", "november", "december", "jan", "feb", "mar",  "apr",  "jun",    "jul",
    "aug",     "sep",      "sept",  "oct",  "nov", "dec"};

const std::vector<std::string> kJournalWords = {
    "journal",    "jrnl",       "j",         "proceedings", "proc",      "conference",
    "conf",       "transactions", "trans",   "review",      "rev",       "letters",
    "lett",       "annals",     "ann",       "bulletin",    "bull",      "acta",
    "international", "int",     "intl",      "symposium",   "symp",      "workshop",
    "quarterly",  "magazine",   "mag",       "applied",     "appl",      "physics",
    "phys",       "research",   "res",       "science",     "sci",       "computing",
    "comput",     "computer",   "mathematics", "math",      "statistics", "stat",
    "engineering", "eng",       "society",   "soc",         "communications", "commun",
    "systems",    "syst",       "advances",  "adv",         "machine",   "learning",
    "artificial", "intelligence", "intell",  "neural",      "networks",  "information",
    "inf",        "processing", "process",   "theory",      "theor",     "ieee",
    "acm",        "nature",     "chemistry", "chem",        "biology",   "biol"};

const std::vector<std::string> kParticles = {"van", "von", "der", "den", "de",  "del", "della",
                                             "la",  "le",  "di",  "da",  "dos", "du",  "ten",
                                             "ter", "bin", "ibn", "el",  "mac", "mc",  "st"};

}  // namespace

Dictionaries Dictionaries::bundled() {
  Dictionaries d;
  d.set("city", kCities);
  d.set("month", kMonths);
  d.set("journal", kJournalWords);
  d.set("particle", kParticles);
  return d;
}

std::size_t Dictionaries::index_of(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return i;
  }
  throw UsageError("unknown dictionary '" + std::string(name) + "'");
}

void Dictionaries::set(std::string_view name, const std::vector<std::string>& words) {
  auto& target = words_[index_of(name)];
  target.clear();
  for (const auto& w : words) target.insert(unicode::to_lower(w));
}

void Dictionaries::load(std::string_view name, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dictionary file " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    words.push_back(line.substr(first));
  }
  set(name, words);
}

bool Dictionaries::contains(std::string_view name, std::string_view word) const {
  return contains(index_of(name), unicode::to_lower(word));
}

bool Dictionaries::contains(std::size_t dict, std::string_view lowered) const {
  return words_[dict].contains(std::string(lowered));
}

// ---------------------------------------------------------------------------
// Features

namespace features {

namespace {

enum Base : std::size_t {
  kAllDigits, kAllLower, kAllUpper, kCapitalized, kRoman, kMixedAlnum, kSingleLetter,
  kFourDigit,
  kIsDot, kIsComma, kIsDash, kIsOpenBracket, kIsCloseBracket, kIsQuote, kIsColon,
  kIsSemicolon,
  kWordVol, kWordPp, kWordNo, kWordAnd, kWordIn, kWordEd, kWordEds, kWordEt, kWordAl,
  kWordProc,
  kDictCity, kDictMonth, kDictJournal, kDictParticle,
  kDecile0, kIsFirst = kDecile0 + 10, kIsLast,
};

static_assert(kIsLast + 1 == kPerToken);

constexpr std::array<std::string_view, kPerToken> kBaseNames = {
    "all_digits",  "all_lower",  "all_upper",    "capitalized",     "roman",
    "mixed_alnum", "single_letter", "four_digit",
    "is_dot",      "is_comma",   "is_dash",      "is_open_bracket", "is_close_bracket",
    "is_quote",    "is_colon",   "is_semicolon",
    "word_vol",    "word_pp",    "word_no",      "word_and",        "word_in",
    "word_ed",     "word_eds",   "word_et",      "word_al",         "word_proc",
    "dict_city",   "dict_month", "dict_journal", "dict_particle",
    "decile_0",    "decile_1",   "decile_2",     "decile_3",        "decile_4",
    "decile_5",    "decile_6",   "decile_7",     "decile_8",        "decile_9",
    "is_first",    "is_last"};

constexpr std::array<std::string_view, 10> kWords = {"vol", "pp", "no", "and", "in",
                                                     "ed",  "eds", "et", "al",  "proc"};

std::string offset_prefix(int offset) {
  if (offset > 0) return "+" + std::to_string(offset) + ":";
  return std::to_string(offset) + ":";
}

bool is_roman_char(char32_t c) {
  switch (c) {
    case U'i': case U'v': case U'x': case U'l': case U'c': case U'd': case U'm':
    case U'I': case U'V': case U'X': case U'L': case U'C': case U'D': case U'M':
      return true;
    default:
      return false;
  }
}

void punctuation_facts(char32_t c, std::uint64_t& mask) {
  auto set = [&](std::size_t bit) { mask |= std::uint64_t{1} << bit; };
  switch (c) {
    case U'.': set(kIsDot); break;
    case U',': set(kIsComma); break;
    case U'-': case U'\u2010': case U'\u2011': case U'\u2013': case U'\u2014':
      set(kIsDash); break;
    case U'(': case U'[': case U'{': set(kIsOpenBracket); break;
    case U')': case U']': case U'}': set(kIsCloseBracket); break;
    case U'"': case U'\'': case U'`': case U'‘': case U'’': case U'“':
    case U'”': case U'«': case U'»':
      set(kIsQuote); break;
    case U':': set(kIsColon); break;
    case U';': set(kIsSemicolon); break;
    default: break;
  }
}

}  // namespace

std::span<const std::string_view> base_names() { return kBaseNames; }

std::string name(std::size_t id) {
  if (id == kBias) return "bias";
  if (id > kBias) throw UsageError("feature id out of range");
  const int offset = kOffsets[id / kSlotWidth];
  const std::size_t base = id % kSlotWidth;
  return offset_prefix(offset) + std::string(base == kPerToken ? "oob" : kBaseNames[base]);
}

std::optional<std::size_t> id(std::string_view name) {
  if (name == "bias") return kBias;
  auto colon = name.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto prefix = name.substr(0, colon + 1);
  const auto base = name.substr(colon + 1);
  for (std::size_t slot = 0; slot < kOffsets.size(); ++slot) {
    if (offset_prefix(kOffsets[slot]) != prefix) continue;
    if (base == "oob") return slot * kSlotWidth + kPerToken;
    for (std::size_t b = 0; b < kPerToken; ++b) {
      if (kBaseNames[b] == base) return slot * kSlotWidth + b;
    }
  }
  return std::nullopt;
}

std::uint64_t token_facts(std::span<const Token> tokens, std::size_t i,
                          const Dictionaries& dicts) {
  const Token& tok = tokens[i];
  std::uint64_t mask = 0;
  auto set = [&](std::size_t bit) { mask |= std::uint64_t{1} << bit; };

  const std::u32string chars = unicode::to_u32(tok.text);
  switch (tok.kind) {
    case TokenKind::Digits:
      set(kAllDigits);
      if (chars.size() == 4) set(kFourDigit);
      break;
    case TokenKind::Letters: {
      const bool any_upper = std::any_of(chars.begin(), chars.end(), unicode::is_upper);
      const bool any_lower = std::any_of(chars.begin(), chars.end(), unicode::is_lower);
      if (any_lower && !any_upper) set(kAllLower);
      if (any_upper && !any_lower) set(kAllUpper);
      if (chars.size() == 1) set(kSingleLetter);
      if ((any_upper != any_lower) && std::all_of(chars.begin(), chars.end(), is_roman_char)) {
        set(kRoman);
      }
      break;
    }
    case TokenKind::Alphanumeric:
      set(kMixedAlnum);
      break;
    case TokenKind::Other:
      punctuation_facts(chars.empty() ? U'\0' : chars.front(), mask);
      break;
  }
  if (tok.kind != TokenKind::Other && !chars.empty() && unicode::is_upper(chars.front())) {
    set(kCapitalized);
  }

  if (tok.is_word()) {
    const std::string lowered = unicode::to_lower(tok.text);
    for (std::size_t w = 0; w < kWords.size(); ++w) {
      if (lowered == kWords[w]) set(kWordVol + w);
    }
    for (std::size_t d = 0; d < Dictionaries::kNames.size(); ++d) {
      if (dicts.contains(d, lowered)) set(kDictCity + d);
    }
  }

  const std::size_t n = tokens.size();
  set(kDecile0 + std::min<std::size_t>(9, 10 * i / n));
  if (i == 0) set(kIsFirst);
  if (i + 1 == n) set(kIsLast);
  return mask;
}

}  // namespace features

int FeatureVector::value(std::string_view name) const {
  auto id = features::id(name);
  if (!id) return 0;
  return std::binary_search(active_.begin(), active_.end(), static_cast<std::uint32_t>(*id)) ? 1
                                                                                             : 0;
}

std::vector<std::string> FeatureVector::active_names() const {
  std::vector<std::string> out;
  out.reserve(active_.size());
  for (auto id : active_) out.push_back(features::name(id));
  return out;
}

namespace {

void window_features(const std::vector<std::uint64_t>& facts, std::size_t i,
                     std::vector<std::uint32_t>& out) {
  out.clear();
  const auto n = static_cast<std::ptrdiff_t>(facts.size());
  for (std::size_t slot = 0; slot < features::kOffsets.size(); ++slot) {
    const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + features::kOffsets[slot];
    const auto base = static_cast<std::uint32_t>(slot * features::kSlotWidth);
    if (j < 0 || j >= n) {
      out.push_back(base + features::kPerToken);
      continue;
    }
    std::uint64_t mask = facts[static_cast<std::size_t>(j)];
    while (mask) {
      const int bit = __builtin_ctzll(mask);
      out.push_back(base + static_cast<std::uint32_t>(bit));
      mask &= mask - 1;
    }
  }
  out.push_back(static_cast<std::uint32_t>(features::kBias));
}

}  // namespace

namespace detail {

// Active feature ids for every position of a sequence.
std::vector<std::vector<std::uint32_t>> sequence_features(std::span<const Token> tokens,
                                                          const Dictionaries& dicts) {
  std::vector<std::uint64_t> facts(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) facts[i] = features::token_facts(tokens, i, dicts);
  std::vector<std::vector<std::uint32_t>> out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) window_features(facts, i, out[i]);
  return out;
}

}  // namespace detail

FeatureVector extract_features(std::span<const Token> tokens, std::size_t i,
                               const Dictionaries& dicts) {
  if (i >= tokens.size()) throw UsageError("token index out of range");
  std::vector<std::uint64_t> facts(tokens.size());
  for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) - 2;
       j <= static_cast<std::ptrdiff_t>(i) + 2; ++j) {
    if (j >= 0 && j < static_cast<std::ptrdiff_t>(tokens.size())) {
      facts[static_cast<std::size_t>(j)] =
          features::token_facts(tokens, static_cast<std::size_t>(j), dicts);
    }
  }
  std::vector<std::uint32_t> active;
  window_features(facts, i, active);
  return FeatureVector(std::move(active));
}

}  // namespace citematch
