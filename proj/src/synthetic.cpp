#include "citematch/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <tuple>

#include "citematch/error.hpp"
#include "citematch/tokenizer.hpp"
#include "citematch/unicode.hpp"

namespace citematch::synth {

namespace {

constexpr std::array<std::string_view, 48> kFirstNames = {
    "John",   "Jane",    "Maria",   "José",    "Zoë",     "Łukasz",  "Piotr",   "Anna",
    "Wei",    "Hiroshi", "Søren",   "François", "Ahmed",  "Olga",    "Mikołaj", "Ingrid",
    "Carlos", "Emily",   "David",   "Sarah",   "Tomasz",  "Kai",     "Lars",    "Nina",
    "Paolo",  "Elena",   "Rafael",  "Yuki",    "Andrea",  "Michael", "Laura",   "Pedro",
    "Hannah", "Ivan",    "Chloé",   "Mateo",   "Agnieszka", "Björn", "Ramón",   "Fatima",
    "Oskar",  "Leila",   "Daniel",  "Marta",   "Stefan",  "Irene",   "Henrik",  "Alice"};

constexpr std::array<std::string_view, 40> kSurnames = {
    "Smith",  "Doe",     "Müller",  "Nowak",   "Kowalski", "García",  "Núñez",   "Dvořák",
    "Tanaka", "Chen",    "Ivanov",  "Jensen",  "Rossi",    "Dubois",  "Schmidt", "Wójcik",
    "Brown",  "Lindqvist", "Costa", "Yılmaz",  "Novák",    "Fischer", "Moreau",  "Kim",
    "Silva",  "Becker",  "Horvath", "Larsen",  "Petrov",   "Santos",  "Weber",   "Olsen",
    "Zieliński", "Lambert", "Ortiz", "Kovač",  "Martin",   "Sato",    "Ferrari", "Haas"};

constexpr std::array<std::string_view, 40> kSyllables = {
    "ka", "ro", "len", "mi", "sto", "ber", "vak", "ni", "ton", "dal", "gre", "wi", "lo", "mar",
    "tin", "son", "ski", "ova", "rez", "bar", "del", "fu", "gan", "hol", "jor", "kel", "lun", "mor",
    "nes", "pal", "quin", "ras", "sel", "tor", "ul", "ven", "wen", "yan", "zor", "bre"};

constexpr std::array<std::string_view, 4> kParticles = {"van", "de", "von", "der"};

constexpr std::array<std::string_view, 96> kTitleWords = {
    "learning",    "efficient",  "algorithms",  "parallel",   "networks",   "adaptive",
    "analysis",    "probabilistic", "models",   "inference",  "structured", "prediction",
    "dynamic",     "programming", "approximate", "string",    "matching",   "retrieval",
    "information", "systems",    "distributed", "databases",  "queries",    "optimization",
    "convex",      "methods",    "neural",      "representations", "graphs", "clustering",
    "hierarchical", "bayesian",  "estimation",  "robust",     "statistical", "framework",
    "semantic",    "parsing",    "natural",     "language",   "processing", "scalable",
    "indexing",    "compression", "sparse",     "linear",     "kernel",     "machines",
    "theory",      "complexity", "random",      "walks",      "spectral",   "decomposition",
    "online",      "stochastic", "gradient",    "descent",    "markov",     "chains",
    "sampling",    "evaluation", "benchmark",   "protocols",  "secure",     "computation",
    "visual",      "recognition", "object",     "detection",  "temporal",   "logic",
    "verification", "concurrent", "programs",   "type",       "systems",    "functional",
    "entity",      "resolution", "citation",    "analysis",   "record",     "linkage",
    "genome",      "sequences",  "alignment",   "protein",    "folding",    "molecular",
    "quantum",     "circuits",   "error",       "correction", "wireless",   "sensor"};

constexpr std::array<std::string_view, 8> kTitleGlue = {"of", "for", "in", "with",
                                                        "and", "on", "via", "towards"};

constexpr std::array<std::string_view, 8> kJournalHeads = {
    "Journal of", "Transactions on", "Annals of", "Proceedings of",
    "Review of",  "Letters in",      "Advances in", "Communications in"};
constexpr std::array<std::string_view, 14> kJournalQualifiers = {
    "Applied",  "Theoretical", "Computational", "Experimental", "Statistical", "Mathematical",
    "Modern",   "Discrete",    "Physical",      "Molecular",    "Cognitive",   "Information",
    "Advanced", "Numerical"};
constexpr std::array<std::string_view, 16> kJournalTopics = {
    "Physics",    "Statistics", "Linguistics", "Biology",     "Computing",  "Chemistry",
    "Economics",  "Sciences",   "Engineering", "Mathematics", "Psychology", "Networks",
    "Algorithms", "Systems",    "Medicine",    "Geography"};

constexpr std::array<std::string_view, 6> kJournalStop = {"of", "on", "in", "the", "for", "and"};

template <typename T, std::size_t N>
std::string_view pick(const std::array<T, N>& pool, Rng& rng) {
  return pool[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

std::string capitalize(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 32);
  return out;
}

std::string make_surname(Rng& rng) {
  if (chance(rng, 0.2)) return std::string(pick(kSurnames, rng));
  std::string s;
  const std::size_t parts = uniform(rng, 2, 3);
  for (std::size_t i = 0; i < parts; ++i) s += pick(kSyllables, rng);
  s = capitalize(s);
  if (chance(rng, 0.04)) s = std::string(pick(kParticles, rng)) + " " + s;
  return s;
}

// First code point of a word, uppercased when ASCII.
std::string initial_of(std::string_view word) {
  const auto d = unicode::decode_at(word, 0);
  return std::string(word.substr(0, d.length));
}

struct Name {
  std::string first;
  std::string last;
};

Name split_name(const std::string& full) {
  const auto space = full.find(' ');
  if (space == std::string::npos) return {"", full};
  return {full.substr(0, space), full.substr(space + 1)};
}

// Citation text under construction, with the byte span and label of every piece.
class Builder {
 public:
  void add(std::string_view piece, TokenLabel label, bool space = true) {
    if (space && !text_.empty()) text_ += ' ';
    const std::size_t start = text_.size();
    text_ += piece;
    spans_.emplace_back(start, text_.size(), label);
  }
  void glue(std::string_view piece, TokenLabel label) { add(piece, label, false); }
  // Field terminator; skipped when the text already ends with it.
  void end(char c) {
    if (!text_.empty() && text_.back() == c) return;
    glue(std::string(1, c), TokenLabel::Other);
  }

  LabeledCitation finish(std::string cluster) const {
    LabeledCitation out;
    out.text = text_;
    out.cluster = std::move(cluster);
    for (const auto& tok : tokenize(text_)) {
      TokenLabel label = TokenLabel::Other;
      for (const auto& [s, e, l] : spans_) {
        if (tok.start >= s && tok.start < e) {
          label = l;
          break;
        }
      }
      out.labels.push_back(label);
    }
    return out;
  }

 private:
  std::string text_;
  std::vector<std::tuple<std::size_t, std::size_t, TokenLabel>> spans_;
};

std::string typo(std::string_view word, Rng& rng) {
  std::string w(word);
  std::vector<std::size_t> letters;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] >= 'a' && w[i] <= 'z') letters.push_back(i);
  }
  if (letters.empty()) return w;
  const std::size_t at = letters[uniform(rng, 0, letters.size() - 1)];
  char c;
  do {
    c = static_cast<char>('a' + uniform(rng, 0, 25));
  } while (c == w[at]);
  w[at] = c;
  return w;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto j = s.find(' ', i);
    const auto end = j == std::string_view::npos ? s.size() : j;
    if (end > i) out.emplace_back(s.substr(i, end - i));
    i = end + 1;
  }
  return out;
}

std::string abbreviate_journal(std::string_view journal, Rng& rng) {
  std::string out;
  const bool drop_stop = chance(rng, 0.5);
  for (const auto& w : split_words(journal)) {
    const bool stop = std::find(kJournalStop.begin(), kJournalStop.end(), w) != kJournalStop.end();
    if (stop && drop_stop) continue;
    std::string piece = w;
    if (!stop && w.size() >= 5) {
      const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      if (r < 0.45) {
        piece = truncate_word(w, uniform(rng, 3, 5));
      } else if (r < 0.7) {
        piece = drop_vowels(w);
      }
    }
    if (!out.empty()) out += ' ';
    out += piece;
  }
  return out;
}

struct Rendering {
  std::vector<std::string> authors;  // as stored in the document
  std::string title;
  std::string journal;
  std::string year;
  std::string first_page;
  std::string last_page;
  std::string volume;
  std::string issue;
  bool pages = true;
};

void add_words(Builder& b, std::string_view text, TokenLabel label) {
  for (const auto& w : split_words(text)) b.add(w, label);
}

void add_authors(Builder& b, const Rendering& r, Rng& rng, bool perturb, int format) {
  std::vector<std::string> names = r.authors;
  bool et_al = false;
  if (perturb && names.size() > 3 && chance(rng, 0.3)) {
    names.resize(1);
    et_al = true;
  }
  const bool use_amp = chance(rng, 0.3);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) {
      if (i + 1 == names.size() && names.size() > 1 && format != 3) {
        b.add(use_amp ? "&" : "and", TokenLabel::Author);
      } else {
        b.glue(",", TokenLabel::Author);
      }
    }
    auto [first, last] = split_name(names[i]);
    if (perturb && chance(rng, 0.08)) {
      auto words = split_words(last);
      words.back() = typo(words.back(), rng);
      last.clear();
      for (const auto& w : words) last += (last.empty() ? "" : " ") + w;
    }
    const std::string init = first.empty() ? "" : initial_of(first);
    switch (format) {
      case 0:  // John Smith
        if (!first.empty()) b.add(first, TokenLabel::Author);
        add_words(b, last, TokenLabel::Author);
        break;
      case 1:  // Smith, John
        add_words(b, last, TokenLabel::Author);
        if (!first.empty()) {
          b.glue(",", TokenLabel::Author);
          b.add(first, TokenLabel::Author);
        }
        break;
      case 2:  // J. Smith
        if (!init.empty()) {
          b.add(init, TokenLabel::Author);
          b.glue(".", TokenLabel::Author);
        }
        add_words(b, last, TokenLabel::Author);
        break;
      case 3:  // Smith, J.
        add_words(b, last, TokenLabel::Author);
        if (!init.empty()) {
          b.glue(",", TokenLabel::Author);
          b.add(init, TokenLabel::Author);
          b.glue(".", TokenLabel::Author);
        }
        break;
      default:  // Smith J
        add_words(b, last, TokenLabel::Author);
        if (!init.empty()) b.add(init, TokenLabel::Author);
        break;
    }
  }
  if (et_al) {
    b.add("et", TokenLabel::Other);
    b.add("al", TokenLabel::Other);
    b.glue(".", TokenLabel::Other);
  }
}

void add_title(Builder& b, const Rendering& r) {
  for (const auto& w : split_words(r.title)) {
    if (w.back() == ':') {
      b.add(w.substr(0, w.size() - 1), TokenLabel::Title);
      b.glue(":", TokenLabel::Title);
    } else {
      b.add(w, TokenLabel::Title);
    }
  }
}

void add_pages(Builder& b, const Rendering& r, std::string_view dash) {
  b.add(r.first_page, TokenLabel::Pages);
  b.glue(dash, TokenLabel::Pages);
  b.glue(r.last_page, TokenLabel::Pages);
}

LabeledCitation render_varied(const DocumentRecord& doc, Rendering r, Rng& rng, bool perturb) {
  Builder b;
  const int format = static_cast<int>(uniform(rng, 0, 4));
  const std::array<std::string_view, 3> dashes = {"-", "--", "–"};
  const std::string_view dash = dashes[uniform(rng, 0, 2)];
  switch (uniform(rng, 0, 5)) {
    case 0:  // Authors. Title. Journal, 12(3):120-135, 1996.
      add_authors(b, r, rng, perturb, format);
      b.end('.');
      add_title(b, r);
      b.end('.');
      add_words(b, r.journal, TokenLabel::Source);
      b.glue(",", TokenLabel::Other);
      b.add(r.volume, TokenLabel::Other);
      b.glue("(", TokenLabel::Other);
      b.glue(r.issue, TokenLabel::Other);
      b.glue(")", TokenLabel::Other);
      if (r.pages) {
        b.glue(":", TokenLabel::Other);
        b.glue(r.first_page, TokenLabel::Pages);
        b.glue(dash, TokenLabel::Pages);
        b.glue(r.last_page, TokenLabel::Pages);
      }
      b.glue(",", TokenLabel::Other);
      b.add(r.year, TokenLabel::Year);
      b.end('.');
      break;
    case 1:  // Authors (1996). Title. Journal 12, 120-135.
      add_authors(b, r, rng, perturb, format);
      b.add("(", TokenLabel::Other);
      b.glue(r.year, TokenLabel::Year);
      b.glue(")", TokenLabel::Other);
      b.end('.');
      add_title(b, r);
      b.end('.');
      add_words(b, r.journal, TokenLabel::Source);
      b.add(r.volume, TokenLabel::Other);
      if (r.pages) {
        b.glue(",", TokenLabel::Other);
        add_pages(b, r, dash);
      }
      b.end('.');
      break;
    case 2:  // Authors, "Title," Journal, vol. 12, no. 3, pp. 120-135, 1996.
      add_authors(b, r, rng, perturb, format);
      b.glue(",", TokenLabel::Other);
      b.add("\"", TokenLabel::Other);
      {
        bool first = true;
        for (const auto& w : split_words(r.title)) {
          const bool colon = w.back() == ':';
          b.add(colon ? w.substr(0, w.size() - 1) : w, TokenLabel::Title, !first);
          if (colon) b.glue(":", TokenLabel::Title);
          first = false;
        }
      }
      b.glue(",", TokenLabel::Other);
      b.glue("\"", TokenLabel::Other);
      add_words(b, r.journal, TokenLabel::Source);
      b.glue(",", TokenLabel::Other);
      b.add("vol", TokenLabel::Other);
      b.glue(".", TokenLabel::Other);
      b.add(r.volume, TokenLabel::Other);
      b.glue(",", TokenLabel::Other);
      b.add("no", TokenLabel::Other);
      b.glue(".", TokenLabel::Other);
      b.add(r.issue, TokenLabel::Other);
      if (r.pages) {
        b.glue(",", TokenLabel::Other);
        b.add("pp", TokenLabel::Other);
        b.glue(".", TokenLabel::Other);
        add_pages(b, r, dash);
      }
      b.glue(",", TokenLabel::Other);
      b.add(r.year, TokenLabel::Year);
      b.end('.');
      break;
    case 3:  // Authors: Title. In: Journal, pp. 120-135 (1996)
      add_authors(b, r, rng, perturb, format);
      b.glue(":", TokenLabel::Other);
      add_title(b, r);
      b.end('.');
      b.add("In", TokenLabel::Other);
      b.glue(":", TokenLabel::Other);
      add_words(b, r.journal, TokenLabel::Source);
      if (r.pages) {
        b.glue(",", TokenLabel::Other);
        b.add("pp", TokenLabel::Other);
        b.glue(".", TokenLabel::Other);
        add_pages(b, r, dash);
      }
      b.add("(", TokenLabel::Other);
      b.glue(r.year, TokenLabel::Year);
      b.glue(")", TokenLabel::Other);
      break;
    case 4:  // Title. Authors. Journal, 1996, 120-135.
      add_title(b, r);
      b.end('.');
      add_authors(b, r, rng, perturb, format);
      b.end('.');
      add_words(b, r.journal, TokenLabel::Source);
      b.glue(",", TokenLabel::Other);
      b.add(r.year, TokenLabel::Year);
      if (r.pages) {
        b.glue(",", TokenLabel::Other);
        add_pages(b, r, dash);
      }
      b.end('.');
      break;
    default:  // Authors. 1996. Title. Journal 12: 120-135.
      add_authors(b, r, rng, perturb, format);
      b.end('.');
      b.add(r.year, TokenLabel::Year);
      b.glue(".", TokenLabel::Other);
      add_title(b, r);
      b.end('.');
      add_words(b, r.journal, TokenLabel::Source);
      b.add(r.volume, TokenLabel::Other);
      if (r.pages) {
        b.glue(":", TokenLabel::Other);
        add_pages(b, r, dash);
      }
      b.end('.');
      break;
  }
  return b.finish(doc.id);
}

LabeledCitation render_two_template(const DocumentRecord& doc, const Rendering& r, Rng& rng) {
  Builder b;
  if (chance(rng, 0.5)) {
    add_authors(b, r, rng, false, 2);
    b.glue(":", TokenLabel::Other);
    add_title(b, r);
    b.end('.');
    add_words(b, r.journal, TokenLabel::Source);
    b.glue(",", TokenLabel::Other);
    b.add(r.year, TokenLabel::Year);
    b.end('.');
  } else {
    add_authors(b, r, rng, false, 3);
    b.add("(", TokenLabel::Other);
    b.glue(r.year, TokenLabel::Year);
    b.glue(")", TokenLabel::Other);
    add_title(b, r);
    b.end('.');
    add_words(b, r.journal, TokenLabel::Source);
    b.glue(",", TokenLabel::Other);
    add_pages(b, r, "-");
    b.end('.');
  }
  return b.finish(doc.id);
}

}  // namespace

std::string truncate_word(std::string_view word, std::size_t keep) {
  std::string out;
  std::size_t i = 0;
  for (std::size_t n = 0; n < keep && i < word.size(); ++n) i += unicode::decode_at(word, i).length;
  out.assign(word.substr(0, i));
  if (i < word.size()) out += '.';
  return out;
}

std::string drop_vowels(std::string_view word) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    const char c = word[i];
    if (i > 0 && std::string_view("aeiouAEIOU").find(c) != std::string_view::npos) continue;
    out += c;
  }
  return out;
}

std::vector<DocumentRecord> make_documents(std::size_t n, Rng& rng, std::string_view id_prefix) {
  std::vector<DocumentRecord> docs;
  docs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    DocumentRecord d;
    char id[32];
    std::snprintf(id, sizeof id, "%05zu", i);
    d.id = std::string(id_prefix) + id;
    const std::size_t authors = std::discrete_distribution<std::size_t>({0, 3, 4, 3, 2})(rng);
    for (std::size_t a = 0; a < authors; ++a) {
      d.authors.push_back(std::string(pick(kFirstNames, rng)) + " " + make_surname(rng));
    }
    const std::size_t words = uniform(rng, 4, 10);
    std::string title;
    for (std::size_t w = 0; w < words; ++w) {
      std::string word(w > 0 && w + 1 < words && chance(rng, 0.2) ? pick(kTitleGlue, rng)
                                                                  : pick(kTitleWords, rng));
      if (w == 0) word = capitalize(word);
      if (w == 1 && words > 5 && chance(rng, 0.1)) word += ':';
      title += (title.empty() ? "" : " ") + word;
    }
    d.title = title;
    d.journal = std::string(pick(kJournalHeads, rng)) + " " +
                (chance(rng, 0.6) ? std::string(pick(kJournalQualifiers, rng)) + " " : "") +
                std::string(pick(kJournalTopics, rng));
    d.year = static_cast<std::int64_t>(uniform(rng, 1960, 2012));
    const std::size_t first = uniform(rng, 1, 1800);
    d.pages = {static_cast<std::int64_t>(first), static_cast<std::int64_t>(first + uniform(rng, 2, 40))};
    docs.push_back(std::move(d));
  }
  return docs;
}

LabeledCitation render(const DocumentRecord& doc, Rng& rng, const RenderOptions& options) {
  Rendering r;
  r.authors = doc.authors;
  r.title = doc.title;
  r.journal = doc.journal;
  r.year = doc.year ? std::to_string(*doc.year) : "";
  if (doc.pages.size() >= 2) {
    r.first_page = std::to_string(*doc.pages.begin());
    r.last_page = std::to_string(*doc.pages.rbegin());
  } else {
    r.pages = false;
  }
  r.volume = std::to_string(uniform(rng, 1, 60));
  r.issue = std::to_string(uniform(rng, 1, 12));
  if (options.style == Style::TwoTemplate) return render_two_template(doc, r, rng);

  if (options.perturb) {
    if (chance(rng, 0.6)) r.journal = abbreviate_journal(r.journal, rng);
    if (chance(rng, 0.3)) {
      auto words = split_words(r.title);
      std::vector<std::size_t> longer;
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i].size() >= 4) longer.push_back(i);
      }
      if (!longer.empty()) {
        auto& w = words[longer[uniform(rng, 0, longer.size() - 1)]];
        w = typo(w, rng);
        r.title.clear();
        for (const auto& x : words) r.title += (r.title.empty() ? "" : " ") + x;
      }
    }
    if (chance(rng, 0.2)) r.title = unicode::to_lower(r.title);
    if (chance(rng, 0.15)) r.pages = false;
  }
  if (r.year.empty()) r.year = "n.d";
  return render_varied(doc, std::move(r), rng, options.perturb);
}

CitationCorpus make_citation_corpus(std::size_t documents, std::size_t refs_min,
                                    std::size_t refs_max, std::uint64_t seed,
                                    const RenderOptions& options) {
  if (documents < 2) throw UsageError("a citing corpus needs at least two documents");
  if (refs_min > refs_max) throw UsageError("refs_min exceeds refs_max");
  Rng rng(seed);
  CitationCorpus out;
  out.documents = make_documents(documents, rng);
  for (std::size_t cited = 0; cited < documents; ++cited) {
    const std::size_t copies = uniform(rng, refs_min, refs_max);
    for (std::size_t k = 0; k < copies; ++k) {
      auto citation = render(out.documents[cited], rng, options);
      std::size_t citing = uniform(rng, 0, documents - 2);
      if (citing >= cited) ++citing;
      auto& refs = out.documents[citing].references;
      out.placement.emplace_back(citing, refs.size());
      refs.emplace_back(citation.text);
      out.citations.push_back(std::move(citation));
    }
  }
  return out;
}

}  // namespace citematch::synth
