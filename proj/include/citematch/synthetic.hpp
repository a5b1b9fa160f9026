#pragma once

// Synthetic bibliographic data: document metadata, citation strings rendered
// from it with token-level gold labels, and whole citing corpora.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citematch/labeled.hpp"
#include "citematch/records.hpp"

namespace citematch::synth {

using Rng = std::mt19937_64;

std::vector<DocumentRecord> make_documents(std::size_t n, Rng& rng, std::string_view id_prefix = "doc");

enum class Style {
  Varied,       // six field layouts, author name formats, optional pages
  TwoTemplate,  // "A. Name: Title. Journal, year." and "Name, A. (year) Title. Journal, pages."
};

struct RenderOptions {
  Style style = Style::Varied;
  // Journal abbreviation, typos, lowercased titles, "et al." truncation.
  bool perturb = true;
};

// The cluster of the result is the document id.
LabeledCitation render(const DocumentRecord& doc, Rng& rng, const RenderOptions& options = {});

// "Applied", 4 -> "Appl."
std::string truncate_word(std::string_view word, std::size_t keep);
// Keeps the first character and drops later vowels: "Journal" -> "Jrnl".
std::string drop_vowels(std::string_view word);

struct CitationCorpus {
  std::vector<DocumentRecord> documents;
  // Every rendered citation; cluster = cited document id.
  std::vector<LabeledCitation> citations;
  // (citing document index, reference index) of each citation.
  std::vector<std::pair<std::size_t, std::size_t>> placement;
};

// Renders every document between refs_min and refs_max times and files each
// rendering under the references of some other document.
CitationCorpus make_citation_corpus(std::size_t documents, std::size_t refs_min,
                                    std::size_t refs_max, std::uint64_t seed,
                                    const RenderOptions& options = {});

}  // namespace citematch::synth
