#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "citematch/reference_parser.hpp"

namespace citematch {

// A citation string with one gold label per token of tokenize(text) and an
// optional cluster id naming the publication it cites.
struct LabeledCitation {
  std::string text;
  std::vector<TokenLabel> labels;
  std::string cluster;

  LabeledSequence sequence() const;
};

// JSON lines: {"text": ..., "labels": [...], "cluster": ...}. The label count
// must equal the token count.
std::vector<LabeledCitation> read_labeled_citations(std::istream& in);
void write_labeled_citations(std::ostream& out, std::span<const LabeledCitation> items);

}  // namespace citematch
