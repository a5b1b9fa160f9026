#include "citematch/labeled.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "citematch/error.hpp"

namespace citematch {

LabeledSequence LabeledCitation::sequence() const {
  LabeledSequence seq{tokenize(text), labels};
  if (seq.tokens.size() != seq.labels.size()) {
    throw DataError("labeled citation has " + std::to_string(seq.labels.size()) +
                    " labels for " + std::to_string(seq.tokens.size()) + " tokens: " + text);
  }
  return seq;
}

std::vector<LabeledCitation> read_labeled_citations(std::istream& in) {
  std::vector<LabeledCitation> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "labeled citations line " + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j.contains("labels")) {
      throw DataError(where + ": expected an object with 'text' and 'labels'");
    }
    LabeledCitation c;
    try {
      c.text = j["text"].get<std::string>();
      for (const auto& l : j["labels"]) {
        const auto label = parse_label(l.get<std::string>());
        if (!label) throw DataError("unknown label '" + l.get<std::string>() + "'");
        c.labels.push_back(*label);
      }
      if (j.contains("cluster")) {
        c.cluster = j["cluster"].is_string() ? j["cluster"].get<std::string>() : j["cluster"].dump();
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (tokenize(c.text).size() != c.labels.size()) {
      throw DataError(where + ": label count does not match token count");
    }
    out.push_back(std::move(c));
  }
  return out;
}

void write_labeled_citations(std::ostream& out, std::span<const LabeledCitation> items) {
  for (const auto& c : items) {
    nlohmann::json j;
    j["text"] = c.text;
    j["labels"] = nlohmann::json::array();
    for (auto l : c.labels) j["labels"].push_back(to_string(l));
    if (!c.cluster.empty()) j["cluster"] = c.cluster;
    out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

}  // namespace citematch
