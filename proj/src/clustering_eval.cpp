#include "citematch/clustering_eval.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "citematch/error.hpp"

namespace citematch {

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

std::size_t UnionFind::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  return true;
}

std::vector<std::vector<std::size_t>> Clustering::clusters() const {
  std::map<std::size_t, std::vector<std::size_t>> by_id;
  for (std::size_t i = 0; i < assignment.size(); ++i) by_id[assignment[i]].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(by_id.size());
  for (auto& [id, members] : by_id) out.push_back(std::move(members));
  return out;
}

Clustering Clustering::from_labels(std::span<const std::size_t> labels) {
  std::map<std::size_t, std::size_t> first;
  Clustering c;
  c.assignment.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = first.emplace(labels[i], i);
    c.assignment[i] = it->second;
  }
  return c;
}

Clustering single_link(std::size_t n, std::span<const Edge> edges) {
  UnionFind uf(n);
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) {
      throw UsageError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                       ") out of range for " + std::to_string(n) + " items");
    }
    uf.unite(i, j);
  }
  std::vector<std::size_t> roots(n);
  for (std::size_t i = 0; i < n; ++i) roots[i] = uf.find(i);
  return Clustering::from_labels(roots);
}

double cluster_recall(const Clustering& gold, const Clustering& predicted) {
  if (gold.size() != predicted.size()) throw UsageError("clusterings cover different item counts");
  const auto gold_clusters = gold.clusters();
  if (gold_clusters.empty()) return 1.0;
  std::size_t recovered = 0;
  for (const auto& members : gold_clusters) {
    // Same id and same size means the predicted cluster is exactly this set.
    const std::size_t id = predicted.assignment[members.front()];
    const bool same_ids = std::all_of(members.begin(), members.end(), [&](std::size_t i) {
      return predicted.assignment[i] == id;
    });
    const auto predicted_size = static_cast<std::size_t>(
        std::count(predicted.assignment.begin(), predicted.assignment.end(), id));
    if (same_ids && predicted_size == members.size()) ++recovered;
  }
  return static_cast<double>(recovered) / static_cast<double>(gold_clusters.size());
}

PairwiseMetrics pairwise_metrics(const Clustering& gold, const Clustering& predicted) {
  if (gold.size() != predicted.size()) throw UsageError("clusterings cover different item counts");
  auto links = [](const Clustering& c) {
    std::map<std::size_t, std::size_t> sizes;
    for (auto id : c.assignment) ++sizes[id];
    std::size_t total = 0;
    for (const auto& [id, s] : sizes) total += s * (s - 1) / 2;
    return total;
  };
  // Correct links: pairs sharing both clusters.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> cells;
  for (std::size_t i = 0; i < gold.size(); ++i) ++cells[{gold.assignment[i], predicted.assignment[i]}];
  std::size_t correct = 0;
  for (const auto& [key, s] : cells) correct += s * (s - 1) / 2;

  const std::size_t gold_links = links(gold);
  const std::size_t predicted_links = links(predicted);
  PairwiseMetrics m;
  m.precision = predicted_links == 0 ? 1.0
                                     : static_cast<double>(correct) / static_cast<double>(predicted_links);
  m.recall = gold_links == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(gold_links);
  m.f1 = m.precision + m.recall == 0 ? 0.0 : 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

NamedClustering read_clustering(std::istream& in) {
  std::map<std::string, std::string> cluster_of;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError("clustering line " + std::to_string(lineno) + ": expected item<TAB>cluster");
    }
    auto [it, inserted] = cluster_of.emplace(line.substr(0, tab), line.substr(tab + 1));
    if (!inserted) {
      throw DataError("clustering line " + std::to_string(lineno) + ": item '" + it->first +
                      "' assigned twice");
    }
  }
  NamedClustering out;
  std::map<std::string, std::size_t> label_ids;
  std::vector<std::size_t> labels;
  for (const auto& [item, cluster] : cluster_of) {
    out.items.push_back(item);
    labels.push_back(label_ids.emplace(cluster, label_ids.size()).first->second);
  }
  out.clustering = Clustering::from_labels(labels);
  return out;
}

void write_clustering(std::ostream& out, const NamedClustering& c) {
  for (std::size_t i = 0; i < c.items.size(); ++i) {
    out << c.items[i] << '\t' << c.items[c.clustering.assignment[i]] << '\n';
  }
}

Clustering align_to(const NamedClustering& gold, const NamedClustering& predicted) {
  std::map<std::string, std::size_t> predicted_index;
  for (std::size_t i = 0; i < predicted.items.size(); ++i) predicted_index[predicted.items[i]] = i;
  // Labels: predicted cluster id (offset past singletons) or a fresh id.
  std::vector<std::size_t> labels(gold.items.size());
  const std::size_t fresh_base = predicted.items.size();
  for (std::size_t i = 0; i < gold.items.size(); ++i) {
    auto it = predicted_index.find(gold.items[i]);
    labels[i] = it == predicted_index.end() ? fresh_base + i
                                            : predicted.clustering.assignment[it->second];
  }
  return Clustering::from_labels(labels);
}

}  // namespace citematch
