#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace citematch {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n);

  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

// Item i belongs to cluster assignment[i]; cluster ids are the smallest member
// item id.
struct Clustering {
  std::vector<std::size_t> assignment;

  std::size_t size() const { return assignment.size(); }
  // Members of every cluster, clusters ordered by id, members ascending.
  std::vector<std::vector<std::size_t>> clusters() const;
  // Canonicalises arbitrary labels into smallest-member ids.
  static Clustering from_labels(std::span<const std::size_t> labels);

  bool operator==(const Clustering&) const = default;
};

using Edge = std::pair<std::size_t, std::size_t>;

// Connected components of the thresholded similarity graph.
Clustering single_link(std::size_t n, std::span<const Edge> edges);

double cluster_recall(const Clustering& gold, const Clustering& predicted);

struct PairwiseMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Links are co-membership pairs. With no predicted links precision is 1; with
// no gold links recall is 1; f1 is 0 when both are 0.
PairwiseMetrics pairwise_metrics(const Clustering& gold, const Clustering& predicted);

// Item-id TAB cluster-id text files. Item ids are arbitrary strings.
struct NamedClustering {
  std::vector<std::string> items;  // sorted
  Clustering clustering;
};

NamedClustering read_clustering(std::istream& in);
void write_clustering(std::ostream& out, const NamedClustering& c);

// Aligns `predicted` onto the item set of `gold`; items missing from the
// prediction become singletons, extra items are ignored.
Clustering align_to(const NamedClustering& gold, const NamedClustering& predicted);

}  // namespace citematch
