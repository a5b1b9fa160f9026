#include <doctest.h>

#include <random>
#include <sstream>

#include "citematch/clustering_eval.hpp"
#include "citematch/error.hpp"
#include "oracles.hpp"

using namespace citematch;
using doctest::Approx;
using Groups = std::vector<std::vector<std::size_t>>;

namespace {

Clustering labels(std::vector<std::size_t> l) { return Clustering::from_labels(l); }

}  // namespace

TEST_CASE("single link examples") {
  const std::vector<Edge> e1 = {{0, 1}};
  CHECK(single_link(3, e1).clusters() == Groups{{0, 1}, {2}});
  const std::vector<Edge> e2 = {{0, 1}, {1, 2}};
  CHECK(single_link(4, e2).clusters() == Groups{{0, 1, 2}, {3}});
  CHECK(single_link(0, {}).size() == 0);
  CHECK(single_link(2, {}).clusters() == Groups{{0}, {1}});
  const std::vector<Edge> self = {{1, 1}};
  CHECK(single_link(2, self).clusters() == Groups{{0}, {1}});
  const std::vector<Edge> bad = {{0, 3}};
  CHECK_THROWS_AS(single_link(3, bad), UsageError);
}

TEST_CASE("single link equals breadth-first reachability") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 500; ++t) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    const auto m = std::uniform_int_distribution<std::size_t>(0, 2 * n)(rng);
    std::uniform_int_distribution<std::size_t> node(0, n - 1);
    std::vector<Edge> edges(m);
    for (auto& e : edges) e = {node(rng), node(rng)};
    CHECK(single_link(n, edges).assignment == oracle::bfs_components(n, edges));
  }
}

TEST_CASE("canonical labels") {
  const auto c = labels({7, 3, 7, 9});
  CHECK(c.assignment == std::vector<std::size_t>{0, 1, 0, 3});
  CHECK(c.clusters() == Groups{{0, 2}, {1}, {3}});
}

TEST_CASE("cluster recall") {
  const auto gold = labels({0, 0, 2});
  CHECK(cluster_recall(gold, gold) == 1.0);
  CHECK(cluster_recall(gold, labels({0, 1, 2})) == Approx(0.5));
  CHECK(cluster_recall(labels({0, 1, 2, 3}), labels({0, 0, 0, 0})) == 0.0);
  CHECK(cluster_recall(labels({0, 0, 0}), labels({0, 0, 1})) == 0.0);
  CHECK_THROWS_AS(cluster_recall(gold, labels({0, 1})), UsageError);
}

TEST_CASE("pairwise metrics") {
  const auto gold = labels({0, 0, 0});
  const auto m = pairwise_metrics(gold, gold);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);

  const auto partial = pairwise_metrics(gold, labels({0, 0, 2}));
  CHECK(partial.precision == 1.0);
  CHECK(partial.recall == Approx(1.0 / 3));
  CHECK(partial.f1 == Approx(0.5));

  const auto singletons = pairwise_metrics(gold, labels({0, 1, 2}));
  CHECK(singletons.precision == 1.0);  // no predicted links
  CHECK(singletons.recall == 0.0);

  const auto nothing = pairwise_metrics(labels({0, 1}), labels({0, 1}));
  CHECK(nothing.precision == 1.0);
  CHECK(nothing.recall == 1.0);
  CHECK(nothing.f1 == 1.0);

  const auto wrong = pairwise_metrics(labels({0, 0, 2, 2}), labels({0, 1, 0, 1}));
  CHECK(wrong.precision == 0.0);
  CHECK(wrong.recall == 0.0);
  CHECK(wrong.f1 == 0.0);
}

TEST_CASE("pairwise metrics equal link counting") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 300; ++t) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 15)(rng);
    std::uniform_int_distribution<std::size_t> lab(0, std::uniform_int_distribution<std::size_t>(0, n)(rng));
    std::vector<std::size_t> g(n), p(n);
    for (auto& x : g) x = lab(rng);
    for (auto& x : p) x = lab(rng);
    const auto c = oracle::link_counts(g, p);
    const auto m = pairwise_metrics(labels(g), labels(p));
    const double prec = c.predicted ? double(c.both) / double(c.predicted) : 1.0;
    const double rec = c.gold ? double(c.both) / double(c.gold) : 1.0;
    CHECK(m.precision == Approx(prec));
    CHECK(m.recall == Approx(rec));
    CHECK(m.f1 == Approx(prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0));
    // Swapping roles swaps precision and recall.
    const auto swapped = pairwise_metrics(labels(p), labels(g));
    CHECK(swapped.precision == Approx(m.recall));
    CHECK(swapped.recall == Approx(m.precision));
    // A clustering compared with itself is perfect.
    CHECK(cluster_recall(labels(g), labels(g)) == 1.0);
  }
}

TEST_CASE("clustering files") {
  std::istringstream in("b\tx\na\tx\nc\ty\n\n");
  const auto named = read_clustering(in);
  CHECK(named.items == std::vector<std::string>{"a", "b", "c"});
  CHECK(named.clustering.clusters() == Groups{{0, 1}, {2}});

  std::stringstream out;
  write_clustering(out, named);
  const auto again = read_clustering(out);
  CHECK(again.items == named.items);
  CHECK(again.clustering == named.clustering);

  std::istringstream bad("a x\n");
  CHECK_THROWS_AS(read_clustering(bad), DataError);
  std::istringstream dup("a\tx\na\ty\n");
  CHECK_THROWS_AS(read_clustering(dup), DataError);
}

TEST_CASE("align predictions onto the gold items") {
  std::istringstream g("a\t1\nb\t1\nc\t2\n");
  std::istringstream p("a\tk\nc\tk\nz\tk\n");
  const auto gold = read_clustering(g);
  const auto aligned = align_to(gold, read_clustering(p));
  // b is missing from the prediction and becomes a singleton; z is dropped.
  CHECK(aligned.clusters() == Groups{{0, 2}, {1}});
}
