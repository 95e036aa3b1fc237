#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "core/matching.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using namespace mcsched;

namespace {

std::int64_t matching_edge_weight(const BipartiteGraph& g, const Matching& m) {
  std::int64_t total = 0;
  for (int l = 0; l < g.left_count; ++l) {
    if (m.left_to_right[l] < 0) continue;
    bool found = false;
    std::int64_t best = 0;
    for (std::size_t e = 0; e < g.adj[l].size(); ++e) {
      if (g.adj[l][e] == m.left_to_right[l]) {
        best = std::max(best, g.edge_weights[l][e]);
        found = true;
      }
    }
    REQUIRE(found);  // matched pair must be an edge
    total += best;
  }
  return total;
}

std::int64_t matching_vertex_weight(const BipartiteGraph& g, const Matching& m) {
  std::int64_t total = 0;
  for (int l = 0; l < g.left_count; ++l)
    if (m.left_to_right[l] >= 0) total += g.left_weights[l];
  return total;
}

void check_consistent(const BipartiteGraph& g, const Matching& m) {
  std::vector<int> seen_r(g.right_count, 0);
  for (int l = 0; l < g.left_count; ++l) {
    const int r = m.left_to_right[l];
    if (r < 0) continue;
    REQUIRE(r < g.right_count);
    REQUIRE(!seen_r[r]);
    seen_r[r] = 1;
    REQUIRE(m.right_to_left[r] == l);
  }
}

}  // namespace

TEST_CASE("max cardinality matches brute force on random graphs") {
  RngStream rng(42, 0, 7, 0);
  for (int trial = 0; trial < 400; ++trial) {
    const auto g = oracle::random_graph(rng, 6, 0.4, false);
    const auto m = max_cardinality_matching(g);
    check_consistent(g, m);
    CHECK(m.cardinality() == oracle::brute_force(g).cardinality);
  }
}

TEST_CASE("edge weight matching matches brute force") {
  RngStream rng(43, 0, 7, 0);
  for (int trial = 0; trial < 400; ++trial) {
    const auto g = oracle::random_graph(rng, 6, 0.5, true);
    const auto m = max_edge_weight_matching(g);
    check_consistent(g, m);
    CHECK(matching_edge_weight(g, m) == oracle::brute_force(g).edge_weight);
  }
}

TEST_CASE("vertex weight matching matches brute force") {
  RngStream rng(44, 0, 7, 0);
  for (int trial = 0; trial < 400; ++trial) {
    const auto g = oracle::random_graph(rng, 6, 0.5, true);
    const auto m = max_vertex_weight_matching(g);
    check_consistent(g, m);
    CHECK(matching_vertex_weight(g, m) == oracle::brute_force(g).vertex_weight);
  }
}

TEST_CASE("vertex weight matching saturates every saturable heaviest-k set") {
  RngStream rng(45, 0, 7, 0);
  for (int trial = 0; trial < 300; ++trial) {
    auto g = oracle::random_graph(rng, 6, 0.5, true);
    // distinct weights so the k heaviest vertices are unambiguous
    std::vector<std::int64_t> w(g.left_count);
    std::iota(w.begin(), w.end(), 1);
    for (int i = g.left_count - 1; i > 0; --i)
      std::swap(w[i], w[rng.next_u64() % (i + 1)]);
    g.left_weights = w;

    const auto m = max_vertex_weight_matching(g);
    check_consistent(g, m);

    std::vector<int> order(g.left_count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return w[a] > w[b]; });
    for (int k = 1; k <= g.left_count; ++k) {
      // saturable iff the subgraph on the k heaviest has a size-k matching
      BipartiteGraph sub(k, g.right_count);
      for (int i = 0; i < k; ++i) sub.adj[i] = g.adj[order[i]];
      if (max_cardinality_matching(sub).cardinality() != k) continue;
      for (int i = 0; i < k; ++i) CHECK(m.left_to_right[order[i]] >= 0);
    }
  }
}

TEST_CASE("perfect matching detection") {
  BipartiteGraph g(3, 3);
  g.add_edge(0, 0);
  g.add_edge(1, 1);
  g.add_edge(2, 2);
  CHECK(has_perfect_matching(g));

  BipartiteGraph h(3, 3);  // vertices 0 and 1 share the single neighbour 0
  h.add_edge(0, 0);
  h.add_edge(1, 0);
  h.add_edge(2, 1);
  CHECK(!has_perfect_matching(h));

  BipartiteGraph bad(2, 3);
  CHECK_THROWS_AS(has_perfect_matching(bad), std::invalid_argument);
}

TEST_CASE("max saturable prefix matches brute force") {
  RngStream rng(46, 0, 7, 0);
  for (int trial = 0; trial < 400; ++trial) {
    const auto g = oracle::random_graph(rng, 6, 0.4, false);
    CHECK(max_saturable_prefix(g) == oracle::brute_saturable_prefix(g));
  }
}

TEST_CASE("edge weight matching rejects negative weights") {
  BipartiteGraph g(1, 1);
  g.add_edge(0, 0, -3);
  CHECK_THROWS_AS(max_edge_weight_matching(g), std::invalid_argument);
}

TEST_CASE("empty graphs") {
  BipartiteGraph g(0, 0);
  CHECK(max_cardinality_matching(g).cardinality() == 0);
  CHECK(max_saturable_prefix(g) == 0);
  g.edge_weights.clear();
  CHECK(max_edge_weight_matching(g).cardinality() == 0);
}
