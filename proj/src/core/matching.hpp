#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace mcsched {

struct BipartiteGraph {
  int left_count = 0;
  int right_count = 0;
  std::vector<std::vector<int>> adj;                    // left -> right neighbours
  std::vector<std::vector<std::int64_t>> edge_weights;  // parallel to adj when used
  std::vector<std::int64_t> left_weights;               // per-left-vertex when used

  BipartiteGraph() = default;
  BipartiteGraph(int nl, int nr) : left_count(nl), right_count(nr), adj(nl) {}

  void add_edge(int l, int r) { adj[l].push_back(r); }
  void add_edge(int l, int r, std::int64_t w) {
    if (edge_weights.empty()) edge_weights.resize(left_count);
    adj[l].push_back(r);
    edge_weights[l].push_back(w);
  }
};

struct Matching {
  std::vector<int> left_to_right;  // -1 = unmatched
  std::vector<int> right_to_left;

  int cardinality() const {
    int c = 0;
    for (int r : left_to_right) c += (r >= 0);
    return c;
  }
  std::vector<std::pair<int, int>> pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int l = 0; l < static_cast<int>(left_to_right.size()); ++l)
      if (left_to_right[l] >= 0) out.emplace_back(l, left_to_right[l]);
    return out;
  }
};

// Hopcroft-Karp
Matching max_cardinality_matching(const BipartiteGraph& g);

// requires left_count == right_count
bool has_perfect_matching(const BipartiteGraph& g);

// Maximum vertex-weighted matching over the left weights. Left vertices are
// processed in descending weight order and matched via augmenting paths, which
// never unmatch an already-saturated vertex; hence for every k, if the k
// heaviest left vertices are simultaneously saturable, the result saturates
// them. Requires left_weights (distinct values give a deterministic result).
Matching max_vertex_weight_matching(const BipartiteGraph& g);

// Maximum total edge weight (assignment on the padded square problem).
// Requires edge_weights, all nonnegative. Zero-weight edges may be left out
// of the result; the total weight is still maximal.
Matching max_edge_weight_matching(const BipartiteGraph& g);

// Incremental saturability: processes left vertices 0,1,2,... in order and
// returns the largest k such that vertices 0..k-1 are simultaneously
// saturable. Saturability of a prefix is monotone, so this is exact.
int max_saturable_prefix(const BipartiteGraph& g);

}  // namespace mcsched
