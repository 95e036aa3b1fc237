#include "matching.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace mcsched {

namespace {

// Kuhn augmenting DFS
bool try_augment(const BipartiteGraph& g, int l, std::vector<int>& l2r,
                 std::vector<int>& r2l, std::vector<char>& visited) {
  for (int r : g.adj[l]) {
    if (visited[r]) continue;
    visited[r] = 1;
    if (r2l[r] < 0 || try_augment(g, r2l[r], l2r, r2l, visited)) {
      l2r[l] = r;
      r2l[r] = l;
      return true;
    }
  }
  return false;
}

}  // namespace

Matching max_cardinality_matching(const BipartiteGraph& g) {
  const int nl = g.left_count, nr = g.right_count;
  std::vector<int> l2r(nl, -1), r2l(nr, -1), dist(nl);
  const int INF = std::numeric_limits<int>::max();

  auto bfs = [&]() {
    std::queue<int> q;
    for (int l = 0; l < nl; ++l) {
      if (l2r[l] < 0) {
        dist[l] = 0;
        q.push(l);
      } else {
        dist[l] = INF;
      }
    }
    bool found = false;
    while (!q.empty()) {
      int l = q.front();
      q.pop();
      for (int r : g.adj[l]) {
        int l2 = r2l[r];
        if (l2 < 0) {
          found = true;
        } else if (dist[l2] == INF) {
          dist[l2] = dist[l] + 1;
          q.push(l2);
        }
      }
    }
    return found;
  };

  std::function<bool(int)> dfs = [&](int l) {
    for (int r : g.adj[l]) {
      int l2 = r2l[r];
      if (l2 < 0 || (dist[l2] == dist[l] + 1 && dfs(l2))) {
        l2r[l] = r;
        r2l[r] = l;
        return true;
      }
    }
    dist[l] = INF;
    return false;
  };

  while (bfs()) {
    for (int l = 0; l < nl; ++l)
      if (l2r[l] < 0) dfs(l);
  }
  return Matching{std::move(l2r), std::move(r2l)};
}

bool has_perfect_matching(const BipartiteGraph& g) {
  if (g.left_count != g.right_count)
    throw std::invalid_argument("has_perfect_matching: sides must be equal");
  return max_cardinality_matching(g).cardinality() == g.left_count;
}

Matching max_vertex_weight_matching(const BipartiteGraph& g) {
  if (static_cast<int>(g.left_weights.size()) != g.left_count)
    throw std::invalid_argument("max_vertex_weight_matching: left weights required");
  std::vector<int> order(g.left_count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (g.left_weights[a] != g.left_weights[b])
      return g.left_weights[a] > g.left_weights[b];
    return a < b;
  });

  // The saturable left-subsets form a transversal matroid, so the optimal
  // vertex set is the weight-descending greedy one: position k is taken
  // exactly when the matchable rank of the top-k prefix exceeds that of the
  // top-(k-1) prefix. Ranks come from Hopcroft-Karp runs on prefixes;
  // divide-and-conquer skips every interval whose endpoint ranks already
  // determine all increments, so dense graphs need only a few runs.
  auto rank_of_prefix = [&](int k) {
    BipartiteGraph sub(k, g.right_count);
    for (int i = 0; i < k; ++i) sub.adj[i] = g.adj[order[i]];
    return max_cardinality_matching(sub).cardinality();
  };

  std::vector<char> take(g.left_count, 0);
  std::function<void(int, int, int, int)> mark = [&](int lo, int hi, int rlo,
                                                     int rhi) {
    if (lo >= hi || rhi == rlo) return;
    if (rhi - rlo == hi - lo) {
      for (int i = lo; i < hi; ++i) take[i] = 1;
      return;
    }
    const int mid = lo + (hi - lo) / 2;
    const int rm = rank_of_prefix(mid);
    mark(lo, mid, rlo, rm);
    mark(mid, hi, rm, rhi);
  };
  const int total_rank = g.left_count > 0 ? rank_of_prefix(g.left_count) : 0;
  mark(0, g.left_count, 0, total_rank);

  // a max-cardinality matching on the greedy set saturates it entirely
  std::vector<int> chosen;
  chosen.reserve(total_rank);
  for (int i = 0; i < g.left_count; ++i)
    if (take[i]) chosen.push_back(order[i]);
  BipartiteGraph sub(static_cast<int>(chosen.size()), g.right_count);
  for (std::size_t i = 0; i < chosen.size(); ++i) sub.adj[i] = g.adj[chosen[i]];
  const Matching inner = max_cardinality_matching(sub);

  std::vector<int> l2r(g.left_count, -1), r2l(g.right_count, -1);
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const int r = inner.left_to_right[i];
    if (r < 0) continue;
    l2r[chosen[i]] = r;
    r2l[r] = chosen[i];
  }
  return Matching{std::move(l2r), std::move(r2l)};
}

int max_saturable_prefix(const BipartiteGraph& g) {
  std::vector<int> l2r(g.left_count, -1), r2l(g.right_count, -1);
  std::vector<char> visited(g.right_count);
  for (int l = 0; l < g.left_count; ++l) {
    std::fill(visited.begin(), visited.end(), 0);
    if (!try_augment(g, l, l2r, r2l, visited)) return l;
  }
  return g.left_count;
}

Matching max_edge_weight_matching(const BipartiteGraph& g) {
  if (g.edge_weights.empty()) {
    // legal only when the graph has no edges at all
    for (const auto& nbrs : g.adj)
      if (!nbrs.empty())
        throw std::invalid_argument("max_edge_weight_matching: edge weights required");
  } else {
    for (int l = 0; l < g.left_count; ++l)
      for (std::int64_t w : g.edge_weights[l])
        if (w < 0)
          throw std::invalid_argument("max_edge_weight_matching: negative weight");
  }

  Matching m;
  m.left_to_right.assign(g.left_count, -1);
  m.right_to_left.assign(g.right_count, -1);
  if (g.left_count == 0 || g.right_count == 0) return m;

  // orient so rows is the smaller side
  const bool transposed = g.left_count > g.right_count;
  const int rows = transposed ? g.right_count : g.left_count;
  const int cols = std::max(transposed ? g.left_count : g.right_count, rows);

  // dense profit matrix; non-edges and padding contribute 0
  std::vector<std::int64_t> profit(static_cast<std::size_t>(rows) * cols, 0);
  for (int l = 0; l < g.left_count; ++l) {
    for (std::size_t e = 0; e < g.adj[l].size(); ++e) {
      int r = g.adj[l][e];
      std::int64_t w = g.edge_weights[l][e];
      int row = transposed ? r : l;
      int col = transposed ? l : r;
      auto& cell = profit[static_cast<std::size_t>(row) * cols + col];
      cell = std::max(cell, w);
    }
  }

  // Jonker-Volgenant style potentials on cost = -profit (1-based arrays)
  const std::int64_t INF = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(rows + 1, 0), v(cols + 1, 0), minv(cols + 1);
  std::vector<int> p(cols + 1, 0), way(cols + 1, 0);
  std::vector<char> used(cols + 1);
  for (int i = 1; i <= rows; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), INF);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      std::int64_t delta = INF;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        std::int64_t cur =
            -profit[static_cast<std::size_t>(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  for (int j = 1; j <= cols; ++j) {
    int i = p[j];
    if (i == 0) continue;
    int row = i - 1, col = j - 1;
    if (profit[static_cast<std::size_t>(row) * cols + col] <= 0) continue;
    int l = transposed ? col : row;
    int r = transposed ? row : col;
    m.left_to_right[l] = r;
    m.right_to_left[r] = l;
  }
  return m;
}

}  // namespace mcsched
