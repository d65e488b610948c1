#pragma once

// Shared fixtures for the test suite: deterministic random generators for
// graphs and products, and independent brute-force oracles that the library
// implementations are compared against. Everything here is deliberately
// written the slow, obvious way - the value of an oracle is that it cannot
// share a bug with the code under test.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "crsched/analysis.hpp"
#include "crsched/graph.hpp"
#include "crsched/rational.hpp"

namespace crsched::testing {

inline std::string data_dir() {
#ifdef CRSCHED_DATA_DIR
  return CRSCHED_DATA_DIR;
#else
  return "data";
#endif
}

inline std::string data_file(const std::string& rel) { return data_dir() + "/" + rel; }

// ---------------------------------------------------------------------------
// Random structures

// A random multigraph with n <= max_nodes nodes and m <= max_edges edges.
// Self-loops and parallel edges are allowed on purpose.
inline MultiGraph random_multigraph(std::mt19937& rng, int max_nodes, int max_edges) {
  MultiGraph g;
  g.n = std::uniform_int_distribution<int>(1, max_nodes)(rng);
  const int m = std::uniform_int_distribution<int>(0, max_edges)(rng);
  std::uniform_int_distribution<int> node(0, g.n - 1);
  for (int e = 0; e < m; ++e) g.add_edge(node(rng), node(rng));
  return g;
}

inline std::vector<std::int64_t> random_weights(std::mt19937& rng, int m, std::int64_t lo,
                                                std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> w(lo, hi);
  std::vector<std::int64_t> out(m);
  for (auto& x : out) x = w(rng);
  return out;
}

// A synthetic product graph over a random multigraph: dimension-0 weights on
// both sides drawn from [0, 9], X/Y node marks drawn independently. The
// bookkeeping fields (inputs, outputs, tuples) are filled with neutral
// values; the solvers only look at the graph, the marks and the weights.
inline ProductGraph random_product(std::mt19937& rng, int max_nodes, int max_edges) {
  ProductGraph pg;
  pg.g = random_multigraph(rng, max_nodes, max_edges);
  pg.start = 0;
  pg.wa.push_back(random_weights(rng, pg.g.m(), 0, 9));
  pg.wc.push_back(random_weights(rng, pg.g.m(), 0, 9));
  pg.x.assign(pg.g.n, 0);
  pg.y.assign(pg.g.n, 0);
  std::bernoulli_distribution mark_x(0.15), mark_y(0.7);
  for (int v = 0; v < pg.g.n; ++v) {
    if (v != pg.start && mark_x(rng)) pg.x[v] = 1;
    pg.y[v] = mark_y(rng) ? 1 : 0;
  }
  pg.input.assign(pg.g.m(), 0);
  pg.output.assign(pg.g.m(), kNoOutput);
  pg.tuple.assign(pg.g.n, {});
  pg.num_tasks = 1;
  pg.d_max = 1;
  return pg;
}

// ---------------------------------------------------------------------------
// Brute-force oracles

// Every simple cycle of the multigraph restricted to `alive` nodes, as edge
// id sequences. A simple cycle repeats no node; parallel edges yield
// distinct cycles. Each cycle is anchored at its smallest node, so each is
// produced exactly once. Only safe for tiny graphs.
inline std::vector<std::vector<int>> enumerate_simple_cycles(const MultiGraph& g,
                                                             const NodeMask& alive) {
  std::vector<std::vector<int>> out_edges(g.n);
  for (int e = 0; e < g.m(); ++e) out_edges[g.efrom[e]].push_back(e);

  std::vector<std::vector<int>> cycles;
  std::vector<int> path;
  std::vector<char> visited(g.n, 0);

  auto dfs = [&](auto&& self, int anchor, int u) -> void {
    for (int e : out_edges[u]) {
      const int v = g.eto[e];
      if (!alive.empty() && !alive[v]) continue;
      if (v == anchor) {
        path.push_back(e);
        cycles.push_back(path);
        path.pop_back();
      } else if (v > anchor && !visited[v]) {
        visited[v] = 1;
        path.push_back(e);
        self(self, anchor, v);
        path.pop_back();
        visited[v] = 0;
      }
    }
  };

  for (int anchor = 0; anchor < g.n; ++anchor) {
    if (!alive.empty() && !alive[anchor]) continue;
    dfs(dfs, anchor, anchor);
  }
  return cycles;
}

// Oracle for min_mean_cycle: minimum of sum(w)/len over all simple cycles
// (non-simple cycles never beat the best simple one).
inline std::optional<Rational> brute_min_mean(const MultiGraph& g,
                                              const std::vector<std::int64_t>& w,
                                              const NodeMask& alive) {
  std::optional<Rational> best;
  for (const auto& cyc : enumerate_simple_cycles(g, alive)) {
    std::int64_t sum = 0;
    for (int e : cyc) sum += w[e];
    const Rational mean = make_rational(sum, static_cast<std::int64_t>(cyc.size()));
    if (!best || mean < *best) best = mean;
  }
  return best;
}

// Node-to-node reachability closure; reach[u][v] says a non-empty path
// u -> v exists through alive nodes.
inline std::vector<std::vector<char>> reachability(const MultiGraph& g, const NodeMask& alive) {
  std::vector<std::vector<char>> reach(g.n, std::vector<char>(g.n, 0));
  for (int e = 0; e < g.m(); ++e) {
    const int u = g.efrom[e], v = g.eto[e];
    if (alive.empty() || (alive[u] && alive[v])) reach[u][v] = 1;
  }
  for (int k = 0; k < g.n; ++k)
    for (int u = 0; u < g.n; ++u)
      if (reach[u][k])
        for (int v = 0; v < g.n; ++v)
          if (reach[k][v]) reach[u][v] = 1;
  return reach;
}

}  // namespace crsched::testing
