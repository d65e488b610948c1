#include "crsched/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <span>

#include "crsched/errors.hpp"
#include "crsched/lp.hpp"

namespace crsched {

namespace {

using int128 = __int128;

struct Csr {
  std::vector<int> offset, edge;  // edge ids grouped by a node key
  std::span<const int> at(int v) const {
    return {edge.data() + offset[v], edge.data() + offset[v + 1]};
  }
};

Csr build_csr(int n, const std::vector<int>& keys, int m) {
  Csr csr;
  csr.offset.assign(n + 1, 0);
  for (int e = 0; e < m; ++e) ++csr.offset[keys[e] + 1];
  for (int v = 0; v < n; ++v) csr.offset[v + 1] += csr.offset[v];
  csr.edge.resize(m);
  std::vector<int> cursor = csr.offset;
  for (int e = 0; e < m; ++e) csr.edge[cursor[keys[e]]++] = e;
  return csr;
}

NodeMask full_mask(int n) { return NodeMask(n, 1); }

}  // namespace

NodeMask prune_safety(const MultiGraph& g, const NodeMask& bad) {
  NodeMask alive(g.n, 1);
  for (int v = 0; v < g.n; ++v)
    if (v < static_cast<int>(bad.size()) && bad[v]) alive[v] = 0;

  const Csr in = build_csr(g.n, g.eto, g.m());
  std::vector<int> outdeg(g.n, 0);
  for (int e = 0; e < g.m(); ++e)
    if (alive[g.efrom[e]] && alive[g.eto[e]]) ++outdeg[g.efrom[e]];

  std::queue<int> dying;
  for (int v = 0; v < g.n; ++v)
    if (alive[v] && outdeg[v] == 0) dying.push(v);
  while (!dying.empty()) {
    const int v = dying.front();
    dying.pop();
    alive[v] = 0;
    for (int e : in.at(v)) {
      const int u = g.efrom[e];
      if (alive[u] && --outdeg[u] == 0) dying.push(u);
    }
  }
  return alive;
}

int scc_decompose(const MultiGraph& g, const NodeMask& alive_in, std::vector<int>& comp) {
  const NodeMask alive = alive_in.empty() ? full_mask(g.n) : alive_in;
  const Csr out = build_csr(g.n, g.efrom, g.m());
  comp.assign(g.n, -1);
  std::vector<int> low(g.n, 0), num(g.n, 0), stk;
  std::vector<char> on_stack(g.n, 0);
  int counter = 0, comps = 0;

  // Iterative Tarjan: frame = (node, next edge index within out.at(node)).
  std::vector<std::pair<int, std::size_t>> frames;
  for (int root = 0; root < g.n; ++root) {
    if (!alive[root] || num[root]) continue;
    frames.emplace_back(root, 0);
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next == 0) {
        num[v] = low[v] = ++counter;
        stk.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (next < out.at(v).size()) {
        const int e = out.at(v)[next++];
        const int w = g.eto[e];
        if (!alive[w]) continue;
        if (num[w] == 0) {
          frames.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], num[w]);
      }
      if (descended) continue;
      if (low[v] == num[v]) {
        while (true) {
          const int w = stk.back();
          stk.pop_back();
          on_stack[w] = 0;
          comp[w] = comps;
          if (w == v) break;
        }
        ++comps;
      }
      const int finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const int parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return comps;
}

std::vector<char> live_components(const MultiGraph& g, const std::vector<int>& comp,
                                  int num_comps, const NodeMask& accept) {
  std::vector<char> internal(num_comps, 0), meets(num_comps, 0), live(num_comps, 0);
  for (int e = 0; e < g.m(); ++e) {
    const int cu = comp[g.efrom[e]], cv = comp[g.eto[e]];
    if (cu >= 0 && cu == cv) internal[cu] = 1;
  }
  for (int v = 0; v < g.n; ++v)
    if (comp[v] >= 0 && v < static_cast<int>(accept.size()) && accept[v]) meets[comp[v]] = 1;
  for (int c = 0; c < num_comps; ++c) live[c] = internal[c] && meets[c];
  return live;
}

namespace {

// One strongly connected piece, re-indexed for the cycle routines.
struct Piece {
  std::vector<int> nodes;        // original node per local id
  std::vector<int> local;        // original -> local (-1 outside)
  std::vector<int> eid;          // original edge id per local edge
  std::vector<int> lfrom, lto;   // local endpoints
  Csr out;
};

Piece make_piece(const MultiGraph& g, const std::vector<int>& comp, int c) {
  Piece p;
  p.local.assign(g.n, -1);
  for (int v = 0; v < g.n; ++v)
    if (comp[v] == c) {
      p.local[v] = static_cast<int>(p.nodes.size());
      p.nodes.push_back(v);
    }
  for (int e = 0; e < g.m(); ++e)
    if (comp[g.efrom[e]] == c && comp[g.eto[e]] == c) {
      p.eid.push_back(e);
      p.lfrom.push_back(p.local[g.efrom[e]]);
      p.lto.push_back(p.local[g.eto[e]]);
    }
  p.out = build_csr(static_cast<int>(p.nodes.size()), p.lfrom,
                    static_cast<int>(p.eid.size()));
  return p;
}

constexpr std::int64_t kInf = INT64_MAX / 4;

// Karp's recurrence on one strongly connected piece (>= 1 edge): minimum
// cycle mean as a rational. Two sweeps keep memory linear: the first keeps
// only the length-n row, the second replays rows 0..n-1 to take the
// max-quotient per node.
Rational karp_piece(const Piece& p, const std::vector<std::int64_t>& w) {
  const int n = static_cast<int>(p.nodes.size());
  const int m = static_cast<int>(p.eid.size());

  auto sweep = [&](int upto, auto&& visit) {
    // visit(k, row) is called for each k in 0..upto with d_k
    std::vector<std::int64_t> cur(n, kInf), nxt(n);
    cur[0] = 0;
    visit(0, cur);
    for (int k = 1; k <= upto; ++k) {
      std::fill(nxt.begin(), nxt.end(), kInf);
      for (int e = 0; e < m; ++e) {
        if (cur[p.lfrom[e]] >= kInf) continue;
        const std::int64_t cand = cur[p.lfrom[e]] + w[e];
        if (cand < nxt[p.lto[e]]) nxt[p.lto[e]] = cand;
      }
      cur.swap(nxt);
      visit(k, cur);
    }
  };

  std::vector<std::int64_t> dn(n);
  sweep(n, [&](int k, const std::vector<std::int64_t>& row) {
    if (k == n) dn = row;
  });

  // max over k of (d_n - d_k)/(n-k), then min over v
  struct Frac {
    std::int64_t num, den;  // den 0 = undefined
  };
  auto frac_less = [](const Frac& a, const Frac& b) {
    return static_cast<int128>(a.num) * b.den < static_cast<int128>(b.num) * a.den;
  };
  std::vector<Frac> best(n, Frac{0, 0});
  sweep(n - 1, [&](int k, const std::vector<std::int64_t>& row) {
    for (int v = 0; v < n; ++v) {
      if (row[v] >= kInf || dn[v] >= kInf) continue;
      const Frac f{dn[v] - row[v], n - k};
      if (best[v].den == 0 || frac_less(best[v], f)) best[v] = f;
    }
  });

  bool have = false;
  Frac mu{0, 1};
  for (int v = 0; v < n; ++v) {
    if (best[v].den == 0 || dn[v] >= kInf) continue;
    if (!have || frac_less(best[v], mu)) {
      mu = best[v];
      have = true;
    }
  }
  if (!have) fail(errc::internal, "Karp sweep found no finite quotient in a strongly connected piece");
  return Rational(mu.num, mu.den);
}

// Edges of the piece whose reduced weight under exact shortest-walk
// potentials is zero, after shifting all weights by `mean` (scaled to stay
// integral). Shifted cycle weights are >= 0, so the potentials converge;
// every cycle of mean exactly `mean` lies inside the returned subgraph,
// and conversely every cycle inside it has mean exactly `mean`.
std::vector<char> tight_edges(const Piece& p, const std::vector<std::int64_t>& w,
                              const Rational& mean) {
  const int n = static_cast<int>(p.nodes.size());
  const int m = static_cast<int>(p.eid.size());
  const auto num = static_cast<std::int64_t>(numerator(mean));
  const auto den = static_cast<std::int64_t>(denominator(mean));
  auto shifted = [&](int e) -> int128 { return static_cast<int128>(w[e]) * den - num; };

  std::vector<int128> dist(n, 0);
  for (int round = 0; round < n; ++round) {
    bool any = false;
    for (int e = 0; e < m; ++e) {
      const int128 cand = dist[p.lfrom[e]] + shifted(e);
      if (cand < dist[p.lto[e]]) {
        dist[p.lto[e]] = cand;
        any = true;
      }
    }
    if (!any) break;
  }
  std::vector<char> tight(m, 0);
  for (int e = 0; e < m; ++e)
    tight[e] = dist[p.lfrom[e]] + shifted(e) == dist[p.lto[e]];
  return tight;
}

// A simple cycle made of tight edges: a tight edge closed by a breadth-
// first path through tight edges of its own strongly connected (tight)
// component. Prefers a cycle through an edge with prefer[e] != 0 when such
// a cycle exists; `used_prefer` reports whether it does. Local edge ids.
std::vector<int> tight_cycle(const Piece& p, const std::vector<char>& tight,
                             const std::vector<char>& prefer, bool* used_prefer) {
  const int n = static_cast<int>(p.nodes.size());
  const int m = static_cast<int>(p.eid.size());
  MultiGraph tg;
  tg.n = n;
  std::vector<int> orig;  // tight-graph edge -> local edge id
  for (int e = 0; e < m; ++e)
    if (tight[e]) {
      tg.add_edge(p.lfrom[e], p.lto[e]);
      orig.push_back(e);
    }
  std::vector<int> comp;
  scc_decompose(tg, {}, comp);

  auto internal = [&](int te) { return comp[tg.efrom[te]] >= 0 && comp[tg.efrom[te]] == comp[tg.eto[te]]; };
  int chosen = -1;
  bool pref = false;
  for (int te = 0; te < tg.m(); ++te)
    if (internal(te) && !prefer.empty() && prefer[orig[te]]) {
      chosen = te;
      pref = true;
      break;
    }
  if (chosen < 0)
    for (int te = 0; te < tg.m(); ++te)
      if (internal(te)) {
        chosen = te;
        break;
      }
  if (chosen < 0) fail(errc::internal, "no tight cycle under the exact mean");
  if (used_prefer) *used_prefer = pref;

  // Close `chosen` with the fewest tight edges inside its component.
  const int cid = comp[tg.efrom[chosen]];
  NodeMask alive(n, 0);
  for (int v = 0; v < n; ++v) alive[v] = comp[v] == cid;
  std::vector<int> back = shortest_edge_path(tg, alive, tg.eto[chosen], tg.efrom[chosen]);
  std::vector<int> cycle;
  for (int te : back) cycle.push_back(orig[te]);
  cycle.push_back(orig[chosen]);
  // Rotate so the cycle starts at its edge-order head (cosmetic only).
  std::rotate(cycle.begin(), cycle.end() - 1, cycle.end());
  return cycle;
}

}  // namespace

MeanCycle min_mean_cycle(const MultiGraph& g, const std::vector<std::int64_t>& w,
                         const NodeMask& alive_in) {
  if (static_cast<int>(w.size()) != g.m())
    fail(errc::internal, "weight array does not match the edge count");
  const NodeMask alive = alive_in.empty() ? full_mask(g.n) : alive_in;

  std::vector<int> comp;
  const int comps = scc_decompose(g, alive, comp);

  bool have = false;
  Rational best;
  int best_comp = -1;
  for (int c = 0; c < comps; ++c) {
    Piece p = make_piece(g, comp, c);
    if (p.eid.empty()) continue;  // trivial component, no cycle
    std::vector<std::int64_t> lw(p.eid.size());
    for (std::size_t e = 0; e < p.eid.size(); ++e) lw[e] = w[p.eid[e]];
    const Rational mean = karp_piece(p, lw);
    if (!have || mean < best) {
      have = true;
      best = mean;
      best_comp = c;
    }
  }
  if (!have) fail(errc::no_cycle, "the (sub)graph has no cycle");

  Piece p = make_piece(g, comp, best_comp);
  std::vector<std::int64_t> lw(p.eid.size());
  for (std::size_t e = 0; e < p.eid.size(); ++e) lw[e] = w[p.eid[e]];
  MeanCycle out;
  out.mean = best;
  for (int e : tight_cycle(p, tight_edges(p, lw, best), {}, nullptr))
    out.edges.push_back(p.eid[e]);
  return out;
}

std::vector<std::int64_t> ratio_to_mp(const std::vector<std::int64_t>& w1,
                                      const std::vector<std::int64_t>& w2, std::int64_t p,
                                      std::int64_t q) {
  if (w1.size() != w2.size()) fail(errc::internal, "ratio weight arrays differ in length");
  std::vector<std::int64_t> w(w1.size());
  for (std::size_t e = 0; e < w.size(); ++e) w[e] = q * w1[e] - p * w2[e];
  return w;
}

std::optional<std::vector<Rational>> mp_multidim_feasible(
    const MultiGraph& g, const NodeMask& component,
    const std::vector<std::vector<std::int64_t>>& dims, const std::vector<Rational>& nu,
    const std::vector<std::int64_t>* positive) {
  if (dims.size() != nu.size()) fail(errc::internal, "dimension/threshold count mismatch");

  std::vector<int> edges;
  for (int e = 0; e < g.m(); ++e)
    if (component[g.efrom[e]] && component[g.eto[e]]) edges.push_back(e);
  if (edges.empty()) return std::nullopt;

  LinearSystem sys;
  sys.vars = static_cast<int>(edges.size());
  // x_e >= 0
  for (int j = 0; j < sys.vars; ++j) {
    std::vector<Rational> a(j + 1);
    a[j] = 1;
    sys.add(std::move(a), '>', 0);
  }
  // flow conservation at every node of the component
  for (int v = 0; v < g.n; ++v) {
    if (!component[v]) continue;
    std::vector<Rational> a(sys.vars);
    bool touched = false;
    for (int j = 0; j < sys.vars; ++j) {
      const int e = edges[j];
      if (g.efrom[e] == v) {
        a[j] += 1;
        touched = true;
      }
      if (g.eto[e] == v) {
        a[j] -= 1;
        touched = true;
      }
    }
    if (touched) sys.add(std::move(a), '=', 0);
  }
  // total mass and the per-dimension averages
  sys.add(std::vector<Rational>(sys.vars, 1), '>', 1);
  if (positive) {
    if (static_cast<int>(positive->size()) != g.m())
      fail(errc::internal, "positivity weights do not match the edge count");
    std::vector<Rational> a(sys.vars);
    for (int j = 0; j < sys.vars; ++j) a[j] = (*positive)[edges[j]];
    sys.add(std::move(a), '>', 1);
  }
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (static_cast<int>(dims[d].size()) != g.m())
      fail(errc::internal, "weight array does not match the edge count");
    std::vector<Rational> a(sys.vars);
    for (int j = 0; j < sys.vars; ++j) a[j] = dims[d][edges[j]];
    sys.add(std::move(a), '<', nu[d]);
  }

  auto sol = lp_feasible(sys);
  if (!sol) return std::nullopt;
  std::vector<Rational> flow(g.m(), Rational(0));
  for (int j = 0; j < sys.vars; ++j) flow[edges[j]] = (*sol)[j];
  return flow;
}

MultiCycle extract_multicycle(const MultiGraph& g, const std::vector<Rational>& x) {
  if (static_cast<int>(x.size()) != g.m())
    fail(errc::malformed_flow, "flow vector does not match the edge count");
  for (const Rational& v : x)
    if (v < 0) fail(errc::malformed_flow, "flow has a negative entry");
  for (int v = 0; v < g.n; ++v) {
    Rational net = 0;
    for (int e = 0; e < g.m(); ++e) {
      if (g.efrom[e] == v) net += x[e];
      if (g.eto[e] == v) net -= x[e];
    }
    if (net != 0) fail(errc::malformed_flow, "flow is not conserved at node " + std::to_string(v));
  }

  // Scale to integers.
  BigInt z = 1;
  for (const Rational& v : x)
    if (v != 0) z = lcm(z, denominator(v));
  std::vector<BigInt> y(g.m());
  for (int e = 0; e < g.m(); ++e) y[e] = numerator(x[e]) * (z / denominator(x[e]));

  MultiCycle mc;
  while (true) {
    // The globally least-multiplicity edge anchors the next cycle.
    int anchor = -1;
    for (int e = 0; e < g.m(); ++e)
      if (y[e] > 0 && (anchor < 0 || y[e] < y[anchor])) anchor = e;
    if (anchor < 0) break;

    // Close the cycle: shortest support path from head back to tail.
    std::vector<int> prev_edge(g.n, -1);
    std::vector<char> seen(g.n, 0);
    std::queue<int> bfs;
    const int from = g.eto[anchor], to = g.efrom[anchor];
    seen[from] = 1;
    bfs.push(from);
    while (!bfs.empty() && !seen[to]) {
      const int u = bfs.front();
      bfs.pop();
      for (int e = 0; e < g.m(); ++e) {
        if (y[e] <= 0 || g.efrom[e] != u || seen[g.eto[e]]) continue;
        seen[g.eto[e]] = 1;
        prev_edge[g.eto[e]] = e;
        bfs.push(g.eto[e]);
      }
    }
    std::vector<int> cycle{anchor};
    if (from != to) {
      if (!seen[to])
        fail(errc::malformed_flow, "flow support is not a union of cycles");
      std::vector<int> back;
      for (int v = to; v != from; v = g.efrom[prev_edge[v]]) back.push_back(prev_edge[v]);
      cycle.insert(cycle.end(), back.rbegin(), back.rend());
    }
    BigInt mult = y[cycle[0]];
    for (int e : cycle) mult = std::min(mult, y[e]);
    for (int e : cycle) y[e] -= mult;
    mc.cycles.push_back(std::move(cycle));
    mc.mult.push_back(std::move(mult));
  }
  if (mc.cycles.empty()) fail(errc::malformed_flow, "flow is identically zero");
  return mc;
}

std::vector<int> shortest_edge_path(const MultiGraph& g, const NodeMask& alive_in, int u, int v) {
  if (u == v) return {};
  const NodeMask alive = alive_in.empty() ? full_mask(g.n) : alive_in;
  const Csr out = build_csr(g.n, g.efrom, g.m());
  std::vector<int> prev_edge(g.n, -1);
  std::vector<char> seen(g.n, 0);
  std::queue<int> bfs;
  seen[u] = 1;
  bfs.push(u);
  while (!bfs.empty() && !seen[v]) {
    const int a = bfs.front();
    bfs.pop();
    for (int e : out.at(a)) {
      const int b = g.eto[e];
      if (!alive[b] || seen[b]) continue;
      seen[b] = 1;
      prev_edge[b] = e;
      bfs.push(b);
    }
  }
  if (!seen[v]) fail(errc::internal, "witness connector endpoints are not connected");
  std::vector<int> path;
  for (int b = v; b != u; b = g.efrom[prev_edge[b]]) path.push_back(prev_edge[b]);
  std::reverse(path.begin(), path.end());
  return path;
}

WitnessWalk::WitnessWalk(const MultiGraph& g, MultiCycle mc, const NodeMask& alive,
                         std::optional<int> via)
    : g_(g), mc_(std::move(mc)) {
  if (mc_.cycles.empty()) fail(errc::internal, "witness walk over an empty multi-cycle");
  const int k = static_cast<int>(mc_.cycles.size());
  auto anchor = [&](int i) { return g_.efrom[mc_.cycles[i][0]]; };
  for (int i = 0; i < k; ++i) {
    const int from = anchor(i), to = anchor((i + 1) % k);
    if (i + 1 < k || !via) {
      connect_.push_back(shortest_edge_path(g_, alive, from, to));
    } else {
      // Last connector detours through the accepting node every round.
      std::vector<int> leg = shortest_edge_path(g_, alive, from, *via);
      std::vector<int> leg2 = shortest_edge_path(g_, alive, *via, to);
      leg.insert(leg.end(), leg2.begin(), leg2.end());
      connect_.push_back(std::move(leg));
    }
  }
}

void WitnessWalk::plan_round() {
  ++round_;
  queue_.clear();
  pos_ = 0;
  for (std::size_t i = 0; i < mc_.cycles.size(); ++i) {
    if (mc_.mult[i] > BigInt(INT64_MAX / (round_ + 1)))
      fail(errc::unsupported, "multi-cycle multiplicities too large to replay");
    const std::int64_t reps = round_ * static_cast<std::int64_t>(mc_.mult[i]);
    for (std::int64_t r = 0; r < reps; ++r)
      queue_.insert(queue_.end(), mc_.cycles[i].begin(), mc_.cycles[i].end());
    queue_.insert(queue_.end(), connect_[i].begin(), connect_[i].end());
  }
}

int WitnessWalk::next() {
  while (pos_ >= queue_.size()) plan_round();
  return queue_[pos_++];
}

ConjunctionResult solve_conjunction(const MultiGraph& g, int start, const NodeMask& X,
                                    const NodeMask& Y, const Objective& obj) {
  ConjunctionResult res;
  NodeMask alive = prune_safety(g, X);
  if (start < 0 || start >= g.n || !alive[start]) return res;

  // Restrict to what the start can reach inside the pruned graph.
  {
    const Csr out = build_csr(g.n, g.efrom, g.m());
    NodeMask reach(g.n, 0);
    std::queue<int> bfs;
    reach[start] = 1;
    bfs.push(start);
    while (!bfs.empty()) {
      const int u = bfs.front();
      bfs.pop();
      for (int e : out.at(u)) {
        const int v = g.eto[e];
        if (alive[v] && !reach[v]) {
          reach[v] = 1;
          bfs.push(v);
        }
      }
    }
    for (int v = 0; v < g.n; ++v) alive[v] = alive[v] && reach[v];
  }

  std::vector<int> comp;
  const int comps = scc_decompose(g, alive, comp);
  const std::vector<char> live = live_components(g, comp, comps, Y);

  if (obj.kind == Objective::Kind::ratio) {
    // Score each edge q*w1 - p*w2 and take the minimum cycle mean mu per
    // live component. With non-negative w1, w2:
    //   mu < 0  -- some cycle has ratio strictly below nu (its w2 must be
    //              positive, since a negative score forces p*w2 > q*w1);
    //   mu = 0  -- the best cycles sit exactly on nu; among them a cycle
    //              with w2 > 0 has ratio exactly nu, while an all-zero
    //              cycle counts as ratio 1 and helps only when nu >= 1.
    //              Zero-score cycles are exactly the cycles of the tight
    //              subgraph, so it suffices to look for a tight cycle
    //              through a w2-positive edge;
    //   mu > 0  -- no cycle reaches nu; the minimum-score cycle is still
    //              reported, as its plain ratio is the component's best.
    const std::int64_t p = static_cast<std::int64_t>(numerator(obj.nu_ratio));
    const std::int64_t q = static_cast<std::int64_t>(denominator(obj.nu_ratio));
    auto local_scores = [&](const Piece& piece) {
      std::vector<std::int64_t> w(piece.eid.size());
      for (std::size_t e = 0; e < piece.eid.size(); ++e) {
        const int id = piece.eid[e];
        w[e] = q * obj.w1[id] - p * obj.w2[id];
      }
      return w;
    };

    std::vector<Rational> mu(comps);
    std::vector<char> has_cycle(comps, 0);
    bool have = false;
    Rational best;
    for (int c = 0; c < comps; ++c) {
      if (!live[c]) continue;
      Piece piece = make_piece(g, comp, c);
      if (piece.eid.empty()) continue;
      mu[c] = karp_piece(piece, local_scores(piece));
      has_cycle[c] = 1;
      if (!have || mu[c] < best) {
        have = true;
        best = mu[c];
      }
    }
    if (!have) return res;  // no live cycle at all

    // Choose the witness component: on the zero boundary prefer one whose
    // tight subgraph can close a cycle with clairvoyant mass.
    int chosen = -1;
    bool prefer_done = false;
    std::vector<int> cyc;
    for (int c = 0; c < comps && !prefer_done; ++c) {
      if (!has_cycle[c] || mu[c] != best) continue;
      Piece piece = make_piece(g, comp, c);
      const std::vector<std::int64_t> w = local_scores(piece);
      std::vector<char> prefer;
      if (best == 0) {
        prefer.resize(piece.eid.size());
        for (std::size_t e = 0; e < piece.eid.size(); ++e)
          prefer[e] = obj.w2[piece.eid[e]] > 0;
      }
      bool used = false;
      std::vector<int> local = tight_cycle(piece, tight_edges(piece, w, best), prefer, &used);
      if (chosen < 0 || used) {
        chosen = c;
        cyc.clear();
        for (int e : local) cyc.push_back(piece.eid[e]);
        prefer_done = used || best != 0;
      }
    }

    res.found_cycle = true;
    res.cycle = std::move(cyc);
    res.component.assign(g.n, 0);
    for (int v = 0; v < g.n; ++v) res.component[v] = comp[v] == chosen;
    res.cycle_w1 = res.cycle_w2 = 0;
    for (int e : res.cycle) {
      res.cycle_w1 += obj.w1[e];
      res.cycle_w2 += obj.w2[e];
    }
    res.satisfied = best < 0 || (best == 0 && (res.cycle_w2 > 0 || obj.nu_ratio >= 1));
    return res;
  }

  // mean_payoff
  for (int c = 0; c < comps; ++c) {
    if (!live[c]) continue;
    NodeMask cmask(g.n, 0);
    bool nonempty = false;
    for (int v = 0; v < g.n; ++v) {
      cmask[v] = comp[v] == c;
      nonempty = nonempty || cmask[v];
    }
    if (!nonempty) continue;
    if (obj.dims.size() == 1) {
      MeanCycle mc;
      try {
        mc = min_mean_cycle(g, obj.dims[0], cmask);
      } catch (const error& e) {
        if (e.kind() == errc::no_cycle) continue;
        throw;
      }
      if (mc.mean <= obj.nu[0]) {
        res.satisfied = true;
        res.component = std::move(cmask);
        res.cycle = mc.edges;
        res.found_cycle = true;
        res.multicycle.cycles = {mc.edges};
        res.multicycle.mult = {BigInt(1)};
        return res;
      }
    } else {
      auto flow = mp_multidim_feasible(g, cmask, obj.dims, obj.nu,
                                       obj.positive.empty() ? nullptr : &obj.positive);
      if (flow) {
        res.satisfied = true;
        res.component = std::move(cmask);
        res.flow = *flow;
        res.multicycle = extract_multicycle(g, *flow);
        return res;
      }
    }
  }
  return res;
}

}  // namespace crsched
