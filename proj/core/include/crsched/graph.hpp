#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crsched/rational.hpp"

namespace crsched {

// Directed multigraph; nodes are 0..n-1, edges are ids into parallel
// from/to arrays. Weights live outside the structure (one int64 per edge
// and dimension) so the same graph can be queried under many objectives.
struct MultiGraph {
  int n = 0;
  std::vector<int> efrom, eto;

  int m() const { return static_cast<int>(efrom.size()); }
  int add_edge(int u, int v) {
    efrom.push_back(u);
    eto.push_back(v);
    return m() - 1;
  }
};

using NodeMask = std::vector<char>;  // size n, 1 = in the set

// Safety pruning: removes the nodes of `bad` and then keeps cutting nodes
// without outgoing edges until none remain. Returns the surviving-node
// mask; an edge survives iff both endpoints do.
NodeMask prune_safety(const MultiGraph& g, const NodeMask& bad);

// Strongly connected components over the nodes with alive!=0 (pass {} for
// all). comp[v] is the component id or -1 for dead nodes; ids are in
// reverse topological order of discovery. Returns the component count.
int scc_decompose(const MultiGraph& g, const NodeMask& alive, std::vector<int>& comp);

// A component is live iff it has an internal edge (a real cycle can form)
// and contains a node of `accept`. Returns one flag per component id.
std::vector<char> live_components(const MultiGraph& g, const std::vector<int>& comp,
                                  int num_comps, const NodeMask& accept);

struct MeanCycle {
  Rational mean;
  std::vector<int> edges;  // one full pass around the cycle, in order
};

// Minimum mean-weight cycle over the alive subgraph (Karp's rolling-row
// recurrence per strongly connected component, then an exact potential
// argument to extract a witness cycle). Throws errc::no_cycle if the
// subgraph is acyclic.
MeanCycle min_mean_cycle(const MultiGraph& g, const std::vector<std::int64_t>& w,
                         const NodeMask& alive);

// Weights for deciding "is there a cycle with w1(C)/w2(C) <= p/q" via a
// plain mean-payoff query: per edge q*w1 - p*w2.
std::vector<std::int64_t> ratio_to_mp(const std::vector<std::int64_t>& w1,
                                      const std::vector<std::int64_t>& w2, std::int64_t p,
                                      std::int64_t q);

// Multi-dimensional mean payoff on one strongly connected subgraph: is
// there a non-negative edge flow x with flow conservation at every node,
// total mass >= 1, and sum_e x_e * w_d(e) <= nu_d for every dimension?
// Exactly the linear feasibility system behind long-run averages; returns
// the flow (per edge id, zero off the component) when feasible. When
// `positive` is given, sum_e x_e * positive(e) >= 1 is required too - used
// to rule out flows whose ratio denominator would vanish (a flow touching
// any positive-`positive` edge can always be scaled up to meet this, so
// with all-zero thresholds no genuine solution is lost).
std::optional<std::vector<Rational>> mp_multidim_feasible(
    const MultiGraph& g, const NodeMask& component,
    const std::vector<std::vector<std::int64_t>>& dims, const std::vector<Rational>& nu,
    const std::vector<std::int64_t>* positive = nullptr);

// A multi-cycle: simple cycles with positive integer multiplicities.
struct MultiCycle {
  std::vector<std::vector<int>> cycles;  // edge ids, in cycle order
  std::vector<BigInt> mult;
};

// Decomposes a circulation into a multi-cycle: scales the flow integral,
// then repeatedly peels the cycle of minimum multiplicity from the
// support. Throws errc::malformed_flow if x is not a non-negative
// circulation with finite support.
MultiCycle extract_multicycle(const MultiGraph& g, const std::vector<Rational>& x);

// Procedure-style witness walk: visits cycle i of the multi-cycle
// round-robin, repeating it round * mult_i times in round r, connected by
// shortest edge paths inside the alive subgraph (optionally detouring the
// last connector through `via` - an accepting node to touch every round).
// next() yields edge ids of an infinite walk whose long-run averages
// converge to the flow averages of the multi-cycle.
class WitnessWalk {
 public:
  WitnessWalk(const MultiGraph& g, MultiCycle mc, const NodeMask& alive,
              std::optional<int> via);
  int next();  // next edge id of the infinite walk

 private:
  void plan_round();
  const MultiGraph& g_;
  MultiCycle mc_;
  std::vector<std::vector<int>> connect_;  // connector edge paths i -> i+1 (last one via `via`)
  std::vector<int> queue_;
  std::size_t pos_ = 0;
  std::int64_t round_ = 0;
};

// Shortest (fewest edges) path u -> v through alive nodes; empty if u == v.
// Throws errc::internal if unreachable.
std::vector<int> shortest_edge_path(const MultiGraph& g, const NodeMask& alive, int u, int v);

// A long-run objective on cycles/flows:
//  - ratio: some cycle C with w1(C)/w2(C) <= nu, where a cycle with
//    w1(C) = w2(C) = 0 counts as ratio 1 (so it only helps when nu >= 1).
//    Weights must be non-negative.
//  - mean_payoff: some flow with per-dimension long-run average <= nu[d]
//    (a single dimension is answered by Karp, several by the flow system).
struct Objective {
  enum class Kind { ratio, mean_payoff };
  Kind kind = Kind::ratio;
  // ratio:
  std::vector<std::int64_t> w1, w2;
  Rational nu_ratio;
  // mean_payoff:
  std::vector<std::vector<std::int64_t>> dims;
  std::vector<Rational> nu;
  // mean_payoff only: when non-empty, demand sum_e x_e * positive(e) >= 1
  // of the witnessing flow (see mp_multidim_feasible).
  std::vector<std::int64_t> positive;
};

struct ConjunctionResult {
  bool satisfied = false;
  NodeMask component;        // nodes of the witnessing (or best) live component
  std::vector<int> cycle;    // ratio / 1-dim: witness or best cycle edges
  // ratio: plain weight sums of the witness cycle. On success the cycle's
  // ratio is <= nu; on failure it is the minimum-score cycle, whose ratio
  // bounds the true optimum from above and tightens an enclosing search.
  std::int64_t cycle_w1 = 0, cycle_w2 = 0;
  bool found_cycle = false;
  // mean_payoff with several dimensions:
  std::vector<Rational> flow;  // per edge id, zero outside the component
  MultiCycle multicycle;
};

// The full conjunction query: starting from `start`, prune the X nodes
// (safety), keep live components (internal edge + meeting Y) reachable from
// start, and test the objective inside them. For ratio objectives the best
// cycle over all live components is reported even when unsatisfied.
ConjunctionResult solve_conjunction(const MultiGraph& g, int start, const NodeMask& X,
                                    const NodeMask& Y, const Objective& obj);

}  // namespace crsched
