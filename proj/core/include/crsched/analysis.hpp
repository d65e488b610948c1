#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crsched/clairvoyant.hpp"
#include "crsched/constraints.hpp"
#include "crsched/errors.hpp"
#include "crsched/graph.hpp"
#include "crsched/lts.hpp"
#include "crsched/policy.hpp"
#include "crsched/rational.hpp"
#include "crsched/task.hpp"

namespace crsched {

// The product multigraph of scheduler, clairvoyant and constraint automata,
// all consuming the same release sets. Per edge there are paired weight
// vectors wa (scheduler side) and wc (clairvoyant side):
//   - dimension 0 carries the banked utilities of both schedulers;
//   - with limit-average constraints of total dimension d, dimensions 1..d
//     hold the constraint weight in wa and a constant 1 in wc, so every
//     long-run average reads uniformly as a ratio of accumulated weights.
// X marks safety-rejected nodes (not expanded further - they are pruned
// anyway), Y marks liveness-accepting nodes.
struct ProductGraph {
  MultiGraph g;
  int start = 0;
  NodeMask x, y;
  std::vector<std::vector<std::int64_t>> wa, wc;  // [dimension][edge]
  std::vector<ReleaseMask> input;                 // per edge: generating release set
  std::vector<std::int32_t> output;               // per edge: scheduler label (encoded)
  std::vector<std::vector<int>> tuple;            // per node: component states
  int num_tasks = 0;
  int d_max = 0;

  int dims() const { return static_cast<int>(wa.size()); }
};

// Builds the product by breadth-first exploration from the joint initial
// state. Every component must be input-enabled over the same task count;
// the scheduler must in addition be deterministic. Parallel edges with
// identical endpoints and weight vectors are collapsed to one representative
// (keeping the smallest generating release set as its label). Safety-reject
// nodes get no outgoing edges. Throws errc::state_explosion past the cap.
ProductGraph build_product(const Lts& online, const Lts& clair, const SafetyAutomaton& safety,
                           const LivenessAutomaton& liveness,
                           const std::vector<LimitAvgAutomaton>& limitavg,
                           std::int64_t state_cap);

// Outcome of one threshold query on the product.
struct DecideResult {
  bool sat = false;
  ConjunctionResult detail;
  // The best cycle's plain ratio wa(C)/wc(C); absent when no cycle was
  // found or its clairvoyant weight is zero.
  bool has_ratio = false;
  Rational cycle_ratio;
};

// Single-dimension decision: is some admissible release sequence's limit
// utility ratio at most nu? Reduces the ratio to a mean-payoff query and
// solves the safety/liveness/objective conjunction from the start node.
// Requires a product without limit-average dimensions.
DecideResult decide_cr_at_most(const ProductGraph& pg, const Rational& nu);

// A replayable witness: a path from the start node to the witness
// component followed by either one period of a simple cycle or a
// multi-cycle walked per the witness procedure.
struct CrWitness {
  bool multi = false;
  std::vector<int> path;   // product edge ids, start -> first cycle's head
  std::vector<int> cycle;  // one period (ratio witnesses)
  MultiCycle multicycle;   // limit-average witnesses
  std::int64_t wa_sum = 0, wc_sum = 0;  // dimension-0 sums over the cycle
  Rational ratio;                       // realized utility ratio of the witness
};

struct SearchResult {
  Rational cr;          // exact value, or the interval's upper end
  bool exact = true;
  Rational lo, hi;      // lo == hi == cr when exact
  int probes = 0;
  std::vector<std::string> warnings;
  bool has_witness = false;
  CrWitness witness;
};

// Exact competitive ratio by adaptive binary search on cycle ratios:
// maintain [l, r] enclosing the answer, probe nu = (l+r)/2; a satisfied
// probe whose witness cycle ratio equals nu is returned exactly (the
// minimum mean certifies nothing smaller exists), a smaller ratio shrinks
// r to it; an unsatisfied probe raises l to nu, shrinks r to the best
// cycle's ratio if that is smaller, and tries nu = r next. Cycle ratios
// form a finite set, so the search terminates on one of them. Degenerate
// products (no live cycle, or none with positive clairvoyant weight at
// ratios below one) report 1 with a warning instead of guessing.
SearchResult adaptive_binary_search(const ProductGraph& pg);

// Competitive ratio under limit-average constraints: bisection over nu
// where each probe asks for a flow meeting, per live component, the ratio
// dimension at nu and every constraint dimension at its lambda (all as
// zero-threshold mean-payoff dimensions), with positive clairvoyant mass.
// A feasible flow's own ratio tightens r, infeasibility raises l; stops
// once r - l <= epsilon. The reported value is the realized upper end.
SearchResult cr_with_limitavg(const ProductGraph& pg, const std::vector<Rational>& lambda,
                              const Rational& epsilon);

// Exhaustive oracle: minimum ratio over all reachable simple cycles inside
// live components after safety pruning, with cycles of zero clairvoyant
// weight counting as ratio 1 and the result clamped to [0, 1] like every
// report. Guarded to tiny products (<= 12 nodes); throws
// errc::state_explosion beyond that.
Rational brute_force_cycle_oracle(const ProductGraph& pg);

// Expands a witness into a concrete walk of product edge ids: the start
// path, then the cycle repeated `rounds` times (ratio witnesses) or
// `rounds` rounds of the witness procedure (limit-average witnesses, round
// r repeating cycle i r * mult_i times with connectors and one accepting
// detour per round).
std::vector<int> witness_edges(const ProductGraph& pg, const CrWitness& w, int rounds);

// The release sets along a walk - the adversary's job sequence.
std::vector<ReleaseMask> witness_releases(const ProductGraph& pg, const std::vector<int>& edges);

struct AnalysisOptions {
  std::string scheduler = "td1";         // built-in policy name
  const Lts* scheduler_lts = nullptr;    // used instead of `scheduler` when set
  ConstraintSpec constraints;
  Rational epsilon = Rational(1, 1000);  // interval width under limit-average constraints
  std::int64_t state_cap = 1'000'000;
  Retention retention = Retention::eager;
  bool prune_unschedulable = false;
  bool want_witness = true;
  bool dry_run = false;  // build everything, report sizes, skip the search
};

// One witness edge, resolved so reports stand on their own.
struct EdgeDesc {
  int from = 0, to = 0;
  ReleaseMask releases = 0;
  std::int32_t output = kNoOutput;
  std::int64_t wa = 0, wc = 0;  // dimension-0 weights
};

struct CrReport {
  Rational cr;
  bool exact = true;
  Rational lo, hi;
  bool dry_run = false;
  std::vector<std::string> warnings;
  bool has_witness = false;
  CrWitness witness;
  // Resolved witness material: the path from the start node, one period of
  // the (first) cycle, and for limit-average witnesses every cycle with its
  // multiplicity.
  std::vector<EdgeDesc> witness_path_desc;
  std::vector<EdgeDesc> witness_cycle_desc;
  std::vector<std::vector<EdgeDesc>> witness_multicycle_desc;
  std::vector<std::string> witness_multiplicities;
  std::vector<ReleaseMask> witness_path_releases;
  std::vector<ReleaseMask> witness_cycle_releases;

  // sizes and counters
  int online_states = 0;
  int clair_states = 0;
  int safety_states = 0;
  int liveness_states = 0;
  int product_nodes = 0;
  std::int64_t product_edges = 0;
  int probes = 0;
  int d_max = 0;  // for decoding output labels
  double wall_seconds = 0.0;
};

// End-to-end pipeline: build the scheduler transducer (or validate a
// user-supplied one), the clairvoyant, and the constraint automata; form
// the product; run the exact search (or the epsilon-approximation when
// limit-average constraints are present); attach the witness and counters.
// `keep_product`, when given, receives the product graph (for dumps and
// replay).
CrReport competitive_ratio(const Taskset& ts, const AnalysisOptions& opt,
                           ProductGraph* keep_product = nullptr);

}  // namespace crsched
