#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crsched/lts.hpp"
#include "crsched/rational.hpp"
#include "crsched/task.hpp"

namespace crsched {

// Admissibility of release sequences is expressed with three automaton
// flavours running next to the schedulers:
//  - safety: a deterministic, input-enabled automaton with one absorbing
//    reject state; sequences that ever reach it are inadmissible.
//  - liveness: deterministic, input-enabled, with accepting states that an
//    admissible sequence must visit infinitely often.
//  - limit-average: a deterministic weighted automaton; the long-run average
//    of each weight dimension must stay within its threshold.

struct SafetyAutomaton {
  Lts lts;
  int reject = -1;  // -1: no reject state (universal automaton)
};

struct LivenessAutomaton {
  Lts lts;
  std::vector<char> accept;  // per state
};

struct LimitAvgAutomaton {
  Lts lts;                          // transition `weights` carry the dimensions
  std::vector<Rational> thresholds; // one per dimension, inclusive upper bounds
};

// No constraint at all: one state, self-loops on every release set.
SafetyAutomaton universal_safety(int num_tasks);
LivenessAutomaton universal_liveness(int num_tasks);  // the single state accepts

// Sliding-window workload cap: over every window of `window` consecutive
// slots, the released execution demand (sum of wcets) must not exceed
// `cap`. States remember the last window-1 slot workloads; overshooting
// moves to the absorbing reject state.
SafetyAutomaton workload_window_safety(const Taskset& ts, int window, int cap);

// Sporadicity: consecutive releases of `task` (0-based) must be at least
// `period` slots apart. The periodic variant demands exactly `period`
// slots between releases once the task has released at all.
SafetyAutomaton sporadic_safety(const Taskset& ts, int task, int period, bool exact_period);

// Job starvation guard: `task` must be released infinitely often.
LivenessAutomaton inf_often_liveness(const Taskset& ts, int task);

// Long-run average released workload (sum of wcets per slot) at most
// `lambda`. Single state, one weight dimension.
LimitAvgAutomaton mean_workload_limitavg(const Taskset& ts, const Rational& lambda);

// Conjunction of constraints as one automaton of each flavour.
struct ConstraintSet {
  SafetyAutomaton safety;
  LivenessAutomaton liveness;
  std::vector<LimitAvgAutomaton> limitavg;
};

// Product of several safety automata with a single collapsed reject state.
SafetyAutomaton compose_safety(const std::vector<SafetyAutomaton>& parts, int num_tasks,
                               int state_cap);

// Conjunction of liveness automata: a round-robin watcher that accepts
// whenever the currently awaited component just accepted, then awaits the
// next; visiting its accepting states infinitely often is equivalent to
// every component accepting infinitely often.
LivenessAutomaton compose_liveness(const std::vector<LivenessAutomaton>& parts, int num_tasks,
                                   int state_cap);

// Parsed form of the constraints file; see io.hpp for the JSON format.
struct ConstraintSpec {
  struct Safety {
    std::string type;  // "workload_window" | "sporadic" | "periodic"
    int window = 0, cap = 0;      // workload_window
    int task = 0, period = 0;     // sporadic / periodic (task 1-based as written)
  };
  struct Liveness {
    std::string type;  // "inf_often"
    int task = 0;      // 1-based as written
  };
  struct LimitAvg {
    std::string type;  // "mean_workload"
    Rational lambda;
  };
  std::vector<Safety> safety;
  std::vector<Liveness> liveness;
  std::vector<LimitAvg> limitavg;
};

// Instantiates and composes all constraints of a spec for a taskset.
ConstraintSet build_constraints(const ConstraintSpec& spec, const Taskset& ts, int state_cap);

}  // namespace crsched
