#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "crsched/lts.hpp"
#include "crsched/pending.hpp"
#include "crsched/task.hpp"

namespace crsched {

// A deterministic on-line scheduling policy: given the pending jobs of the
// current slot (current releases already merged) it picks one to run, or
// idles. Policies see only feasible jobs — a job that can no longer meet
// its deadline earns nothing, and none of the built-in policies would ever
// run one — so their choices are identical under lazy and eager retention.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual ScheduleLabel choose(const std::vector<PendingJob>& feasible,
                               const Taskset& ts) const = 0;
};

// Built-in policies (ties broken by task index, then by older job first,
// unless stated otherwise):
//   edf   earliest deadline first: fewest slots left to the deadline
//   srt   shortest remaining time
//   sp    static priority: lowest task index wins
//   fifo  oldest job first (earliest release)
//   td1   value-density heuristic for uniform-density worlds: keep running
//         the current job unless a newly released job is worth more than
//         twice its remaining value (value * rem / wcet), in which case it
//         takes over and the old job is dropped for good; an idle processor
//         picks the most valuable feasible job.
// Throws errc::unsupported for unknown names (e.g. policies from other
// studies such as dover or dstar).
std::unique_ptr<Policy> make_policy(const std::string& name);
std::vector<std::string> builtin_policy_names();

// Wraps a user-supplied deterministic, input-enabled transducer as a policy
// source: build_online_lts is bypassed and the transducer used as-is after
// validation (see lts_from_json).
struct OnlineLts {
  Lts lts;
  // The pending matrix behind every state, aligned with state ids; empty for
  // user-supplied transducers (their states are opaque).
  std::vector<PendingMatrix> states;
};

struct OnlineOptions {
  Retention retention = Retention::eager;  // canonical state form
  bool prune_unschedulable = false;        // apply prune_unschedulable_jobs after building
  int state_cap = 1'000'000;
};

// Deterministic scheduler transducer: states are (canonical) pending
// matrices, inputs release sets, outputs the policy's labels, rewards the
// values of jobs completed on time. Input-enabled by construction. Throws
// errc::state_explosion past the cap.
OnlineLts build_online_lts(const Taskset& ts, const Policy& policy, OnlineOptions opts = {});

// Merges states that differ only in pending jobs no policy run will ever
// touch: if no run from state s schedules the job (i, age) anywhere in the
// remaining slots to its deadline, s behaves exactly like s without that
// job. Iterates to a fixpoint and re-reaches from the initial state. The
// produced transducer emits the same outputs for every release sequence.
OnlineLts prune_unschedulable_jobs(const OnlineLts& online, const Taskset& ts);

struct PolicyRun {
  std::vector<ScheduleLabel> labels;
  std::vector<int> rewards;  // per slot
  std::int64_t total = 0;
};

// Drives the policy over a release prefix with the plain slot semantics —
// no transducer involved — so LTS-based results can be cross-checked
// against a second implementation path.
PolicyRun run_policy(const Taskset& ts, const Policy& policy,
                     std::span<const ReleaseMask> sigma);

}  // namespace crsched
