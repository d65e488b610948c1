#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crsched/task.hpp"

namespace crsched {

// Release sets are bitmasks over task indices (bit i = task i released this
// slot, 0-based internally; external formats use 1-based task numbers).
using ReleaseMask = std::uint32_t;
constexpr int kMaxTasks = 30;

// What the scheduler does in one slot: run the pending job of `task` that
// was released `age` slots ago (age 0 = released in this very slot), or
// stay idle.
struct ScheduleLabel {
  int task = -1;
  int age = 0;
  bool idle() const { return task < 0; }
  static ScheduleLabel make_idle() { return ScheduleLabel{}; }
  static ScheduleLabel run(int task, int age) { return ScheduleLabel{task, age}; }
  bool operator==(const ScheduleLabel&) const = default;
  std::string describe() const;  // "idle" or "task/age"
};

// Remaining execution times of pending jobs, one row per task, one column
// per age in 1..d_max-1 (a job older than its deadline is gone, so larger
// ages never need to be stored; the age-0 job of the current slot only
// exists transiently inside step()). Entry 0 means "no pending job".
struct PendingMatrix {
  int tasks = 0;
  int ages = 0;  // d_max - 1
  std::vector<std::int16_t> rem;

  PendingMatrix() = default;
  PendingMatrix(int tasks, int ages) : tasks(tasks), ages(ages), rem(tasks * ages, 0) {}

  std::int16_t& at(int task, int age) { return rem[task * ages + (age - 1)]; }
  std::int16_t at(int task, int age) const { return rem[task * ages + (age - 1)]; }
  bool empty_all() const;
  bool operator==(const PendingMatrix&) const = default;
  std::string describe() const;  // rows "task: rem@age ..." for debugging
};

struct PendingMatrixHash {
  std::size_t operator()(const PendingMatrix& m) const;
};

// One pending job as seen by a policy after the current releases were added:
// its age is 0..d_max-1 and `slots_left` counts the slots up to and
// including the deadline slot in which it may still run.
struct PendingJob {
  int task = 0;
  int age = 0;
  int rem = 0;
  int slots_left = 0;  // deadline - age
  bool feasible() const { return rem <= slots_left; }
};

// All jobs pending once `released` is merged into `m`, in (task, age) order.
// With feasible_only, jobs that can no longer complete by their deadline are
// filtered out; every built-in policy works on that view.
std::vector<PendingJob> pending_jobs(const PendingMatrix& m, ReleaseMask released,
                                     const Taskset& ts, bool feasible_only);

// Whether entries that can no longer complete are kept until their deadline
// passes (lazy) or zeroed immediately (eager). Both describe the same runs;
// eager is the canonical form used when enumerating scheduler state spaces.
enum class Retention { lazy, eager };

struct StepResult {
  PendingMatrix next;
  int reward = 0;         // value paid iff the scheduled job completed on time
  bool completed = false; // did the scheduled job finish in this slot
};

// Advances one slot: merge `released`, apply `label`, then age everything.
// Throws errc::invalid_schedule when the label names a job that is not
// pending (never released, already completed, or past its deadline).
// Running a pending-but-doomed job is legal, just fruitless.
StepResult step_matrix(const PendingMatrix& m, ReleaseMask released, ScheduleLabel label,
                       const Taskset& ts, Retention retention = Retention::lazy);

// Cumulated utility of schedule prefix `labels` against release prefix
// `sigma` (slot-by-slot, same length), validating every label on the way.
std::int64_t utility(const Taskset& ts, std::span<const ReleaseMask> sigma,
                     std::span<const ScheduleLabel> labels);

}  // namespace crsched
