#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crsched/rational.hpp"

namespace crsched {

// One firm-deadline task. A task releases jobs; every job of task i needs
// wcet slots of processor time within deadline slots of its release, and
// pays value on completion. Nothing is paid for late or partial work.
struct Task {
  int wcet = 0;      // C_i > 0
  int deadline = 0;  // D_i >= C_i
  int value = 0;     // V_i > 0
  int laxity() const { return deadline - wcet; }
  bool operator==(const Task&) const = default;
};

// Clairvoyant schedules live in fixed 64-bit slot windows, so deadlines
// (and with them wcets) are capped. Far beyond anything tractable anyway.
constexpr int kMaxDeadline = 62;

class Taskset {
 public:
  Taskset() = default;
  // Validates on construction: throws errc::parse on an empty set, any
  // non-positive parameter, or wcet > deadline (such a task could never
  // complete and would poison every downstream bound).
  explicit Taskset(std::vector<Task> tasks);

  int size() const { return static_cast<int>(tasks_.size()); }
  const Task& operator[](int i) const { return tasks_[i]; }
  const std::vector<Task>& tasks() const { return tasks_; }

  int d_max() const { return d_max_; }
  int l_max() const { return l_max_; }
  bool zero_laxity() const { return l_max_ == 0; }
  // Sum of all task values; handy bound on per-slot reward.
  std::int64_t total_value() const;

  std::string describe() const;  // "{(c,d,v), ...}" for logs and errors

 private:
  std::vector<Task> tasks_;
  int d_max_ = 0;
  int l_max_ = 0;
};

// Max over task pairs of the value-density quotient (V_i/C_i)/(V_j/C_j);
// 1 for uniform density, k means the densest task earns k times more per
// slot than the sparsest.
Rational importance_ratio(const Taskset& ts);

// The C=D=V family used by the TD1 experiments: each entry v becomes the
// zero-laxity task (v, v, v).
Taskset zero_laxity_taskset(const std::vector<int>& values);

}  // namespace crsched
