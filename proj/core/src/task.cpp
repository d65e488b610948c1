#include "crsched/task.hpp"

#include <algorithm>

#include "crsched/errors.hpp"

namespace crsched {

Taskset::Taskset(std::vector<Task> tasks) : tasks_(std::move(tasks)) {
  if (tasks_.empty()) fail(errc::parse, "taskset is empty");
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const Task& t = tasks_[i];
    if (t.wcet <= 0 || t.deadline <= 0 || t.value <= 0)
      fail(errc::parse, "task " + std::to_string(i + 1) + " has a non-positive parameter");
    if (t.wcet > t.deadline)
      fail(errc::parse, "task " + std::to_string(i + 1) + " can never meet its deadline (wcet > deadline)");
    if (t.deadline > kMaxDeadline)
      fail(errc::parse, "task " + std::to_string(i + 1) + " exceeds the supported deadline bound " +
                            std::to_string(kMaxDeadline));
    d_max_ = std::max(d_max_, t.deadline);
    l_max_ = std::max(l_max_, t.laxity());
  }
}

std::int64_t Taskset::total_value() const {
  std::int64_t sum = 0;
  for (const Task& t : tasks_) sum += t.value;
  return sum;
}

std::string Taskset::describe() const {
  std::string out = "{";
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (i) out += ", ";
    out += "(" + std::to_string(tasks_[i].wcet) + "," + std::to_string(tasks_[i].deadline) + "," +
           std::to_string(tasks_[i].value) + ")";
  }
  return out + "}";
}

Rational importance_ratio(const Taskset& ts) {
  Rational lo, hi;
  for (int i = 0; i < ts.size(); ++i) {
    const Rational density(ts[i].value, ts[i].wcet);
    if (i == 0) {
      lo = hi = density;
    } else {
      lo = std::min(lo, density);
      hi = std::max(hi, density);
    }
  }
  return hi / lo;
}

Taskset zero_laxity_taskset(const std::vector<int>& values) {
  std::vector<Task> tasks;
  tasks.reserve(values.size());
  for (int v : values) tasks.push_back(Task{v, v, v});
  return Taskset(std::move(tasks));
}

}  // namespace crsched
