#include "crsched/pending.hpp"

#include <algorithm>
#include <functional>

#include "crsched/errors.hpp"

namespace crsched {

std::string ScheduleLabel::describe() const {
  if (idle()) return "idle";
  return std::to_string(task + 1) + "/" + std::to_string(age);
}

bool PendingMatrix::empty_all() const {
  return std::all_of(rem.begin(), rem.end(), [](std::int16_t r) { return r == 0; });
}

std::string PendingMatrix::describe() const {
  std::string out;
  for (int i = 0; i < tasks; ++i) {
    if (i) out += "; ";
    out += std::to_string(i + 1) + ":";
    for (int j = 1; j <= ages; ++j) out += " " + std::to_string(at(i, j));
  }
  return out;
}

std::size_t PendingMatrixHash::operator()(const PendingMatrix& m) const {
  std::size_t h = std::hash<int>()(m.tasks * 131 + m.ages);
  for (std::int16_t r : m.rem) h = h * 1000003u + static_cast<std::size_t>(r + 1);
  return h;
}

std::vector<PendingJob> pending_jobs(const PendingMatrix& m, ReleaseMask released,
                                     const Taskset& ts, bool feasible_only) {
  std::vector<PendingJob> jobs;
  for (int i = 0; i < ts.size(); ++i) {
    if (released & (1u << i)) {
      PendingJob j{i, 0, ts[i].wcet, ts[i].deadline};
      if (!feasible_only || j.feasible()) jobs.push_back(j);
    }
    for (int age = 1; age <= m.ages; ++age) {
      if (age >= ts[i].deadline) break;  // older jobs of task i are gone
      const int rem = m.at(i, age);
      if (rem == 0) continue;
      PendingJob j{i, age, rem, ts[i].deadline - age};
      if (!feasible_only || j.feasible()) jobs.push_back(j);
    }
  }
  return jobs;
}

StepResult step_matrix(const PendingMatrix& m, ReleaseMask released, ScheduleLabel label,
                       const Taskset& ts, Retention retention) {
  const int n = ts.size();
  const int ages = ts.d_max() - 1;
  if (m.tasks != n || m.ages != ages)
    fail(errc::internal, "pending matrix shape does not match taskset");
  if (released >> n) fail(errc::invalid_schedule, "release set names a task beyond the taskset");

  // Working copy with an age-0 column for this slot's releases.
  std::vector<int> work(n * (ages + 1), 0);
  auto cell = [&](int task, int age) -> int& { return work[task * (ages + 1) + age]; };
  for (int i = 0; i < n; ++i) {
    if (released & (1u << i)) cell(i, 0) = ts[i].wcet;
    for (int age = 1; age <= ages; ++age) cell(i, age) = m.at(i, age);
  }

  StepResult out;
  if (!label.idle()) {
    if (label.task < 0 || label.task >= n || label.age < 0 || label.age > ages)
      fail(errc::invalid_schedule, "label " + label.describe() + " is out of range");
    if (label.age >= ts[label.task].deadline)
      fail(errc::invalid_schedule, "label " + label.describe() + " runs a job past its deadline");
    int& rem = cell(label.task, label.age);
    if (rem == 0)
      fail(errc::invalid_schedule, "label " + label.describe() + " names a job that is not pending");
    if (--rem == 0) {
      // Completed with age < deadline, i.e. on time: the value is earned.
      out.completed = true;
      out.reward = ts[label.task].value;
    }
  }

  // Age by one slot; entries fall off past their own deadline, and eager
  // retention additionally zeroes jobs that can no longer finish in time.
  out.next = PendingMatrix(n, ages);
  for (int i = 0; i < n; ++i) {
    for (int age = 0; age < ages; ++age) {
      const int rem = cell(i, age);
      if (rem == 0) continue;
      const int new_age = age + 1;
      if (new_age >= ts[i].deadline) continue;
      if (retention == Retention::eager && rem > ts[i].deadline - new_age) continue;
      out.next.at(i, new_age) = static_cast<std::int16_t>(rem);
    }
  }
  return out;
}

std::int64_t utility(const Taskset& ts, std::span<const ReleaseMask> sigma,
                     std::span<const ScheduleLabel> labels) {
  if (sigma.size() != labels.size())
    fail(errc::invalid_schedule, "schedule and release prefixes have different lengths");
  PendingMatrix m(ts.size(), ts.d_max() - 1);
  std::int64_t total = 0;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    StepResult r = step_matrix(m, sigma[k], labels[k], ts);
    total += r.reward;
    m = std::move(r.next);
  }
  return total;
}

}  // namespace crsched
