#include <random>

#include "crsched/errors.hpp"
#include "crsched/io.hpp"
#include "crsched/lts.hpp"
#include "crsched/pending.hpp"
#include "crsched/task.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace crsched;

TEST_SUITE_BEGIN("model");

TEST_CASE("taskset validates its parameters") {
  CHECK_THROWS_AS(Taskset(std::vector<Task>{}), error);
  CHECK_THROWS_AS(Taskset({{0, 1, 1}}), error);   // wcet must be positive
  CHECK_THROWS_AS(Taskset({{1, 0, 1}}), error);   // deadline must be positive
  CHECK_THROWS_AS(Taskset({{1, 1, 0}}), error);   // value must be positive
  CHECK_THROWS_AS(Taskset({{3, 2, 1}}), error);   // wcet > deadline can never finish
  CHECK_THROWS_AS(Taskset({{1, kMaxDeadline + 1, 1}}), error);

  const Taskset ts({{1, 2, 3}, {2, 3, 2}, {1, 6, 1}});
  CHECK(ts.size() == 3);
  CHECK(ts.d_max() == 6);
  CHECK(ts.l_max() == 5);
  CHECK(ts.total_value() == 6);
  CHECK_FALSE(ts.zero_laxity());
  CHECK(ts[1].laxity() == 1);
}

TEST_CASE("zero-laxity family sets c = d = v") {
  const Taskset ts = zero_laxity_taskset({1, 2, 3});
  CHECK(ts.size() == 3);
  CHECK(ts.zero_laxity());
  for (int i = 0; i < ts.size(); ++i) {
    CHECK(ts[i].wcet == ts[i].deadline);
    CHECK(ts[i].wcet == ts[i].value);
  }
  CHECK(ts.d_max() == 3);
  CHECK(ts.l_max() == 0);
}

TEST_CASE("importance ratio matches the published per-set factors") {
  // Each Ai data file carries the taskset whose importance ratio is known.
  const std::pair<const char*, int> expected[] = {
      {"A1", 6}, {"A2", 5}, {"A3", 4}, {"A4", 3}, {"A5", 4}, {"A6", 5}};
  for (const auto& [name, k] : expected) {
    const Taskset ts =
        load_taskset(testing::data_file(std::string("tasksets/") + name + ".json"));
    CHECK_MESSAGE(importance_ratio(ts) == Rational(k), name);
  }
  CHECK(importance_ratio(zero_laxity_taskset({1, 2, 3})) == Rational(1));
}

TEST_CASE("pending jobs merge releases and filter infeasible work") {
  const Taskset ts({{2, 4, 5}, {1, 2, 1}});
  PendingMatrix m(2, 3);
  m.at(0, 2) = 1;  // task 0 released two slots ago, one slot of work left
  m.at(1, 1) = 1;  // task 1 released last slot, due by the end of this slot

  auto jobs = pending_jobs(m, /*released=*/0b10, ts, /*feasible_only=*/false);
  REQUIRE(jobs.size() == 3);
  // (task, age) order: the new task-1 job at age 0 sorts before the old one.
  CHECK(jobs[0].task == 0);
  CHECK(jobs[0].age == 2);
  CHECK(jobs[0].rem == 1);
  CHECK(jobs[0].slots_left == 2);
  CHECK(jobs[1].task == 1);
  CHECK(jobs[1].age == 0);
  CHECK(jobs[2].task == 1);
  CHECK(jobs[2].age == 1);
  CHECK(jobs[2].slots_left == 1);
  CHECK(jobs[2].feasible());

  // One slot later the old task-1 job would be infeasible and filtered.
  PendingMatrix m2(2, 3);
  m2.at(1, 1) = 1;
  m2.at(0, 1) = 2;  // freshly released task 0, untouched
  auto all = pending_jobs(m2, 0, ts, false);
  auto feasible = pending_jobs(m2, 0, ts, true);
  CHECK(all.size() == 2);
  CHECK(feasible.size() == 2);  // both can still make it
  PendingMatrix m3(2, 3);
  m3.at(0, 3) = 2;  // two slots of work, one slot to the deadline
  CHECK(pending_jobs(m3, 0, ts, false).size() == 1);
  CHECK(pending_jobs(m3, 0, ts, true).empty());
}

TEST_CASE("step semantics: run, complete, age out") {
  const Taskset ts({{2, 3, 5}});
  PendingMatrix m(1, 2);

  // Release and run the job for its two slots; the value pays on the second.
  auto s1 = step_matrix(m, 0b1, ScheduleLabel::run(0, 0), ts);
  CHECK(s1.reward == 0);
  CHECK_FALSE(s1.completed);
  CHECK(s1.next.at(0, 1) == 1);

  auto s2 = step_matrix(s1.next, 0, ScheduleLabel::run(0, 1), ts);
  CHECK(s2.reward == 5);
  CHECK(s2.completed);
  CHECK(s2.next.empty_all());

  // Idling ages the job; after the deadline passes it is dropped unpaid.
  auto i1 = step_matrix(m, 0b1, ScheduleLabel::make_idle(), ts);
  CHECK(i1.reward == 0);
  CHECK(i1.next.at(0, 1) == 2);
  auto i2 = step_matrix(i1.next, 0, ScheduleLabel::make_idle(), ts);
  CHECK(i2.next.at(0, 2) == 2);
  auto i3 = step_matrix(i2.next, 0, ScheduleLabel::make_idle(), ts);
  CHECK(i3.next.empty_all());

  // Labels must name a pending job.
  CHECK_THROWS_AS(step_matrix(m, 0, ScheduleLabel::run(0, 0), ts), error);
  CHECK_THROWS_AS(step_matrix(m, 0b1, ScheduleLabel::run(0, 1), ts), error);
}

TEST_CASE("lazy and eager retention pay the same rewards") {
  // Doomed entries differ in representation only: an eager matrix zeroes
  // them immediately, a lazy one keeps them until the deadline passes.
  const Taskset ts({{2, 3, 4}, {1, 2, 1}});
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> release(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    PendingMatrix lazy(2, 2), eager(2, 2);
    for (int slot = 0; slot < 12; ++slot) {
      const ReleaseMask rel = static_cast<ReleaseMask>(release(rng));
      // Pick any feasible job (or idle) - the view both retentions agree on.
      const auto jobs = pending_jobs(eager, rel, ts, true);
      ScheduleLabel label = ScheduleLabel::make_idle();
      if (!jobs.empty()) {
        const auto& j = jobs[static_cast<std::size_t>(rng()) % jobs.size()];
        label = ScheduleLabel::run(j.task, j.age);
      }
      auto sl = step_matrix(lazy, rel, label, ts, Retention::lazy);
      auto se = step_matrix(eager, rel, label, ts, Retention::eager);
      CHECK(sl.reward == se.reward);
      CHECK(sl.completed == se.completed);
      lazy = sl.next;
      eager = se.next;
      // Every eager entry is feasible or empty; lazy may keep doomed ones.
      for (int t = 0; t < 2; ++t)
        for (int age = 1; age <= 2; ++age)
          if (eager.at(t, age) != 0) CHECK(eager.at(t, age) == lazy.at(t, age));
    }
  }
}

TEST_CASE("utility accumulates per-slot rewards") {
  const Taskset ts({{1, 1, 3}, {1, 2, 3}, {1, 1, 1}});
  const std::vector<ReleaseMask> sigma = {0b111, 0b010, 0b000};
  const std::vector<ScheduleLabel> labels = {
      ScheduleLabel::run(0, 0), ScheduleLabel::run(1, 0), ScheduleLabel::make_idle()};
  // Slot 1 completes task 0 (+3); slot 2 completes the new task-1 job (+3);
  // the first task-1 job and the task-2 job expire unpaid.
  CHECK(utility(ts, sigma, labels) == 6);

  const std::vector<ScheduleLabel> bad = {
      ScheduleLabel::run(2, 1), ScheduleLabel::make_idle(), ScheduleLabel::make_idle()};
  CHECK_THROWS_AS(utility(ts, sigma, bad), error);
}

TEST_CASE("schedule labels encode and decode") {
  const int d_max = 6;
  for (int task = 0; task < 4; ++task)
    for (int age = 0; age < d_max; ++age) {
      const ScheduleLabel l = ScheduleLabel::run(task, age);
      CHECK(decode_label(encode_label(l, d_max), d_max) == l);
    }
  CHECK(decode_label(encode_label(ScheduleLabel::make_idle(), d_max), d_max).idle());
  CHECK(encode_label(ScheduleLabel::make_idle(), d_max) == kIdleOutput);
}

TEST_SUITE_END();
