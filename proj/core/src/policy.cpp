#include "crsched/policy.hpp"

#include <algorithm>
#include <queue>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "crsched/errors.hpp"

namespace crsched {

namespace {

// Selector policies pick the feasible job minimising a key; shared plumbing.
template <typename Key>
ScheduleLabel pick_min(const std::vector<PendingJob>& jobs, Key key) {
  if (jobs.empty()) return ScheduleLabel::make_idle();
  const PendingJob* best = &jobs[0];
  for (const PendingJob& j : jobs)
    if (key(j) < key(*best)) best = &j;
  return ScheduleLabel::run(best->task, best->age);
}

struct EdfPolicy final : Policy {
  std::string name() const override { return "edf"; }
  ScheduleLabel choose(const std::vector<PendingJob>& jobs, const Taskset&) const override {
    return pick_min(jobs, [](const PendingJob& j) { return std::tuple(j.slots_left, j.task, -j.age); });
  }
};

struct SrtPolicy final : Policy {
  std::string name() const override { return "srt"; }
  ScheduleLabel choose(const std::vector<PendingJob>& jobs, const Taskset&) const override {
    return pick_min(jobs, [](const PendingJob& j) { return std::tuple(j.rem, j.task, -j.age); });
  }
};

struct SpPolicy final : Policy {
  std::string name() const override { return "sp"; }
  ScheduleLabel choose(const std::vector<PendingJob>& jobs, const Taskset&) const override {
    return pick_min(jobs, [](const PendingJob& j) { return std::tuple(j.task, -j.age); });
  }
};

struct FifoPolicy final : Policy {
  std::string name() const override { return "fifo"; }
  ScheduleLabel choose(const std::vector<PendingJob>& jobs, const Taskset&) const override {
    return pick_min(jobs, [](const PendingJob& j) { return std::tuple(-j.age, j.task); });
  }
};

struct Td1Policy final : Policy {
  std::string name() const override { return "td1"; }
  ScheduleLabel choose(const std::vector<PendingJob>& jobs, const Taskset& ts) const override {
    if (jobs.empty()) return ScheduleLabel::make_idle();

    // The job being worked on, if any: most progress, then usual tie order.
    const PendingJob* current = nullptr;
    for (const PendingJob& j : jobs) {
      const int done = ts[j.task].wcet - j.rem;
      if (done <= 0) continue;
      if (!current || done > ts[current->task].wcet - current->rem) current = &j;
    }

    // Most valuable of this slot's arrivals, the only preemption candidates.
    const PendingJob* newcomer = nullptr;
    for (const PendingJob& j : jobs) {
      if (j.age != 0) continue;
      if (!newcomer || ts[j.task].value > ts[newcomer->task].value) newcomer = &j;
    }

    if (current) {
      // Preempt (permanently abandoning the current job) only when the
      // newcomer's value plus the value-equivalent of the work already sunk
      // into the current job exceeds four times the current job's value:
      //   V_new + V_cur * done / C_cur > 4 * V_cur,
      // cross-multiplied by C_cur to stay in integers. The protection
      // threshold shrinks as the job nears completion, yet a task can never
      // be displaced by its own kind (done < C_cur keeps the left side
      // short of the bound when V_new = V_cur), which rules out livelock
      // under adversarial re-releases.
      if (newcomer) {
        const Task& c = ts[current->task];
        const std::int64_t done = c.wcet - current->rem;
        const std::int64_t lhs =
            static_cast<std::int64_t>(ts[newcomer->task].value) * c.wcet +
            static_cast<std::int64_t>(c.value) * done;
        if (lhs > 4ll * c.value * c.wcet)
          return ScheduleLabel::run(newcomer->task, newcomer->age);
      }
      return ScheduleLabel::run(current->task, current->age);
    }
    // Idle processor: grab the most valuable feasible job.
    return pick_min(jobs, [&](const PendingJob& j) {
      return std::tuple(-ts[j.task].value, j.task, -j.age);
    });
  }
};

}  // namespace

std::unique_ptr<Policy> make_policy(const std::string& name) {
  if (name == "edf") return std::make_unique<EdfPolicy>();
  if (name == "srt") return std::make_unique<SrtPolicy>();
  if (name == "sp") return std::make_unique<SpPolicy>();
  if (name == "fifo") return std::make_unique<FifoPolicy>();
  if (name == "td1") return std::make_unique<Td1Policy>();
  fail(errc::unsupported, "unknown policy '" + name + "'");
}

std::vector<std::string> builtin_policy_names() { return {"edf", "srt", "sp", "fifo", "td1"}; }

OnlineLts build_online_lts(const Taskset& ts, const Policy& policy, OnlineOptions opts) {
  const int n = ts.size();
  if (n > 20) fail(errc::unsupported, "release alphabet too large to enumerate (> 20 tasks)");
  const ReleaseMask all = (1u << n) - 1u;

  OnlineLts out;
  out.lts.num_tasks = n;

  std::unordered_map<PendingMatrix, int, PendingMatrixHash> ids;
  std::queue<int> work;
  auto intern = [&](PendingMatrix m) {
    auto [it, fresh] = ids.emplace(std::move(m), static_cast<int>(out.states.size()));
    if (fresh) {
      if (static_cast<int>(out.states.size()) >= opts.state_cap)
        fail(errc::state_explosion,
             "scheduler state space exceeded " + std::to_string(opts.state_cap) + " states");
      out.states.push_back(it->first);
      work.push(it->second);
    }
    return it->second;
  };

  out.lts.initial = intern(PendingMatrix(n, ts.d_max() - 1));
  while (!work.empty()) {
    const int id = work.front();
    work.pop();
    const PendingMatrix m = out.states[id];  // copy: out.states grows below
    for (ReleaseMask in = 0; in <= all; ++in) {
      const ScheduleLabel label = policy.choose(pending_jobs(m, in, ts, true), ts);
      StepResult step = step_matrix(m, in, label, ts, opts.retention);
      LtsTransition t;
      t.from = id;
      t.input = in;
      t.to = intern(std::move(step.next));
      t.output = encode_label(label, ts.d_max());
      t.reward = step.reward;
      out.lts.transitions.push_back(std::move(t));
    }
  }
  out.lts.num_states = static_cast<int>(out.states.size());
  out.lts.finalize();
  if (opts.prune_unschedulable) return prune_unschedulable_jobs(out, ts);
  return out;
}

namespace {

// Is the job of `task` at `age` in `state` run anywhere, on any branch,
// before its deadline passes? Bounded breadth-first search over
// (state, job age) pairs.
bool ever_scheduled(const Lts& lts, int state, int task, int age, int deadline, int d_max) {
  std::unordered_set<std::int64_t> seen;
  std::queue<std::pair<int, int>> work;
  work.emplace(state, age);
  seen.insert(static_cast<std::int64_t>(state) * 64 + age);
  while (!work.empty()) {
    auto [s, a] = work.front();
    work.pop();
    if (a >= deadline) continue;  // job expired before this point
    for (const LtsTransition& t : lts.from(s)) {
      const ScheduleLabel out = decode_label(t.output, d_max);
      if (!out.idle() && out.task == task && out.age == a) return true;
      const std::int64_t key = static_cast<std::int64_t>(t.to) * 64 + (a + 1);
      if (a + 1 < deadline && seen.insert(key).second) work.emplace(t.to, a + 1);
    }
  }
  return false;
}

}  // namespace

OnlineLts prune_unschedulable_jobs(const OnlineLts& online, const Taskset& ts) {
  if (online.states.empty())
    fail(errc::unsupported, "prune_unschedulable_jobs needs pending-matrix state annotations");

  OnlineLts cur = online;
  while (true) {
    // Reduce every state independently: drop entries no run will ever touch.
    std::vector<PendingMatrix> reduced(cur.states.size());
    bool changed = false;
    for (std::size_t s = 0; s < cur.states.size(); ++s) {
      PendingMatrix m = cur.states[s];
      for (int i = 0; i < m.tasks; ++i) {
        for (int age = 1; age <= m.ages; ++age) {
          if (m.at(i, age) == 0) continue;
          if (!ever_scheduled(cur.lts, static_cast<int>(s), i, age, ts[i].deadline, ts.d_max())) {
            m.at(i, age) = 0;
            changed = true;
          }
        }
      }
      reduced[s] = std::move(m);
    }
    if (!changed) return cur;

    // Rebuild: states with the same reduced matrix merge; their outgoing
    // pictures must agree or the reduction premise is broken.
    std::unordered_map<PendingMatrix, int, PendingMatrixHash> ids;
    OnlineLts next;
    next.lts.num_tasks = cur.lts.num_tasks;
    std::vector<int> remap(cur.states.size(), -1);
    for (std::size_t s = 0; s < cur.states.size(); ++s) {
      auto [it, fresh] = ids.emplace(reduced[s], static_cast<int>(next.states.size()));
      if (fresh) next.states.push_back(it->first);
      remap[s] = it->second;
    }
    next.lts.num_states = static_cast<int>(next.states.size());
    next.lts.initial = remap[cur.lts.initial];
    std::vector<char> emitted(next.states.size(), 0);
    std::vector<std::vector<LtsTransition>> rep(next.states.size());
    for (std::size_t s = 0; s < cur.states.size(); ++s) {
      std::vector<LtsTransition> mine;
      for (const LtsTransition& t : cur.lts.from(static_cast<int>(s))) {
        LtsTransition r = t;
        r.from = remap[s];
        r.to = remap[t.to];
        mine.push_back(std::move(r));
      }
      std::sort(mine.begin(), mine.end(), [](const LtsTransition& a, const LtsTransition& b) {
        return std::tuple(a.input, a.to, a.output) < std::tuple(b.input, b.to, b.output);
      });
      const int ns = remap[s];
      if (!emitted[ns]) {
        emitted[ns] = 1;
        rep[ns] = std::move(mine);
      } else {
        // Representative disagreement would mean we merged two states with
        // observably different behaviour — the reduction would be unsound.
        if (rep[ns].size() != mine.size())
          fail(errc::internal, "unschedulable-job merge changed observable behaviour");
        for (std::size_t i = 0; i < mine.size(); ++i) {
          const LtsTransition &a = rep[ns][i], &b = mine[i];
          if (a.input != b.input || a.to != b.to || a.output != b.output || a.reward != b.reward)
            fail(errc::internal, "unschedulable-job merge changed observable behaviour");
        }
      }
    }
    for (auto& bucket : rep)
      for (LtsTransition& t : bucket) next.lts.transitions.push_back(std::move(t));
    next.lts.finalize();

    // Drop states that became unreachable after merging.
    std::vector<char> reach(next.states.size(), 0);
    std::queue<int> bfs;
    bfs.push(next.lts.initial);
    reach[next.lts.initial] = 1;
    while (!bfs.empty()) {
      const int s = bfs.front();
      bfs.pop();
      for (const LtsTransition& t : next.lts.from(s))
        if (!reach[t.to]) {
          reach[t.to] = 1;
          bfs.push(t.to);
        }
    }
    if (std::count(reach.begin(), reach.end(), 1) != static_cast<int>(next.states.size())) {
      OnlineLts packed;
      packed.lts.num_tasks = next.lts.num_tasks;
      std::vector<int> pack(next.states.size(), -1);
      for (std::size_t s = 0; s < next.states.size(); ++s)
        if (reach[s]) {
          pack[s] = static_cast<int>(packed.states.size());
          packed.states.push_back(next.states[s]);
        }
      packed.lts.num_states = static_cast<int>(packed.states.size());
      packed.lts.initial = pack[next.lts.initial];
      for (const LtsTransition& t : next.lts.transitions)
        if (pack[t.from] >= 0 && pack[t.to] >= 0) {
          LtsTransition r = t;
          r.from = pack[t.from];
          r.to = pack[t.to];
          packed.lts.transitions.push_back(std::move(r));
        }
      packed.lts.finalize();
      next = std::move(packed);
    }
    cur = std::move(next);
  }
}

PolicyRun run_policy(const Taskset& ts, const Policy& policy,
                     std::span<const ReleaseMask> sigma) {
  PolicyRun run;
  PendingMatrix m(ts.size(), ts.d_max() - 1);
  for (ReleaseMask in : sigma) {
    const ScheduleLabel label = policy.choose(pending_jobs(m, in, ts, true), ts);
    StepResult step = step_matrix(m, in, label, ts);
    run.labels.push_back(label);
    run.rewards.push_back(step.reward);
    run.total += step.reward;
    m = std::move(step.next);
  }
  return run;
}

}  // namespace crsched
