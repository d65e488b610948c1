#include "crsched/constraints.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "crsched/errors.hpp"

namespace crsched {

namespace {

ReleaseMask all_inputs(int num_tasks) {
  if (num_tasks > 20) fail(errc::unsupported, "release alphabet too large to enumerate (> 20 tasks)");
  return (1u << num_tasks) - 1u;
}

int slot_workload(const Taskset& ts, ReleaseMask in) {
  int wl = 0;
  for (int i = 0; i < ts.size(); ++i)
    if (in & (1u << i)) wl += ts[i].wcet;
  return wl;
}

void check_task_index(const Taskset& ts, int task) {
  if (task < 0 || task >= ts.size())
    fail(errc::parse, "constraint names task " + std::to_string(task + 1) +
                          " outside the taskset");
}

}  // namespace

SafetyAutomaton universal_safety(int num_tasks) {
  const ReleaseMask all = all_inputs(num_tasks);
  SafetyAutomaton a;
  a.lts.num_tasks = num_tasks;
  a.lts.num_states = 1;
  a.lts.initial = 0;
  for (ReleaseMask in = 0; in <= all; ++in)
    a.lts.transitions.push_back({0, in, 0, kNoOutput, 0, {}});
  a.lts.finalize();
  a.reject = -1;
  return a;
}

LivenessAutomaton universal_liveness(int num_tasks) {
  const ReleaseMask all = all_inputs(num_tasks);
  LivenessAutomaton a;
  a.lts.num_tasks = num_tasks;
  a.lts.num_states = 1;
  a.lts.initial = 0;
  for (ReleaseMask in = 0; in <= all; ++in)
    a.lts.transitions.push_back({0, in, 0, kNoOutput, 0, {}});
  a.lts.finalize();
  a.accept = {1};
  return a;
}

SafetyAutomaton workload_window_safety(const Taskset& ts, int window, int cap) {
  if (window < 1) fail(errc::parse, "workload window must span at least one slot");
  if (cap < 0) fail(errc::parse, "workload cap must be non-negative");
  const ReleaseMask all = all_inputs(ts.size());

  // States: the last window-1 slot workloads (sum <= cap or we would have
  // rejected already), plus one absorbing reject state appended at the end.
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> tuples;
  std::queue<int> work;
  auto intern = [&](std::vector<int> t) {
    auto [it, fresh] = ids.emplace(std::move(t), static_cast<int>(tuples.size()));
    if (fresh) {
      tuples.push_back(it->first);
      work.push(it->second);
    }
    return it->second;
  };

  SafetyAutomaton a;
  a.lts.num_tasks = ts.size();
  a.lts.initial = intern(std::vector<int>(window - 1, 0));
  while (!work.empty()) {
    const int id = work.front();
    work.pop();
    const std::vector<int> tuple = tuples[id];
    for (ReleaseMask in = 0; in <= all; ++in) {
      const int wl = slot_workload(ts, in);
      int sum = wl;
      for (int w : tuple) sum += w;
      if (sum > cap) {
        a.lts.transitions.push_back({id, in, -1, kNoOutput, 0, {}});  // patched to reject below
      } else {
        std::vector<int> next(tuple.begin() + (window > 1 ? 1 : 0), tuple.end());
        if (window > 1) next.push_back(wl);
        a.lts.transitions.push_back({id, in, intern(std::move(next)), kNoOutput, 0, {}});
      }
    }
  }
  a.reject = static_cast<int>(tuples.size());
  a.lts.num_states = a.reject + 1;
  for (LtsTransition& t : a.lts.transitions)
    if (t.to == -1) t.to = a.reject;
  for (ReleaseMask in = 0; in <= all; ++in)
    a.lts.transitions.push_back({a.reject, in, a.reject, kNoOutput, 0, {}});
  for (const auto& tuple : tuples) {
    std::string name;
    for (int w : tuple) name += (name.empty() ? "" : ",") + std::to_string(w);
    a.lts.state_names.push_back(name.empty() ? "-" : name);
  }
  a.lts.state_names.push_back("reject");
  a.lts.finalize();
  return a;
}

SafetyAutomaton sporadic_safety(const Taskset& ts, int task, int period, bool exact_period) {
  check_task_index(ts, task);
  if (period < 1) fail(errc::parse, "sporadicity period must be positive");
  const ReleaseMask all = all_inputs(ts.size());
  const ReleaseMask bit = 1u << task;

  // State 0: task never released; 1..period: slots since the last release
  // (capped); period+1: reject.
  SafetyAutomaton a;
  a.lts.num_tasks = ts.size();
  a.lts.initial = 0;
  a.reject = period + 1;
  a.lts.num_states = period + 2;
  for (int s = 0; s <= period; ++s) {
    for (ReleaseMask in = 0; in <= all; ++in) {
      int to;
      if (in & bit) {
        if (s == 0 || s >= period)
          to = 1;  // fresh start of the gap counter
        else
          to = a.reject;  // released too early
      } else {
        if (s == 0)
          to = 0;
        else if (exact_period && s == period)
          to = a.reject;  // the periodic variant demands a release right now
        else
          to = std::min(s + 1, period);
      }
      a.lts.transitions.push_back({s, in, to, kNoOutput, 0, {}});
    }
  }
  for (ReleaseMask in = 0; in <= all; ++in)
    a.lts.transitions.push_back({a.reject, in, a.reject, kNoOutput, 0, {}});
  a.lts.state_names.push_back("fresh");
  for (int g = 1; g <= period; ++g) a.lts.state_names.push_back("gap=" + std::to_string(g));
  a.lts.state_names.push_back("reject");
  a.lts.finalize();
  return a;
}

LivenessAutomaton inf_often_liveness(const Taskset& ts, int task) {
  check_task_index(ts, task);
  const ReleaseMask all = all_inputs(ts.size());
  const ReleaseMask bit = 1u << task;
  LivenessAutomaton a;
  a.lts.num_tasks = ts.size();
  a.lts.num_states = 2;
  a.lts.initial = 0;
  for (int s = 0; s < 2; ++s)
    for (ReleaseMask in = 0; in <= all; ++in)
      a.lts.transitions.push_back({s, in, (in & bit) ? 1 : 0, kNoOutput, 0, {}});
  a.lts.state_names = {"waiting", "accept"};
  a.lts.finalize();
  a.accept = {0, 1};
  return a;
}

LimitAvgAutomaton mean_workload_limitavg(const Taskset& ts, const Rational& lambda) {
  if (lambda < 0) fail(errc::parse, "mean workload threshold must be non-negative");
  const ReleaseMask all = all_inputs(ts.size());
  LimitAvgAutomaton a;
  a.lts.num_tasks = ts.size();
  a.lts.num_states = 1;
  a.lts.initial = 0;
  for (ReleaseMask in = 0; in <= all; ++in)
    a.lts.transitions.push_back(
        {0, in, 0, kNoOutput, 0, {static_cast<std::int64_t>(slot_workload(ts, in))}});
  a.lts.finalize();
  a.thresholds = {lambda};
  return a;
}

SafetyAutomaton compose_safety(const std::vector<SafetyAutomaton>& parts, int num_tasks,
                               int state_cap) {
  if (parts.empty()) return universal_safety(num_tasks);
  if (parts.size() == 1) return parts[0];
  const ReleaseMask all = all_inputs(num_tasks);

  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> tuples;
  std::queue<int> work;
  auto intern = [&](std::vector<int> t) {
    auto [it, fresh] = ids.emplace(std::move(t), static_cast<int>(tuples.size()));
    if (fresh) {
      if (static_cast<int>(tuples.size()) >= state_cap)
        fail(errc::state_explosion, "safety product exceeded cap");
      tuples.push_back(it->first);
      work.push(it->second);
    }
    return it->second;
  };

  SafetyAutomaton out;
  out.lts.num_tasks = num_tasks;
  std::vector<int> init;
  for (const SafetyAutomaton& p : parts) init.push_back(p.lts.initial);
  out.lts.initial = intern(std::move(init));

  std::vector<LtsTransition> body;
  while (!work.empty()) {
    const int id = work.front();
    work.pop();
    const std::vector<int> tuple = tuples[id];
    for (ReleaseMask in = 0; in <= all; ++in) {
      std::vector<int> next(parts.size());
      bool rejected = false;
      for (std::size_t c = 0; c < parts.size(); ++c) {
        const auto span = parts[c].lts.from(tuple[c]);
        const LtsTransition* hit = nullptr;
        for (const LtsTransition& t : span)
          if (t.input == in) {
            hit = &t;
            break;
          }
        if (!hit) fail(errc::parse, "safety component is not input-enabled");
        next[c] = hit->to;
        rejected = rejected || hit->to == parts[c].reject;
      }
      body.push_back({id, in, rejected ? -1 : intern(std::move(next)), kNoOutput, 0, {}});
    }
  }
  out.reject = static_cast<int>(tuples.size());
  out.lts.num_states = out.reject + 1;
  for (LtsTransition& t : body)
    if (t.to == -1) t.to = out.reject;
  out.lts.transitions = std::move(body);
  for (ReleaseMask in = 0; in <= all; ++in)
    out.lts.transitions.push_back({out.reject, in, out.reject, kNoOutput, 0, {}});
  out.lts.finalize();
  return out;
}

LivenessAutomaton compose_liveness(const std::vector<LivenessAutomaton>& parts, int num_tasks,
                                   int state_cap) {
  if (parts.empty()) return universal_liveness(num_tasks);
  if (parts.size() == 1) return parts[0];
  const ReleaseMask all = all_inputs(num_tasks);
  const int m = static_cast<int>(parts.size());

  // State: component states + (awaited index, fired flag); accepting iff the
  // awaited component accepted on the way in (fired).
  std::map<std::vector<int>, int> ids;  // tuple = [comp states..., awaited, fired]
  std::vector<std::vector<int>> tuples;
  std::queue<int> work;
  auto intern = [&](std::vector<int> t) {
    auto [it, fresh] = ids.emplace(std::move(t), static_cast<int>(tuples.size()));
    if (fresh) {
      if (static_cast<int>(tuples.size()) >= state_cap)
        fail(errc::state_explosion, "liveness product exceeded cap");
      tuples.push_back(it->first);
      work.push(it->second);
    }
    return it->second;
  };

  LivenessAutomaton out;
  out.lts.num_tasks = num_tasks;
  std::vector<int> init;
  for (const LivenessAutomaton& p : parts) init.push_back(p.lts.initial);
  init.push_back(0);  // awaited
  init.push_back(0);  // fired
  out.lts.initial = intern(std::move(init));

  while (!work.empty()) {
    const int id = work.front();
    work.pop();
    const std::vector<int> tuple = tuples[id];
    for (ReleaseMask in = 0; in <= all; ++in) {
      std::vector<int> next(m + 2);
      for (int c = 0; c < m; ++c) {
        const LtsTransition* hit = nullptr;
        for (const LtsTransition& t : parts[c].lts.from(tuple[c]))
          if (t.input == in) {
            hit = &t;
            break;
          }
        if (!hit) fail(errc::parse, "liveness component is not input-enabled");
        next[c] = hit->to;
      }
      const int awaited = tuple[m];
      const bool fired = parts[awaited].accept[next[awaited]] != 0;
      next[m] = fired ? (awaited + 1) % m : awaited;
      next[m + 1] = fired ? 1 : 0;
      out.lts.transitions.push_back({id, in, intern(std::move(next)), kNoOutput, 0, {}});
    }
  }
  out.lts.num_states = static_cast<int>(tuples.size());
  out.accept.resize(tuples.size());
  for (std::size_t s = 0; s < tuples.size(); ++s) out.accept[s] = tuples[s][m + 1] ? 1 : 0;
  out.lts.finalize();
  return out;
}

ConstraintSet build_constraints(const ConstraintSpec& spec, const Taskset& ts, int state_cap) {
  ConstraintSet out;
  std::vector<SafetyAutomaton> safeties;
  for (const ConstraintSpec::Safety& s : spec.safety) {
    if (s.type == "workload_window") {
      safeties.push_back(workload_window_safety(ts, s.window, s.cap));
    } else if (s.type == "sporadic" || s.type == "periodic") {
      safeties.push_back(sporadic_safety(ts, s.task - 1, s.period, s.type == "periodic"));
    } else {
      fail(errc::parse, "unknown safety constraint type '" + s.type + "'");
    }
  }
  out.safety = compose_safety(safeties, ts.size(), state_cap);

  std::vector<LivenessAutomaton> livenesses;
  for (const ConstraintSpec::Liveness& l : spec.liveness) {
    if (l.type == "inf_often") {
      livenesses.push_back(inf_often_liveness(ts, l.task - 1));
    } else {
      fail(errc::parse, "unknown liveness constraint type '" + l.type + "'");
    }
  }
  out.liveness = compose_liveness(livenesses, ts.size(), state_cap);

  for (const ConstraintSpec::LimitAvg& la : spec.limitavg) {
    if (la.type == "mean_workload") {
      out.limitavg.push_back(mean_workload_limitavg(ts, la.lambda));
    } else {
      fail(errc::parse, "unknown limit-average constraint type '" + la.type + "'");
    }
  }
  return out;
}

}  // namespace crsched
