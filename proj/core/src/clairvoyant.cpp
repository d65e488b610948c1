#include "crsched/clairvoyant.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

#include "crsched/errors.hpp"

namespace crsched {

std::string bitstate_string(BitState b, int d_max) {
  std::string s;
  for (int p = 1; p <= d_max; ++p) s += (b >> (p - 1)) & 1 ? '1' : '0';
  return s;
}

KnapsackMemo::KnapsackMemo(const Taskset& ts) {
  for (const Task& t : ts.tasks()) wcets_.push_back(t.wcet);
  std::sort(wcets_.begin(), wcets_.end());
  wcets_.erase(std::unique(wcets_.begin(), wcets_.end()), wcets_.end());
  memo_.push_back(1);  // the empty gap
}

bool KnapsackMemo::gap_fillable(int gap) {
  if (gap < 0) fail(errc::internal, "negative gap length");
  for (int g = static_cast<int>(memo_.size()); g <= gap; ++g) {
    std::int8_t ok = 0;
    for (int c : wcets_) {
      if (c > g) break;
      if (memo_[g - c]) {
        ok = 1;
        break;
      }
    }
    memo_.push_back(ok);
  }
  return memo_[gap] != 0;
}

bool gaps_fillable(BitState b, int d_max, KnapsackMemo& memo) {
  int prev_one = 0;  // 0 = no one seen yet
  for (int p = 1; p <= d_max; ++p) {
    if (!((b >> (p - 1)) & 1)) continue;
    if (prev_one != 0 && p - prev_one > 1 && !memo.gap_fillable(p - prev_one - 1)) return false;
    prev_one = p;
  }
  return true;
}

namespace {

struct RawBuild {
  const std::vector<int>* tasks = nullptr;  // indices sorted by deadline
  const Taskset* ts = nullptr;
  KnapsackMemo* memo = nullptr;
  std::vector<RawChoice>* out = nullptr;
  std::vector<std::pair<int, int>> acc;  // (completion offset, value) so far

  void emit(BitState window, std::int64_t reward) {
    // Windows built by at least one acceptance must keep the current slot
    // busy and leave only fillable gaps; an all-skip window passes as-is.
    if (!acc.empty()) {
      if (!((window >> 0) & 1)) return;
      if (!gaps_fillable(window, ts->d_max(), *memo)) return;
    }
    RawChoice c;
    c.window = window;
    c.reward = reward;
    c.completions = acc;
    std::sort(c.completions.begin(), c.completions.end());
    out->push_back(std::move(c));
  }

  // Chooses the remaining `still_needed` slots of the job of tasks[pos] from
  // free_slots[next_free..]; on the last slot (the rightmost, hence the
  // completion slot) the recursion moves on to the next task.
  void combos(std::size_t pos, const std::vector<int>& free_slots, std::size_t next_free,
              int still_needed, BitState window, std::int64_t reward) {
    const Task& t = (*ts)[(*tasks)[pos]];
    for (std::size_t f = next_free; f < free_slots.size(); ++f) {
      const int p = free_slots[f];
      const BitState w2 = window | (BitState{1} << (p - 1));
      if (still_needed == 1) {
        acc.emplace_back(p, t.value);  // p is the rightmost slot of this job
        rec(pos + 1, w2, p, reward + t.value);
        acc.pop_back();
      } else {
        combos(pos, free_slots, f + 1, still_needed - 1, w2, reward);
      }
    }
  }

  void rec(std::size_t pos, BitState window, int k, std::int64_t reward) {
    if (pos == tasks->size()) {
      emit(window, reward);
      return;
    }
    // Not accepting this task:
    rec(pos + 1, window, k, reward);
    // Accepting it: wcet free slots right of k inside its deadline window.
    const Task& t = (*ts)[(*tasks)[pos]];
    std::vector<int> free_slots;
    for (int p = k + 1; p <= t.deadline; ++p)
      if (!((window >> (p - 1)) & 1)) free_slots.push_back(p);
    if (static_cast<int>(free_slots.size()) >= t.wcet)
      combos(pos, free_slots, 0, t.wcet, window, reward);
  }
};

void dedup_raw(std::vector<RawChoice>& v) {
  std::sort(v.begin(), v.end(), [](const RawChoice& a, const RawChoice& b) {
    return std::tie(a.window, a.reward, a.completions) < std::tie(b.window, b.reward, b.completions);
  });
  v.erase(std::unique(v.begin(), v.end(),
                      [](const RawChoice& a, const RawChoice& b) {
                        return a.window == b.window && a.reward == b.reward &&
                               a.completions == b.completions;
                      }),
          v.end());
}

}  // namespace

std::vector<RawChoice> clairvoyant_successor(const std::vector<int>& tasks, BitState b, int k,
                                             const Taskset& ts, KnapsackMemo& memo) {
  std::vector<RawChoice> out;
  RawBuild rb;
  rb.tasks = &tasks;
  rb.ts = &ts;
  rb.memo = &memo;
  rb.out = &out;
  rb.rec(0, b, k, 0);
  dedup_raw(out);
  return out;
}

std::vector<ClairChoice> clairvoyant_successors(ReleaseMask released, BitState b,
                                                const Taskset& ts, KnapsackMemo& memo) {
  std::vector<int> tasks;
  for (int i = 0; i < ts.size(); ++i)
    if (released & (1u << i)) tasks.push_back(i);
  std::sort(tasks.begin(), tasks.end(), [&](int a, int c) {
    return std::tuple(ts[a].deadline, a) < std::tuple(ts[c].deadline, c);
  });

  std::vector<RawChoice> raw = clairvoyant_successor(tasks, b, 0, ts, memo);
  std::vector<ClairChoice> out;
  out.reserve(raw.size());
  for (RawChoice& r : raw) {
    ClairChoice c;
    // The slot just played is consumed: advance the window by one.
    c.next = r.window >> 1;
    c.reward = r.reward;
    c.completions = std::move(r.completions);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const ClairChoice& a, const ClairChoice& b2) {
    return std::tie(a.next, a.reward, a.completions) < std::tie(b2.next, b2.reward, b2.completions);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Zero-laxity windows are solid prefixes of ones, and a new job fits only
// into an empty window (its deadline window is exactly its own wcet slots).
void zero_laxity_transitions(ClairvoyantLts& out, const Taskset& ts,
                             std::unordered_map<BitState, int>& ids, std::queue<int>& work,
                             int state_cap) {
  auto intern = [&](BitState b) {
    auto [it, fresh] = ids.emplace(b, static_cast<int>(out.states.size()));
    if (fresh) {
      if (static_cast<int>(out.states.size()) >= state_cap)
        fail(errc::state_explosion, "clairvoyant state space exceeded cap");
      out.states.push_back(b);
      work.push(it->second);
    }
    return it->second;
  };
  const ReleaseMask all = (1u << ts.size()) - 1u;
  intern(0);
  while (!work.empty()) {
    const int id = work.front();
    work.pop();
    const BitState b = out.states[id];
    const BitState skipped = b >> 1;  // already a solid prefix; no slide needed
    for (ReleaseMask in = 0; in <= all; ++in) {
      std::vector<std::pair<BitState, std::int64_t>> succ{{skipped, 0}};
      if (b == 0) {
        for (int i = 0; i < ts.size(); ++i) {
          if (!(in & (1u << i))) continue;
          const int c = ts[i].wcet;
          const BitState solid = (c >= 64 ? ~BitState{0} : (BitState{1} << c) - 1) >> 1;
          succ.emplace_back(solid, ts[i].value);
        }
      }
      std::sort(succ.begin(), succ.end());
      succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
      for (auto& [next, reward] : succ) {
        LtsTransition t;
        t.from = id;
        t.input = in;
        t.to = intern(next);
        t.output = kNoOutput;
        t.reward = reward;
        out.lts.transitions.push_back(std::move(t));
      }
    }
  }
}

}  // namespace

ClairvoyantLts build_clairvoyant_lts(const Taskset& ts, int state_cap) {
  if (ts.size() > 20) fail(errc::unsupported, "release alphabet too large to enumerate (> 20 tasks)");
  ClairvoyantLts out;
  out.d_max = ts.d_max();
  out.lts.num_tasks = ts.size();

  std::unordered_map<BitState, int> ids;
  std::queue<int> work;

  if (ts.zero_laxity()) {
    zero_laxity_transitions(out, ts, ids, work, state_cap);
  } else {
    KnapsackMemo memo(ts);
    auto intern = [&](BitState b) {
      auto [it, fresh] = ids.emplace(b, static_cast<int>(out.states.size()));
      if (fresh) {
        if (static_cast<int>(out.states.size()) >= state_cap)
          fail(errc::state_explosion, "clairvoyant state space exceeded cap");
        out.states.push_back(b);
        work.push(it->second);
      }
      return it->second;
    };
    const ReleaseMask all = (1u << ts.size()) - 1u;
    intern(0);
    while (!work.empty()) {
      const int id = work.front();
      work.pop();
      const BitState b = out.states[id];
      for (ReleaseMask in = 0; in <= all; ++in) {
        std::vector<ClairChoice> succ = clairvoyant_successors(in, b, ts, memo);
        // Distinct (state, reward) pairs only: completion profiles are test
        // metadata, not part of the transducer.
        BitState last_next = ~BitState{0};
        std::int64_t last_reward = -1;
        for (const ClairChoice& c : succ) {
          if (c.next == last_next && c.reward == last_reward) continue;
          last_next = c.next;
          last_reward = c.reward;
          LtsTransition t;
          t.from = id;
          t.input = in;
          t.to = intern(c.next);
          t.output = kNoOutput;
          t.reward = c.reward;
          out.lts.transitions.push_back(std::move(t));
        }
      }
    }
  }

  out.lts.num_states = static_cast<int>(out.states.size());
  out.lts.finalize();

  for (const BitState& b : out.states)
    out.lts.state_names.push_back(bitstate_string(b, out.d_max));
  return out;
}

std::uint64_t clairvoyant_state_bound(const Taskset& ts) {
  const int d = ts.d_max();
  const std::uint64_t pow2 = d >= 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << d);
  std::uint64_t ff = 1;
  for (int i = 0; i <= ts.l_max(); ++i) {
    const std::uint64_t factor = static_cast<std::uint64_t>(d - i);
    if (ff > pow2 / std::max<std::uint64_t>(factor, 1) + 1) return pow2;  // would overflow past 2^d
    ff *= factor;
    if (ff >= pow2) return pow2;
  }
  return std::min(pow2, ff);
}

std::vector<int> laxity_index(BitState b, int d_max, int l_max) {
  std::vector<int> idx(l_max + 1, 0);
  int found = 0;
  for (int p = 1; p <= d_max && found <= l_max; ++p)
    if (!((b >> (p - 1)) & 1)) idx[found++] = p;
  return idx;
}

BitState laxity_index_inverse(const std::vector<int>& index, int d_max, int l_max) {
  if (static_cast<int>(index.size()) != l_max + 1)
    fail(errc::malformed_index, "index tuple has the wrong arity");
  int zeros = 0;
  for (int i = 0; i < static_cast<int>(index.size()); ++i) {
    const int p = index[i];
    if (p == 0) {
      // "no such zero" markers may only pad the tail
      for (int j = i; j < static_cast<int>(index.size()); ++j)
        if (index[j] != 0) fail(errc::malformed_index, "zero marker before a position");
      break;
    }
    if (p < 1 || p > d_max) fail(errc::malformed_index, "position out of the window");
    if (i > 0 && index[i - 1] >= p) fail(errc::malformed_index, "positions not increasing");
    ++zeros;
  }

  BitState b = 0;
  if (zeros < l_max + 1) {
    // Fewer zeros than the arity: the window has exactly the listed zeros.
    for (int p = 1; p <= d_max; ++p) b |= BitState{1} << (p - 1);
    for (int i = 0; i < zeros; ++i) b &= ~(BitState{1} << (index[i] - 1));
  } else {
    // Full tuple: ones up to the last listed zero except at the listed
    // positions; nothing may follow the (l_max+1)-th zero.
    const int last = index[zeros - 1];
    for (int p = 1; p < last; ++p) b |= BitState{1} << (p - 1);
    for (int i = 0; i < zeros; ++i) b &= ~(BitState{1} << (index[i] - 1));
  }
  return b;
}

NaiveClairvoyant build_naive_clairvoyant_lts(const Taskset& ts, int state_cap,
                                             Retention retention) {
  if (ts.size() > 20) fail(errc::unsupported, "release alphabet too large to enumerate (> 20 tasks)");
  const int n = ts.size();
  const ReleaseMask all = (1u << n) - 1u;

  NaiveClairvoyant out;
  out.lts.num_tasks = n;

  std::unordered_map<PendingMatrix, int, PendingMatrixHash> ids;
  std::queue<int> work;
  auto intern = [&](PendingMatrix m) {
    auto [it, fresh] = ids.emplace(std::move(m), static_cast<int>(out.states.size()));
    if (fresh) {
      if (static_cast<int>(out.states.size()) >= state_cap)
        fail(errc::state_explosion, "naive clairvoyant state space exceeded cap");
      out.states.push_back(it->first);
      work.push(it->second);
    }
    return it->second;
  };

  intern(PendingMatrix(n, ts.d_max() - 1));
  while (!work.empty()) {
    const int id = work.front();
    work.pop();
    const PendingMatrix m = out.states[id];
    for (ReleaseMask in = 0; in <= all; ++in) {
      // Any pending job may be run, or none; identical outcomes collapse.
      std::vector<ScheduleLabel> labels{ScheduleLabel::make_idle()};
      for (const PendingJob& j : pending_jobs(m, in, ts, false))
        labels.push_back(ScheduleLabel::run(j.task, j.age));
      std::vector<std::pair<int, std::int64_t>> seen;  // (to, reward)
      for (const ScheduleLabel& label : labels) {
        StepResult step = step_matrix(m, in, label, ts, retention);
        const int to = intern(std::move(step.next));
        if (std::find(seen.begin(), seen.end(),
                      std::pair<int, std::int64_t>{to, step.reward}) != seen.end())
          continue;
        seen.emplace_back(to, step.reward);
        LtsTransition t;
        t.from = id;
        t.input = in;
        t.to = to;
        t.output = encode_label(label, ts.d_max());
        t.reward = step.reward;
        out.lts.transitions.push_back(std::move(t));
      }
    }
  }
  out.lts.num_states = static_cast<int>(out.states.size());
  out.lts.finalize();
  return out;
}

}  // namespace crsched
