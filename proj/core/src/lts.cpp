#include "crsched/lts.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

#include "crsched/errors.hpp"

namespace crsched {

std::int32_t encode_label(ScheduleLabel label, int d_max) {
  if (label.idle()) return kIdleOutput;
  return label.task * d_max + label.age;
}

ScheduleLabel decode_label(std::int32_t encoded, int d_max) {
  if (encoded == kIdleOutput || encoded == kNoOutput) return ScheduleLabel::make_idle();
  return ScheduleLabel::run(encoded / d_max, encoded % d_max);
}

void Lts::finalize() {
  std::sort(transitions.begin(), transitions.end(),
            [](const LtsTransition& a, const LtsTransition& b) {
              if (a.from != b.from) return a.from < b.from;
              if (a.input != b.input) return a.input < b.input;
              return a.to < b.to;
            });
  state_offset_.assign(num_states + 1, 0);
  for (const LtsTransition& t : transitions) {
    if (t.from < 0 || t.from >= num_states || t.to < 0 || t.to >= num_states)
      fail(errc::internal, "transition endpoint out of range");
    ++state_offset_[t.from + 1];
  }
  for (int s = 0; s < num_states; ++s) state_offset_[s + 1] += state_offset_[s];
}

std::span<const LtsTransition> Lts::from(int state) const {
  if (state_offset_.empty()) fail(errc::internal, "Lts::finalize() was not called");
  return {transitions.data() + state_offset_[state],
          transitions.data() + state_offset_[state + 1]};
}

bool Lts::deterministic() const {
  for (int s = 0; s < num_states; ++s) {
    const auto span = from(s);
    for (std::size_t i = 1; i < span.size(); ++i)
      if (span[i].input == span[i - 1].input) return false;
  }
  return true;
}

bool Lts::input_enabled(std::string* why) const {
  if (num_tasks > kMaxTasks) fail(errc::unsupported, "too many tasks for input enumeration");
  const ReleaseMask all = (num_tasks == 0) ? 0u : ((1u << num_tasks) - 1u);
  for (int s = 0; s < num_states; ++s) {
    std::vector<char> seen(all + 1, 0);
    for (const LtsTransition& t : from(s)) {
      if (t.input > all) {
        if (why) *why = "state " + state_label(s) + " consumes an out-of-range release set";
        return false;
      }
      seen[t.input] = 1;
    }
    for (ReleaseMask in = 0; in <= all; ++in) {
      if (!seen[in]) {
        if (why)
          *why = "state " + state_label(s) + " has no transition for release set " +
                 std::to_string(in);
        return false;
      }
    }
  }
  return true;
}

std::string Lts::state_label(int state) const {
  if (state >= 0 && state < static_cast<int>(state_names.size()) && !state_names[state].empty())
    return state_names[state];
  return "#" + std::to_string(state);
}

namespace {

struct TupleHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 1469598103u;
    for (int x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
    return h;
  }
};

}  // namespace

Lts synchronous_product(std::span<const Lts* const> components, int state_cap,
                        std::vector<std::vector<int>>* tuples_out) {
  if (components.empty()) fail(errc::internal, "synchronous product of zero components");
  const int k = static_cast<int>(components.size());
  const int num_tasks = components[0]->num_tasks;
  for (const Lts* c : components)
    if (c->num_tasks != num_tasks)
      fail(errc::parse, "synchronous product components disagree on the task alphabet");

  Lts out;
  out.num_tasks = num_tasks;

  std::unordered_map<std::vector<int>, int, TupleHash> ids;
  std::vector<std::vector<int>> tuples;
  std::queue<int> work;
  auto intern = [&](const std::vector<int>& tuple) {
    auto [it, fresh] = ids.emplace(tuple, static_cast<int>(tuples.size()));
    if (fresh) {
      if (static_cast<int>(tuples.size()) >= state_cap)
        fail(errc::state_explosion,
             "synchronous product exceeded " + std::to_string(state_cap) + " states");
      tuples.push_back(tuple);
      work.push(it->second);
    }
    return it->second;
  };

  std::vector<int> init(k);
  for (int c = 0; c < k; ++c) init[c] = components[c]->initial;
  out.initial = intern(init);

  // Joint moves per release set: the running cartesian product of every
  // component's transitions for that input.
  while (!work.empty()) {
    const int id = work.front();
    work.pop();
    const std::vector<int> tuple = tuples[id];  // copy: tuples grows below

    // Group component transitions by input on the fly: iterate over the first
    // component's transitions and match the rest.
    std::vector<std::span<const LtsTransition>> spans(k);
    for (int c = 0; c < k; ++c) spans[c] = components[c]->from(tuple[c]);

    for (const LtsTransition& t0 : spans[0]) {
      // Collect per-component candidate lists for t0.input.
      std::vector<std::vector<const LtsTransition*>> cands(k);
      cands[0] = {&t0};
      bool ok = true;
      for (int c = 1; c < k && ok; ++c) {
        for (const LtsTransition& t : spans[c])
          if (t.input == t0.input) cands[c].push_back(&t);
        ok = !cands[c].empty();
      }
      if (!ok) continue;

      std::vector<std::size_t> pick(k, 0);
      while (true) {
        LtsTransition joint;
        joint.from = id;
        joint.input = t0.input;
        joint.output = t0.output;
        joint.reward = t0.reward;
        joint.weights = t0.weights;
        std::vector<int> next(k);
        for (int c = 0; c < k; ++c) {
          const LtsTransition* t = cands[c][pick[c]];
          next[c] = t->to;
          if (c > 0) {
            joint.weights.push_back(t->reward);
            joint.weights.insert(joint.weights.end(), t->weights.begin(), t->weights.end());
          }
        }
        joint.to = intern(next);
        out.transitions.push_back(std::move(joint));

        int c = k - 1;
        for (; c > 0; --c) {  // pick[0] is pinned to t0
          if (++pick[c] < cands[c].size()) break;
          pick[c] = 0;
        }
        if (c == 0) break;
      }
    }
  }

  out.num_states = static_cast<int>(tuples.size());
  out.finalize();
  if (tuples_out) *tuples_out = std::move(tuples);
  return out;
}

}  // namespace crsched
