#include <map>
#include <random>
#include <set>

#include "crsched/clairvoyant.hpp"
#include "crsched/errors.hpp"
#include "crsched/io.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace crsched;

namespace {

// Independent coin-problem oracle: can `gap` be written as a non-negative
// integer combination of the wcets?
bool brute_fillable(int gap, const std::vector<int>& wcets) {
  std::vector<char> ok(gap + 1, 0);
  ok[0] = 1;
  for (int g = 1; g <= gap; ++g)
    for (int c : wcets)
      if (c <= g && ok[g - c]) ok[g] = 1;
  return ok[gap];
}

// Best achievable utility per LTS state after a release prefix, by forward
// dynamic programming over the (non-deterministic) transition relation.
using BestByState = std::map<int, std::int64_t>;

BestByState dp_step(const Lts& lts, const BestByState& cur, ReleaseMask rel) {
  BestByState next;
  for (const auto& [state, best] : cur)
    for (const LtsTransition& t : lts.from(state)) {
      if (t.input != rel) continue;
      const std::int64_t u = best + t.reward;
      auto [it, fresh] = next.emplace(t.to, u);
      if (!fresh && u > it->second) it->second = u;
    }
  return next;
}

// Best utility reachable from each state via `slots` empty-release slots.
// The optimized clairvoyant banks value at allocation, the naive oracle at
// completion; giving both a d_max tail of empty slots lets every accepted
// job finish, so their optima coincide prefix by prefix.
std::vector<std::int64_t> empty_tail_value(const Lts& lts, int slots) {
  std::vector<std::int64_t> val(lts.num_states, 0);
  for (int round = 0; round < slots; ++round) {
    std::vector<std::int64_t> next(lts.num_states, 0);
    for (int s = 0; s < lts.num_states; ++s)
      for (const LtsTransition& t : lts.from(s))
        if (t.input == 0) next[s] = std::max(next[s], t.reward + val[t.to]);
    val = std::move(next);
  }
  return val;
}

std::int64_t padded_best(const Lts& lts, const BestByState& cur,
                         const std::vector<std::int64_t>& tail) {
  std::int64_t best = 0;
  for (const auto& [state, u] : cur) best = std::max(best, u + tail[state]);
  return best;
}

// Compares the optimized and naive clairvoyant optima on every release
// prefix up to `depth`, walking the prefix tree once.
void compare_exhaustively(const Taskset& ts, int depth) {
  const ClairvoyantLts fast = build_clairvoyant_lts(ts);
  const NaiveClairvoyant slow = build_naive_clairvoyant_lts(ts);
  const auto fast_tail = empty_tail_value(fast.lts, ts.d_max());
  const auto slow_tail = empty_tail_value(slow.lts, ts.d_max());
  const ReleaseMask all = (1u << ts.size()) - 1u;

  std::int64_t compared = 0;
  auto walk = [&](auto&& self, const BestByState& f, const BestByState& s, int left) -> void {
    REQUIRE(padded_best(fast.lts, f, fast_tail) == padded_best(slow.lts, s, slow_tail));
    ++compared;
    if (left == 0) return;
    for (ReleaseMask rel = 0; rel <= all; ++rel)
      self(self, dp_step(fast.lts, f, rel), dp_step(slow.lts, s, rel), left - 1);
  };
  walk(walk, {{fast.lts.initial, 0}}, {{slow.lts.initial, 0}}, depth);
  CHECK(compared > 1);
}

}  // namespace

TEST_SUITE_BEGIN("clairvoyant");

TEST_CASE("knapsack gaps against the brute-force coin oracle") {
  const std::vector<std::vector<int>> families = {{2}, {2, 3}, {3, 5}, {1}, {4, 6, 9}};
  for (const auto& wcets : families) {
    std::vector<Task> tasks;
    for (int c : wcets) tasks.push_back({c, kMaxDeadline, 1});
    KnapsackMemo memo{Taskset(tasks)};
    for (int gap = 0; gap <= 25; ++gap)
      CHECK_MESSAGE(memo.gap_fillable(gap) == brute_fillable(gap, wcets),
                    "gap " << gap << " wcets[0]=" << wcets[0]);
  }
  // The documented corner cases.
  KnapsackMemo twos{Taskset({{2, 4, 1}})};
  CHECK_FALSE(twos.gap_fillable(3));
  CHECK(twos.gap_fillable(4));
  CHECK(twos.gap_fillable(0));
}

TEST_CASE("internal gaps of a window must be exactly packable") {
  const Taskset ts({{2, 6, 1}});
  KnapsackMemo memo{ts};
  const int d = 6;
  auto bits = [](std::initializer_list<int> slots) {
    BitState b = 0;
    for (int s : slots) b |= BitState{1} << (s - 1);
    return b;
  };
  CHECK(gaps_fillable(bits({1, 4}), d, memo));         // gap of 2, one job fits
  CHECK_FALSE(gaps_fillable(bits({1, 5}), d, memo));   // gap of 3, unfillable with 2s
  CHECK(gaps_fillable(bits({1}), d, memo));            // trailing zeros are not gaps
  CHECK(gaps_fillable(bits({1, 2, 5, 6}), d, memo));   // gap of 2 between runs
  CHECK(gaps_fillable(0, d, memo));                    // empty window
}

TEST_CASE("successor choices for a one-task window") {
  // Releasing (1,2,1) into an empty window allows exactly two commitments:
  // skip the job, or run it in the very next slot. Both land in the empty
  // window again after the slot is consumed; only the reward differs.
  const Taskset ts({{1, 2, 1}});
  KnapsackMemo memo{ts};
  auto choices = clairvoyant_successors(/*released=*/0b1, /*b=*/0, ts, memo);
  REQUIRE(choices.size() == 2);
  std::set<std::pair<BitState, std::int64_t>> got;
  for (const auto& c : choices) got.insert({c.next, c.reward});
  CHECK(got == std::set<std::pair<BitState, std::int64_t>>{{0, 0}, {0, 1}});
  for (const auto& c : choices)
    if (c.reward == 1) {
      REQUIRE(c.completions.size() == 1);
      CHECK(c.completions[0] == std::pair{1, 1});
    }
}

TEST_CASE("empty release sets only advance the window") {
  const Taskset ts({{1, 2, 3}, {2, 3, 2}});
  KnapsackMemo memo{ts};
  const ClairvoyantLts clair = build_clairvoyant_lts(ts);
  for (BitState b : clair.states) {
    auto choices = clairvoyant_successors(0, b, ts, memo);
    REQUIRE(choices.size() == 1);
    CHECK(choices[0].next == b >> 1);
    CHECK(choices[0].reward == 0);
    CHECK(choices[0].completions.empty());
  }
}

TEST_CASE("no duplicate choices and no idle-while-loaded windows") {
  const Taskset ts({{1, 3, 2}, {2, 4, 1}});
  KnapsackMemo memo{ts};
  const ClairvoyantLts clair = build_clairvoyant_lts(ts);
  for (BitState b : clair.states)
    for (ReleaseMask rel = 0; rel < 4; ++rel) {
      const auto choices = clairvoyant_successors(rel, b, ts, memo);
      CHECK(!choices.empty());  // input-enabled: skipping everything is allowed
      std::set<std::pair<BitState, std::int64_t>> seen;
      for (const auto& c : choices) {
        CHECK(seen.insert({c.next, c.reward}).second);  // emitted exactly once
        // Rewards are sums over accepted jobs of this release set.
        std::int64_t cap = 0;
        for (int i = 0; i < ts.size(); ++i)
          if (rel & (1u << i)) cap += ts[i].value;
        CHECK(c.reward >= 0);
        CHECK(c.reward <= cap);
      }
    }
  // Reachable windows keep the invariant: empty, or busy in slot 1.
  for (BitState b : clair.states) CHECK((b == 0 || (b & 1)));
}

TEST_CASE("zero-laxity windows are solid prefixes") {
  const Taskset ts = zero_laxity_taskset({1, 2, 3});
  const ClairvoyantLts clair = build_clairvoyant_lts(ts);
  CHECK(clair.d_max == 3);
  CHECK(clair.states.size() <= clairvoyant_state_bound(ts));
  for (BitState b : clair.states) CHECK((b & (b + 1)) == 0);  // 0, 1, 11, 111, ...
  std::string why;
  CHECK_MESSAGE(clair.lts.input_enabled(&why), why);
}

TEST_CASE("state bound and laxity index over the shipped tasksets") {
  const char* names[] = {"C1", "C2", "C3", "A2", "A4", "workload-figure"};
  for (const char* name : names) {
    const Taskset ts =
        load_taskset(testing::data_file(std::string("tasksets/") + name + ".json"));
    const ClairvoyantLts clair = build_clairvoyant_lts(ts);
    CHECK_MESSAGE(clair.states.size() <= clairvoyant_state_bound(ts), name);

    // The index is injective on reachable windows and inverts exactly.
    std::set<std::vector<int>> indices;
    for (BitState b : clair.states) {
      const auto idx = laxity_index(b, ts.d_max(), ts.l_max());
      CHECK(indices.insert(idx).second);
      CHECK(laxity_index_inverse(idx, ts.d_max(), ts.l_max()) == b);
    }
  }
}

TEST_CASE("laxity index corner cases") {
  // A full window has no zeros: every entry is the "no such zero" marker.
  CHECK(laxity_index(0b1111, 4, 1) == std::vector<int>{0, 0});
  // Zeros at slots 2 and 4 of the window 1010 (slot 1 first).
  CHECK(bitstate_string(0b0101, 4) == "1010");
  CHECK(laxity_index(0b0101, 4, 1) == std::vector<int>{2, 4});
  CHECK(laxity_index_inverse({2, 4}, 4, 1) == BitState{0b0101});

  CHECK_THROWS_AS(laxity_index_inverse({4, 2}, 4, 1), error);    // not increasing
  CHECK_THROWS_AS(laxity_index_inverse({0, 2}, 4, 1), error);    // gap after the marker
  CHECK_THROWS_AS(laxity_index_inverse({2, 9}, 4, 1), error);    // beyond the window
}

TEST_CASE("optimized clairvoyant matches the naive oracle exhaustively") {
  compare_exhaustively(Taskset({{1, 2, 2}, {2, 3, 1}}), 5);
  compare_exhaustively(Taskset({{2, 4, 3}, {1, 1, 1}}), 5);
  compare_exhaustively(Taskset({{1, 3, 1}, {2, 4, 5}}), 5);
}

TEST_CASE("optimized clairvoyant matches the naive oracle on random prefixes") {
  const Taskset ts({{2, 4, 3}, {1, 3, 2}});
  const ClairvoyantLts fast = build_clairvoyant_lts(ts);
  const NaiveClairvoyant slow = build_naive_clairvoyant_lts(ts);
  const auto fast_tail = empty_tail_value(fast.lts, ts.d_max());
  const auto slow_tail = empty_tail_value(slow.lts, ts.d_max());

  std::mt19937 rng(41);
  std::uniform_int_distribution<int> release(0, 3), length(1, 12);
  for (int trial = 0; trial < 50; ++trial) {
    BestByState f = {{fast.lts.initial, 0}}, s = {{slow.lts.initial, 0}};
    const int len = length(rng);
    for (int slot = 0; slot < len; ++slot) {
      const ReleaseMask rel = static_cast<ReleaseMask>(release(rng));
      f = dp_step(fast.lts, f, rel);
      s = dp_step(slow.lts, s, rel);
    }
    CHECK(padded_best(fast.lts, f, fast_tail) == padded_best(slow.lts, s, slow_tail));
  }
}

TEST_CASE("state cap is honoured") {
  const Taskset ts({{2, 6, 1}, {3, 6, 2}});
  try {
    build_clairvoyant_lts(ts, /*state_cap=*/3);
    FAIL("expected state_explosion");
  } catch (const error& e) {
    CHECK(e.kind() == errc::state_explosion);
  }
}

TEST_SUITE_END();
