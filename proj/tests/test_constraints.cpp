#include <numeric>
#include <random>

#include "crsched/constraints.hpp"
#include "crsched/errors.hpp"
#include "crsched/io.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace crsched;

namespace {

// Steps a pure automaton over a release prefix; returns the state trace
// (including the initial state, so trace.size() == sigma.size() + 1).
std::vector<int> trace(const Lts& lts, std::span<const ReleaseMask> sigma) {
  std::vector<int> out = {lts.initial};
  for (ReleaseMask rel : sigma) {
    const LtsTransition* hit = nullptr;
    for (const LtsTransition& t : lts.from(out.back()))
      if (t.input == rel) {
        hit = &t;
        break;
      }
    REQUIRE(hit != nullptr);
    out.push_back(hit->to);
  }
  return out;
}

int slot_workload(const Taskset& ts, ReleaseMask rel) {
  int sum = 0;
  for (int i = 0; i < ts.size(); ++i)
    if (rel & (1u << i)) sum += ts[i].wcet;
  return sum;
}

// Oracle: does any stretch of at most `window` consecutive slots in sigma
// release more than `cap` units of work?
bool violates_window(const Taskset& ts, std::span<const ReleaseMask> sigma, int window,
                     int cap) {
  for (std::size_t t = 0; t < sigma.size(); ++t) {
    int sum = 0;
    for (std::size_t back = 0; back < static_cast<std::size_t>(window) && back <= t; ++back) {
      sum += slot_workload(ts, sigma[t - back]);
    }
    if (sum > cap) return true;
  }
  return false;
}

// Oracle for sporadicity: gaps between consecutive releases of `task` must
// be >= period (or exactly == period once released, for the exact variant).
bool violates_sporadic(std::span<const ReleaseMask> sigma, int task, int period, bool exact) {
  int last = -1;
  for (std::size_t t = 0; t < sigma.size(); ++t) {
    const bool released = (sigma[t] >> task) & 1;
    if (last >= 0) {
      const int gap = static_cast<int>(t) - last;
      if (released && gap < period) return true;
      if (exact && !released && gap == period) return true;  // the mandated slot was missed
    }
    if (released) last = static_cast<int>(t);
  }
  return false;
}

std::vector<ReleaseMask> random_sigma(std::mt19937& rng, int tasks, int len) {
  std::uniform_int_distribution<int> release(0, (1 << tasks) - 1);
  std::vector<ReleaseMask> sigma(len);
  for (auto& r : sigma) r = static_cast<ReleaseMask>(release(rng));
  return sigma;
}

}  // namespace

TEST_SUITE_BEGIN("constraints");

TEST_CASE("universal automata accept everything") {
  const SafetyAutomaton s = universal_safety(2);
  CHECK(s.reject == -1);
  CHECK(s.lts.num_states == 1);
  CHECK(s.lts.deterministic());
  CHECK(s.lts.input_enabled());

  const LivenessAutomaton l = universal_liveness(2);
  CHECK(l.lts.num_states == 1);
  REQUIRE(l.accept.size() == 1);
  CHECK(l.accept[0] == 1);
}

TEST_CASE("workload window rejects exactly the overshooting prefixes") {
  const Taskset ts = load_taskset(testing::data_file("tasksets/workload-figure.json"));
  const SafetyAutomaton a = workload_window_safety(ts, /*window=*/3, /*cap=*/2);
  CHECK(a.lts.deterministic());
  CHECK(a.lts.input_enabled());
  REQUIRE(a.reject >= 0);

  std::mt19937 rng(53);
  int rejected = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto sigma = random_sigma(rng, ts.size(), 10);
    const auto t = trace(a.lts, sigma);
    const bool hit = std::find(t.begin(), t.end(), a.reject) != t.end();
    CHECK(hit == violates_window(ts, sigma, 3, 2));
    rejected += hit;
    // The reject state is absorbing: once there, always there.
    bool seen = false;
    for (int s : t) {
      if (seen) CHECK(s == a.reject);
      seen = seen || s == a.reject;
    }
  }
  CHECK(rejected > 0);
  CHECK(rejected < 300);
}

TEST_CASE("sporadic and periodic release rules") {
  const Taskset ts({{1, 2, 1}, {1, 3, 1}});
  for (const bool exact : {false, true}) {
    const SafetyAutomaton a = sporadic_safety(ts, /*task=*/1, /*period=*/3, exact);
    CHECK(a.lts.deterministic());
    CHECK(a.lts.input_enabled());
    std::mt19937 rng(59);
    int rejected = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const auto sigma = random_sigma(rng, 2, 9);
      const auto t = trace(a.lts, sigma);
      const bool hit = std::find(t.begin(), t.end(), a.reject) != t.end();
      CHECK_MESSAGE(hit == violates_sporadic(sigma, 1, 3, exact), (exact ? "exact" : "min"));
      rejected += hit;
    }
    CHECK(rejected > 0);
    CHECK(rejected < 300);
  }
}

TEST_CASE("infinitely-often liveness marks the releasing transitions' targets") {
  const Taskset ts({{1, 2, 1}, {1, 3, 1}});
  const LivenessAutomaton l = inf_often_liveness(ts, /*task=*/0);
  CHECK(l.lts.deterministic());
  CHECK(l.lts.input_enabled());
  // Accepting exactly after a slot that released task 0.
  for (const LtsTransition& t : l.lts.transitions)
    CHECK(static_cast<bool>(l.accept[t.to]) == static_cast<bool>(t.input & 1u));
}

TEST_CASE("mean workload weights carry the released demand") {
  const Taskset ts({{1, 1, 3}, {1, 2, 3}, {1, 1, 1}});
  const LimitAvgAutomaton w = mean_workload_limitavg(ts, make_rational(3, 5));
  CHECK(w.lts.num_states == 1);
  REQUIRE(w.thresholds.size() == 1);
  CHECK(w.thresholds[0] == make_rational(3, 5));
  for (const LtsTransition& t : w.lts.transitions) {
    REQUIRE(t.weights.size() == 1);
    CHECK(t.weights[0] == slot_workload(ts, t.input));
  }
}

TEST_CASE("composed safety rejects iff any part rejects") {
  const Taskset ts({{1, 2, 1}, {1, 3, 1}});
  const SafetyAutomaton parts[] = {
      workload_window_safety(ts, 2, 1),
      sporadic_safety(ts, 0, 2, false),
  };
  const SafetyAutomaton both = compose_safety({parts[0], parts[1]}, ts.size(), 100000);
  CHECK(both.lts.deterministic());
  CHECK(both.lts.input_enabled());

  std::mt19937 rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const auto sigma = random_sigma(rng, 2, 8);
    bool any = false;
    for (const auto& p : parts) {
      const auto t = trace(p.lts, sigma);
      any = any || std::find(t.begin(), t.end(), p.reject) != t.end();
    }
    const auto t = trace(both.lts, sigma);
    CHECK((std::find(t.begin(), t.end(), both.reject) != t.end()) == any);
  }

  // Composing nothing gives the universal automaton.
  CHECK(compose_safety({}, ts.size(), 100).reject == -1);
}

TEST_CASE("composed liveness accepts in round-robin over the parts") {
  const Taskset ts({{1, 2, 1}, {1, 3, 1}});
  const LivenessAutomaton parts[] = {
      inf_often_liveness(ts, 0),
      inf_often_liveness(ts, 1),
  };
  const LivenessAutomaton both = compose_liveness({parts[0], parts[1]}, ts.size(), 100000);
  CHECK(both.lts.deterministic());
  CHECK(both.lts.input_enabled());

  // A sequence releasing both tasks forever visits accepting states
  // infinitely often; one starving task 1 stops accepting eventually.
  const std::vector<ReleaseMask> good(12, 0b11), starving(12, 0b01);
  const auto tg = trace(both.lts, good);
  int accepts = 0;
  for (std::size_t i = 1; i < tg.size(); ++i) accepts += both.accept[tg[i]];
  CHECK(accepts >= 5);

  const auto tb = trace(both.lts, starving);
  int late_accepts = 0;
  for (std::size_t i = 4; i < tb.size(); ++i) late_accepts += both.accept[tb[i]];
  CHECK(late_accepts == 0);
}

TEST_CASE("constraint specs build and compose") {
  const Taskset ts = load_taskset(testing::data_file("tasksets/workload-figure.json"));
  const ConstraintSpec spec = load_constraints(testing::data_file("constraints/workload-2in3.json"));
  REQUIRE(spec.safety.size() == 1);
  CHECK(spec.safety[0].type == "workload_window");
  CHECK(spec.safety[0].window == 3);
  CHECK(spec.safety[0].cap == 2);

  const ConstraintSet built = build_constraints(spec, ts, 100000);
  CHECK(built.safety.reject >= 0);
  CHECK(built.limitavg.empty());

  const ConstraintSpec mean =
      load_constraints(testing::data_file("constraints/mean-workload-0.6.json"));
  const ConstraintSet built2 = build_constraints(mean, ts, 100000);
  REQUIRE(built2.limitavg.size() == 1);
  CHECK(built2.limitavg[0].thresholds == std::vector<Rational>{make_rational(3, 5)});

  ConstraintSpec bad;
  bad.safety.push_back({.type = "nonsense", .window = 0, .cap = 0, .task = 0, .period = 0});
  CHECK_THROWS_AS(build_constraints(bad, ts, 100000), error);
}

TEST_SUITE_END();
