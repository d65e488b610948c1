#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crsched/pending.hpp"

namespace crsched {

// Transition outputs are schedule labels packed into one int so pure
// automata (no outputs) and schedulers share a representation.
constexpr std::int32_t kNoOutput = INT32_MIN;
constexpr std::int32_t kIdleOutput = -1;

std::int32_t encode_label(ScheduleLabel label, int d_max);
ScheduleLabel decode_label(std::int32_t encoded, int d_max);

struct LtsTransition {
  int from = 0;
  ReleaseMask input = 0;
  int to = 0;
  std::int32_t output = kNoOutput;
  std::int64_t reward = 0;            // scalar reward of this transition
  std::vector<std::int64_t> weights;  // extra weight dimensions (usually empty)
};

// Finite-state transducer over the release alphabet 2^{tasks}. States are
// dense ints; whatever they stand for (pending matrices, slot windows,
// constraint bookkeeping) lives with the producer, optionally mirrored in
// state_names for messages and dumps.
struct Lts {
  int num_tasks = 0;
  int num_states = 0;
  int initial = 0;
  std::vector<LtsTransition> transitions;
  std::vector<std::string> state_names;  // optional; empty or one per state

  // Sorts transitions by (from, input, to) and builds the per-state index.
  // Every mutation of `transitions` must be followed by finalize().
  void finalize();
  std::span<const LtsTransition> from(int state) const;

  // At most one transition per (state, release set)?
  bool deterministic() const;
  // At least one transition per (state, release set), for all 2^num_tasks
  // release sets? Violations are listed in `why` when given.
  bool input_enabled(std::string* why = nullptr) const;

  std::string state_label(int state) const;  // name if present, else "#i"

 private:
  std::vector<int> state_offset_;  // CSR index into transitions
};

// Synchronous product: all components consume the same release set in
// lockstep; a joint transition exists iff every component has one. The
// product output is the first component's output (the scheduler goes first
// everywhere in this project; the other components are pure automata), the
// product reward is the first component's reward, and `weights` concatenates
// every component's (reward, weights...) tail so nothing is lost.
// `tuples_out`, when given, receives the component state tuple behind every
// product state. Throws errc::state_explosion past `state_cap` states.
Lts synchronous_product(std::span<const Lts* const> components, int state_cap,
                        std::vector<std::vector<int>>* tuples_out = nullptr);

}  // namespace crsched
