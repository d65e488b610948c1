#pragma once

#include <cstdint>
#include <vector>

#include "crsched/lts.hpp"
#include "crsched/pending.hpp"
#include "crsched/task.hpp"

namespace crsched {

// Slot-window state of the optimized clairvoyant scheduler: bit j-1 set
// means the slot j steps ahead (1-based, slot 1 = the current slot) is
// already committed to some accepted job. The window is d_max slots wide.
// Every reachable state is all-zero or has bit 1 set, and every maximal
// gap of zeros between ones can be exactly filled by whole jobs.
using BitState = std::uint64_t;

std::string bitstate_string(BitState b, int d_max);  // e.g. "1010"

// Memoised "can a gap of this many free slots be packed exactly by complete
// jobs?" — the classic coin-problem with the wcets as coin denominations,
// solved bottom-up once per length and cached.
class KnapsackMemo {
 public:
  explicit KnapsackMemo(const Taskset& ts);
  bool gap_fillable(int gap);

 private:
  std::vector<int> wcets_;
  std::vector<std::int8_t> memo_;  // -1 unknown, 0 no, 1 yes; memo_[0] = yes
};

// Does every zero-gap strictly inside b (surrounded by ones) pass
// gap_fillable? Trailing zeros past the last one are not gaps.
bool gaps_fillable(BitState b, int d_max, KnapsackMemo& memo);

// One committed choice for a release set: the successor window (already
// advanced by one slot), the value banked now for every job accepted, and
// for each accepted job the slot offset at which it will complete
// (1 = this very slot), used by tests that account value at completion.
struct ClairChoice {
  BitState next = 0;
  std::int64_t reward = 0;
  std::vector<std::pair<int, int>> completions;  // (offset, value), sorted
  bool operator==(const ClairChoice&) const = default;
};

// All distinct (successor, reward) choices available to the clairvoyant
// when `released` arrives in window `b`: every subset of the releases may
// be accepted, each accepted job gets wcet free slots inside its own
// deadline window, allocations are enumerated in earliest-deadline order
// (equivalent schedules are generated once), and candidate windows that
// leave slot 1 idle while loaded, or an unfillable gap, are discarded.
// The returned windows are advanced by one slot and then normalised by
// shifting everything one slot earlier while slot 1 is free — committed
// work can always be started as early as possible.
std::vector<ClairChoice> clairvoyant_successors(ReleaseMask released, BitState b,
                                                const Taskset& ts, KnapsackMemo& memo);

// The recursion behind clairvoyant_successors, exposed for tests: windows
// (not yet advanced/normalised) reachable by accepting a subset of `tasks`
// (indices into ts, pre-sorted by deadline) into `b`, every new allocation
// strictly right of slot `k`. Candidate filtering as above.
struct RawChoice {
  BitState window = 0;
  std::int64_t reward = 0;
  std::vector<std::pair<int, int>> completions;
};
std::vector<RawChoice> clairvoyant_successor(const std::vector<int>& tasks, BitState b, int k,
                                             const Taskset& ts, KnapsackMemo& memo);

struct ClairvoyantLts {
  Lts lts;                      // non-deterministic; rewards banked on acceptance
  std::vector<BitState> states; // aligned with state ids
  int d_max = 0;
};

// Builds the full clairvoyant transducer from the empty window. Throws
// errc::state_explosion past the cap. Zero-laxity tasksets take a direct
// route (windows are solid prefixes of ones; at most d_max + 1 states).
ClairvoyantLts build_clairvoyant_lts(const Taskset& ts, int state_cap = 1'000'000);

// Number-of-states bound: min(2^d_max, d_max * (d_max-1) * ... over
// l_max + 1 factors). The falling-factorial side comes from the injective
// index below.
std::uint64_t clairvoyant_state_bound(const Taskset& ts);

// Positions (1-based) of the first l_max+1 zeros of b, 0 marking "no such
// zero". Injective over reachable windows: it determines b completely.
std::vector<int> laxity_index(BitState b, int d_max, int l_max);

// Reconstructs the window from its index. Throws errc::malformed_index on
// tuples no window can produce (non-increasing positions, gaps after a 0
// marker, positions beyond the window).
BitState laxity_index_inverse(const std::vector<int>& index, int d_max, int l_max);

// Reference implementation kept as a cross-check oracle: the matrix-state
// clairvoyant that tracks pending jobs like a scheduler but picks jobs
// non-deterministically (any pending job or idle; value banked on on-time
// completion). Exponentially larger; never used by the analysis pipeline.
struct NaiveClairvoyant {
  Lts lts;
  std::vector<PendingMatrix> states;
};
NaiveClairvoyant build_naive_clairvoyant_lts(const Taskset& ts, int state_cap = 1'000'000,
                                             Retention retention = Retention::eager);

}  // namespace crsched
