#pragma once

#include <stdexcept>
#include <string>

namespace crsched {

// Failure categories. The CLI maps these onto process exit codes, everything
// else just wants to distinguish "bad input" from "resource limit" from
// "feature not available".
enum class errc {
  parse,            // malformed file / flag / value, or invalid model data
  invalid_schedule, // a schedule label violates the pending-job semantics
  malformed_index,  // a laxity index tuple that no bit state can produce
  malformed_flow,   // an edge flow that is not a circulation
  state_explosion,  // a state-space cap was exceeded
  unsupported,      // requested policy/feature is not implemented
  no_cycle,         // cycle-based query on an acyclic (sub)graph
  internal,         // broken invariant; always a bug
};

constexpr const char* errc_name(errc k) {
  switch (k) {
    case errc::parse: return "parse error";
    case errc::invalid_schedule: return "invalid schedule";
    case errc::malformed_index: return "malformed laxity index";
    case errc::malformed_flow: return "malformed flow";
    case errc::state_explosion: return "state explosion";
    case errc::unsupported: return "unsupported";
    case errc::no_cycle: return "no cycle";
    case errc::internal: return "internal error";
  }
  return "unknown error";
}

class error : public std::runtime_error {
 public:
  error(errc kind, const std::string& msg)
      : std::runtime_error(std::string(errc_name(kind)) + ": " + msg), kind_(kind) {}
  errc kind() const { return kind_; }

 private:
  errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& msg) { throw error(kind, msg); }

}  // namespace crsched
