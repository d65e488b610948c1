#pragma once

#include <optional>
#include <vector>

#include "crsched/rational.hpp"

namespace crsched {

// Small exact rational linear systems. Variables are unrestricted in sign;
// bounds like x >= 0 are ordinary constraints. Deliberately not tuned: the
// systems here have at most a few thousand entries.
struct LinearConstraint {
  std::vector<Rational> a;  // one coefficient per variable (may be shorter; rest 0)
  char rel = '<';           // '<' for <=, '=' for ==, '>' for >=
  Rational b;
};

struct LinearSystem {
  int vars = 0;
  std::vector<LinearConstraint> constraints;

  void add(std::vector<Rational> a, char rel, Rational b) {
    constraints.push_back({std::move(a), rel, std::move(b)});
  }
};

// Feasibility via a phase-one simplex (split free variables, slacks,
// artificials, Bland's rule - guaranteed to terminate). Returns an exact
// assignment satisfying every constraint, verified by substitution before
// being handed out, or nullopt if the system is infeasible.
std::optional<std::vector<Rational>> lp_feasible(const LinearSystem& sys);

}  // namespace crsched
