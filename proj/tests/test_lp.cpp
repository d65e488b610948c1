#include <random>

#include "crsched/lp.hpp"
#include "doctest.h"

using namespace crsched;

namespace {

bool satisfies(const LinearSystem& sys, const std::vector<Rational>& x) {
  for (const auto& c : sys.constraints) {
    Rational lhs = 0;
    for (std::size_t i = 0; i < c.a.size(); ++i) lhs += c.a[i] * x[i];
    if (c.rel == '<' && !(lhs <= c.b)) return false;
    if (c.rel == '=' && !(lhs == c.b)) return false;
    if (c.rel == '>' && !(lhs >= c.b)) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("lp");

TEST_CASE("obvious systems") {
  LinearSystem sys;
  sys.vars = 1;
  sys.add({Rational(1)}, '>', Rational(3));
  sys.add({Rational(1)}, '<', Rational(5));
  auto x = lp_feasible(sys);
  REQUIRE(x.has_value());
  CHECK(satisfies(sys, *x));

  sys.add({Rational(1)}, '<', Rational(2));  // now contradictory
  CHECK_FALSE(lp_feasible(sys).has_value());
}

TEST_CASE("variables are free in sign") {
  LinearSystem sys;
  sys.vars = 2;
  sys.add({Rational(1), Rational(1)}, '=', Rational(-3));
  sys.add({Rational(1), Rational(-1)}, '=', Rational(7));
  const auto x = lp_feasible(sys);
  REQUIRE(x.has_value());
  CHECK((*x)[0] == Rational(2));
  CHECK((*x)[1] == Rational(-5));
}

TEST_CASE("exact rationals, no epsilon fuzz") {
  LinearSystem sys;
  sys.vars = 1;
  sys.add({Rational(3)}, '=', Rational(1));
  const auto x = lp_feasible(sys);
  REQUIRE(x.has_value());
  CHECK((*x)[0] == make_rational(1, 3));

  // A constraint violated by one part in a billion must count as violated.
  LinearSystem tight;
  tight.vars = 1;
  tight.add({Rational(1)}, '>', make_rational(1000000001, 1000000000));
  tight.add({Rational(1)}, '<', Rational(1));
  CHECK_FALSE(lp_feasible(tight).has_value());
}

TEST_CASE("short coefficient rows read as zero-padded") {
  LinearSystem sys;
  sys.vars = 3;
  sys.add({Rational(1)}, '=', Rational(4));  // touches only x0
  sys.add({}, '<', Rational(0));             // 0 <= 0
  const auto x = lp_feasible(sys);
  REQUIRE(x.has_value());
  CHECK((*x)[0] == Rational(4));

  LinearSystem bad;
  bad.vars = 2;
  bad.add({}, '>', Rational(1));  // 0 >= 1
  CHECK_FALSE(lp_feasible(bad).has_value());
}

TEST_CASE("degenerate shapes") {
  LinearSystem empty;
  empty.vars = 0;
  CHECK(lp_feasible(empty).has_value());

  LinearSystem unconstrained;
  unconstrained.vars = 3;
  const auto x = lp_feasible(unconstrained);
  REQUIRE(x.has_value());
  CHECK(x->size() == 3);

  LinearSystem equalities;
  equalities.vars = 2;
  equalities.add({Rational(1), Rational(0)}, '=', Rational(0));
  equalities.add({Rational(1), Rational(1)}, '=', Rational(0));
  equalities.add({Rational(0), Rational(1)}, '=', Rational(1));  // clash
  CHECK_FALSE(lp_feasible(equalities).has_value());
}

TEST_CASE("planted solutions are always found") {
  // Generate constraints that a random planted point satisfies; the solver
  // must report some feasible point (not necessarily the planted one).
  std::mt19937 rng(97);
  std::uniform_int_distribution<int> small(-6, 6), den(1, 4), nvars(1, 5), rows(1, 8);
  std::uniform_int_distribution<int> relpick(0, 2);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = nvars(rng);
    std::vector<Rational> planted(n);
    for (auto& p : planted) p = make_rational(small(rng), den(rng));

    LinearSystem sys;
    sys.vars = n;
    const int m = rows(rng);
    for (int r = 0; r < m; ++r) {
      std::vector<Rational> a(n);
      Rational dot = 0;
      for (int i = 0; i < n; ++i) {
        a[i] = Rational(small(rng));
        dot += a[i] * planted[i];
      }
      switch (relpick(rng)) {
        case 0: sys.add(std::move(a), '<', dot + Rational(small(rng) > 0 ? 1 : 0)); break;
        case 1: sys.add(std::move(a), '=', dot); break;
        default: sys.add(std::move(a), '>', dot - Rational(small(rng) > 0 ? 1 : 0)); break;
      }
    }
    const auto x = lp_feasible(sys);
    REQUIRE(x.has_value());
    CHECK(satisfies(sys, *x));
  }
}

TEST_CASE("random infeasible sandwiches are recognised") {
  // a.x <= b and a.x >= b + 1 cannot both hold.
  std::mt19937 rng(101);
  std::uniform_int_distribution<int> small(-5, 5), nvars(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = nvars(rng);
    std::vector<Rational> a(n);
    bool nonzero = false;
    for (auto& c : a) {
      c = Rational(small(rng));
      nonzero = nonzero || c != 0;
    }
    const Rational b = Rational(small(rng));
    LinearSystem sys;
    sys.vars = n;
    std::vector<Rational> a2 = a;
    sys.add(std::move(a2), '<', b);
    sys.add(std::move(a), '>', b + 1);
    // An all-zero row makes the pair 0 <= b, 0 >= b+1: also infeasible.
    CHECK_FALSE(lp_feasible(sys).has_value());
    (void)nonzero;
  }
}

TEST_SUITE_END();
