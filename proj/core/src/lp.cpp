#include "crsched/lp.hpp"

#include <algorithm>

#include "crsched/errors.hpp"

namespace crsched {

std::optional<std::vector<Rational>> lp_feasible(const LinearSystem& sys) {
  const int n = sys.vars;
  const int m = static_cast<int>(sys.constraints.size());
  for (const LinearConstraint& c : sys.constraints) {
    if (static_cast<int>(c.a.size()) > n)
      fail(errc::internal, "constraint has more coefficients than variables");
    if (c.rel != '<' && c.rel != '=' && c.rel != '>')
      fail(errc::internal, "unknown constraint relation");
  }

  // Standard form: free variables split as x = xp - xm, every inequality
  // gets a slack, every row a non-negative right-hand side and its own
  // artificial variable. Phase one minimises the artificial sum.
  int num_slack = 0;
  for (const LinearConstraint& c : sys.constraints)
    if (c.rel != '=') ++num_slack;
  const int cols = 2 * n + num_slack + m;  // + artificials
  const int art0 = 2 * n + num_slack;

  std::vector<std::vector<Rational>> tab(m, std::vector<Rational>(cols + 1));
  int slack_at = 2 * n;
  for (int i = 0; i < m; ++i) {
    const LinearConstraint& c = sys.constraints[i];
    for (int j = 0; j < static_cast<int>(c.a.size()); ++j) {
      tab[i][j] = c.a[j];           // xp
      tab[i][n + j] = -c.a[j];      // xm
    }
    if (c.rel != '=') tab[i][slack_at++] = c.rel == '<' ? 1 : -1;
    tab[i][cols] = c.b;
    if (tab[i][cols] < 0)
      for (Rational& v : tab[i]) v = -v;
    tab[i][art0 + i] = 1;
  }

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = art0 + i;

  // Simplex with Bland's rule. Reduced cost of column j under the phase-one
  // objective (artificials cost 1, everything else 0): c_j minus the sum of
  // the column's entries in rows whose basic variable is artificial.
  while (true) {
    int enter = -1;
    for (int j = 0; j < cols && enter < 0; ++j) {
      Rational r = j >= art0 ? 1 : 0;
      for (int i = 0; i < m; ++i)
        if (basis[i] >= art0) r -= tab[i][j];
      if (r < 0) enter = j;
    }
    if (enter < 0) break;  // optimal

    int leave = -1;
    Rational best;
    for (int i = 0; i < m; ++i) {
      if (tab[i][enter] <= 0) continue;
      const Rational ratio = tab[i][cols] / tab[i][enter];
      if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) fail(errc::internal, "phase-one objective unbounded below");

    const Rational pivot = tab[leave][enter];
    for (Rational& v : tab[leave]) v /= pivot;
    for (int i = 0; i < m; ++i) {
      if (i == leave || tab[i][enter] == 0) continue;
      const Rational f = tab[i][enter];
      for (int j = 0; j <= cols; ++j) tab[i][j] -= f * tab[leave][j];
    }
    basis[leave] = enter;
  }

  Rational artificial_sum = 0;
  for (int i = 0; i < m; ++i)
    if (basis[i] >= art0) artificial_sum += tab[i][cols];
  if (artificial_sum != 0) return std::nullopt;

  std::vector<Rational> split(2 * n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < 2 * n) split[basis[i]] = tab[i][cols];
  std::vector<Rational> x(n);
  for (int j = 0; j < n; ++j) x[j] = split[j] - split[n + j];

  // Exact substitution check before handing the point out.
  for (const LinearConstraint& c : sys.constraints) {
    Rational lhs = 0;
    for (int j = 0; j < static_cast<int>(c.a.size()); ++j) lhs += c.a[j] * x[j];
    const bool ok = c.rel == '<' ? lhs <= c.b : c.rel == '>' ? lhs >= c.b : lhs == c.b;
    if (!ok) fail(errc::internal, "simplex produced a point violating a constraint");
  }
  return x;
}

}  // namespace crsched
