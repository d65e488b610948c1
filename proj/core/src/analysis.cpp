#include "crsched/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <map>
#include <tuple>
#include <utility>

#include "crsched/errors.hpp"

namespace crsched {

namespace {

// Transitions of `state` on exactly this release set (the per-state span is
// sorted by input).
std::span<const LtsTransition> with_input(const Lts& l, int state, ReleaseMask in) {
  auto sp = l.from(state);
  const auto* lo = std::partition_point(
      sp.data(), sp.data() + sp.size(),
      [&](const LtsTransition& t) { return t.input < in; });
  const auto* hi = std::partition_point(
      lo, sp.data() + sp.size(), [&](const LtsTransition& t) { return t.input <= in; });
  return {lo, hi};
}

const LtsTransition& only_transition(const Lts& l, int state, ReleaseMask in,
                                     const char* who) {
  auto sp = with_input(l, state, in);
  if (sp.size() != 1)
    fail(errc::internal, std::string(who) + " automaton is not deterministic-total");
  return sp[0];
}

std::int64_t to_i64(const BigInt& b) {
  if (b > std::numeric_limits<std::int64_t>::max() || b < std::numeric_limits<std::int64_t>::min())
    fail(errc::internal, "threshold numerator or denominator exceeds 64-bit range");
  return static_cast<std::int64_t>(b);
}

}  // namespace

ProductGraph build_product(const Lts& online, const Lts& clair, const SafetyAutomaton& safety,
                           const LivenessAutomaton& liveness,
                           const std::vector<LimitAvgAutomaton>& limitavg,
                           std::int64_t state_cap) {
  const int n_tasks = online.num_tasks;
  if (clair.num_tasks != n_tasks || safety.lts.num_tasks != n_tasks ||
      liveness.lts.num_tasks != n_tasks)
    fail(errc::internal, "product components disagree on the task count");
  for (const auto& la : limitavg)
    if (la.lts.num_tasks != n_tasks)
      fail(errc::internal, "product components disagree on the task count");
  if (n_tasks > kMaxTasks) fail(errc::unsupported, "too many tasks for release-set enumeration");

  int extra_dims = 0;
  for (const auto& la : limitavg) extra_dims += static_cast<int>(la.thresholds.size());

  ProductGraph pg;
  pg.num_tasks = n_tasks;
  pg.wa.resize(1 + extra_dims);
  pg.wc.resize(1 + extra_dims);

  const int parts = 4 + static_cast<int>(limitavg.size());
  std::map<std::vector<int>, int> seen;
  std::vector<int> head(parts);
  head[0] = online.initial;
  head[1] = clair.initial;
  head[2] = safety.lts.initial;
  head[3] = liveness.lts.initial;
  for (std::size_t j = 0; j < limitavg.size(); ++j) head[4 + j] = limitavg[j].lts.initial;

  auto intern = [&](const std::vector<int>& t) {
    auto [it, fresh] = seen.try_emplace(t, static_cast<int>(pg.tuple.size()));
    if (fresh) {
      if (static_cast<std::int64_t>(pg.tuple.size()) >= state_cap)
        fail(errc::state_explosion, "product exceeds the state cap");
      pg.tuple.push_back(t);
      pg.x.push_back(safety.reject >= 0 && t[2] == safety.reject ? 1 : 0);
      pg.y.push_back(liveness.accept[t[3]] ? 1 : 0);
    }
    return it->second;
  };
  pg.start = intern(head);

  struct Candidate {
    int to;
    std::vector<std::int64_t> wa, wc;
    ReleaseMask in;
    std::int32_t out;
  };
  std::vector<Candidate> cand;
  const unsigned num_masks = 1u << n_tasks;

  for (int u = 0; u < static_cast<int>(pg.tuple.size()); ++u) {
    if (pg.x[u]) continue;  // rejected: no future, pruning removes it
    const std::vector<int> tup = pg.tuple[u];
    cand.clear();
    for (unsigned mask = 0; mask < num_masks; ++mask) {
      const ReleaseMask in = static_cast<ReleaseMask>(mask);
      const LtsTransition& ton = only_transition(online, tup[0], in, "scheduler");
      const LtsTransition& tsf = only_transition(safety.lts, tup[2], in, "safety");
      const LtsTransition& tlv = only_transition(liveness.lts, tup[3], in, "liveness");
      std::vector<const LtsTransition*> tla(limitavg.size());
      for (std::size_t j = 0; j < limitavg.size(); ++j) {
        tla[j] = &only_transition(limitavg[j].lts, tup[4 + j], in, "limit-average");
        if (tla[j]->weights.size() != limitavg[j].thresholds.size())
          fail(errc::internal, "limit-average automaton weight arity mismatch");
      }
      for (const LtsTransition& tcl : with_input(clair, tup[1], in)) {
        std::vector<int> to = tup;
        to[0] = ton.to;
        to[1] = tcl.to;
        to[2] = tsf.to;
        to[3] = tlv.to;
        for (std::size_t j = 0; j < limitavg.size(); ++j) to[4 + j] = tla[j]->to;
        Candidate c;
        c.to = intern(to);
        c.in = in;
        c.out = ton.output;
        c.wa.reserve(1 + extra_dims);
        c.wc.reserve(1 + extra_dims);
        c.wa.push_back(ton.reward);
        c.wc.push_back(tcl.reward);
        for (std::size_t j = 0; j < limitavg.size(); ++j)
          for (std::int64_t wd : tla[j]->weights) {
            c.wa.push_back(wd);
            c.wc.push_back(1);
          }
        cand.push_back(std::move(c));
      }
    }
    // Collapse parallel edges with identical endpoints and weights; the
    // generation order is mask-ascending, so the kept representative is the
    // smallest release set.
    std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.to, a.wa, a.wc) < std::tie(b.to, b.wa, b.wc);
    });
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (i > 0 && cand[i].to == cand[i - 1].to && cand[i].wa == cand[i - 1].wa &&
          cand[i].wc == cand[i - 1].wc)
        continue;
      pg.g.add_edge(u, cand[i].to);
      for (int d = 0; d < 1 + extra_dims; ++d) {
        pg.wa[d].push_back(cand[i].wa[d]);
        pg.wc[d].push_back(cand[i].wc[d]);
      }
      pg.input.push_back(cand[i].in);
      pg.output.push_back(cand[i].out);
    }
  }
  pg.g.n = static_cast<int>(pg.tuple.size());
  return pg;
}

DecideResult decide_cr_at_most(const ProductGraph& pg, const Rational& nu) {
  if (pg.dims() != 1)
    fail(errc::unsupported,
         "threshold decision handles products without limit-average dimensions");
  Objective obj;
  obj.kind = Objective::Kind::ratio;
  obj.w1 = pg.wa[0];
  obj.w2 = pg.wc[0];
  obj.nu_ratio = nu;
  DecideResult r;
  r.detail = solve_conjunction(pg.g, pg.start, pg.x, pg.y, obj);
  r.sat = r.detail.satisfied;
  if (r.detail.found_cycle && r.detail.cycle_w2 > 0) {
    r.has_ratio = true;
    r.cycle_ratio = make_rational(r.detail.cycle_w1, r.detail.cycle_w2);
  }
  return r;
}

namespace {

std::vector<int> path_to(const ProductGraph& pg, int head) {
  if (head == pg.start) return {};
  NodeMask alive = prune_safety(pg.g, pg.x);
  return shortest_edge_path(pg.g, alive, pg.start, head);
}

void attach_cycle_witness(const ProductGraph& pg, const ConjunctionResult& d,
                          SearchResult& out) {
  if (!d.found_cycle || d.cycle.empty()) return;
  CrWitness w;
  w.multi = false;
  w.cycle = d.cycle;
  w.wa_sum = d.cycle_w1;
  w.wc_sum = d.cycle_w2;
  w.ratio = d.cycle_w2 > 0 ? make_rational(d.cycle_w1, d.cycle_w2) : Rational(1);
  w.path = path_to(pg, pg.g.efrom[d.cycle.front()]);
  out.witness = std::move(w);
  out.has_witness = true;
}

}  // namespace

SearchResult adaptive_binary_search(const ProductGraph& pg) {
  SearchResult out;
  Rational l(0), r(1), nu(1, 2);
  for (;;) {
    ++out.probes;
    DecideResult d = decide_cr_at_most(pg, nu);
    if (d.sat) {
      if (!d.has_ratio) {
        // Only possible at nu >= 1: the best admissible cycle banks no
        // clairvoyant value, so nothing beats the silent ratio of 1.
        out.cr = out.lo = out.hi = Rational(1);
        out.warnings.push_back(
            "degenerate: the witness cycle has zero clairvoyant utility (silent-cycle rule)");
        attach_cycle_witness(pg, d.detail, out);
        return out;
      }
      if (d.cycle_ratio == nu) {
        // The minimum mean under the nu-shifted weights is exactly zero, so
        // no admissible cycle sits below nu: this is the answer.
        out.cr = out.lo = out.hi = nu;
        attach_cycle_witness(pg, d.detail, out);
        return out;
      }
      r = d.cycle_ratio;  // strictly below nu
      attach_cycle_witness(pg, d.detail, out);
      nu = (l + r) / 2;
    } else {
      l = nu;
      if (d.has_ratio && d.cycle_ratio < r) r = d.cycle_ratio;
      if (l >= r) {
        // Unsatisfied at nu = 1: either no live cycle at all, or every one
        // of them outweighs the clairvoyant. Both pin the ratio at 1.
        out.cr = out.lo = out.hi = Rational(1);
        out.warnings.push_back(
            d.detail.found_cycle
                ? "degenerate: every admissible cycle outweighs the clairvoyant; reporting 1"
                : "no admissible release sequence survives the constraints; reporting 1 vacuously");
        out.has_witness = false;
        return out;
      }
      nu = r;  // a realized cycle ratio: satisfiable, possibly exactly
    }
  }
}

namespace {

Objective limitavg_objective(const ProductGraph& pg, const std::vector<Rational>& lambda,
                             const Rational& nu, bool require_clair_mass) {
  Objective obj;
  obj.kind = Objective::Kind::mean_payoff;
  obj.dims.push_back(ratio_to_mp(pg.wa[0], pg.wc[0], to_i64(numerator(nu)),
                                 to_i64(denominator(nu))));
  for (std::size_t d = 0; d < lambda.size(); ++d)
    obj.dims.push_back(ratio_to_mp(pg.wa[1 + d], pg.wc[1 + d], to_i64(numerator(lambda[d])),
                                   to_i64(denominator(lambda[d]))));
  obj.nu.assign(obj.dims.size(), Rational(0));
  if (require_clair_mass) obj.positive = pg.wc[0];
  return obj;
}

Rational flow_ratio(const ProductGraph& pg, const std::vector<Rational>& x) {
  Rational num(0), den(0);
  for (int e = 0; e < pg.g.m(); ++e) {
    if (x[e] == 0) continue;
    num += x[e] * pg.wa[0][e];
    den += x[e] * pg.wc[0][e];
  }
  if (den == 0) fail(errc::internal, "witness flow has zero clairvoyant mass");
  return num / den;
}

void attach_flow_witness(const ProductGraph& pg, const ConjunctionResult& d,
                         const Rational& ratio, SearchResult& out) {
  if (d.multicycle.cycles.empty()) return;
  CrWitness w;
  w.multi = true;
  w.multicycle = d.multicycle;
  w.ratio = ratio;
  w.path = path_to(pg, pg.g.efrom[d.multicycle.cycles.front().front()]);
  out.witness = std::move(w);
  out.has_witness = true;
}

}  // namespace

SearchResult cr_with_limitavg(const ProductGraph& pg, const std::vector<Rational>& lambda,
                              const Rational& epsilon) {
  if (pg.dims() < 2)
    fail(errc::unsupported, "no limit-average dimensions in this product");
  if (static_cast<int>(lambda.size()) != pg.dims() - 1)
    fail(errc::internal, "limit-average threshold count mismatch");
  if (!(epsilon > 0)) fail(errc::parse, "epsilon must be positive");

  SearchResult out;
  out.exact = false;

  // First probe at nu = 1 settles admissibility and degeneracy.
  ++out.probes;
  ConjunctionResult first =
      solve_conjunction(pg.g, pg.start, pg.x, pg.y, limitavg_objective(pg, lambda, 1, true));
  if (!first.satisfied) {
    ++out.probes;
    ConjunctionResult deg = solve_conjunction(pg.g, pg.start, pg.x, pg.y,
                                              limitavg_objective(pg, lambda, 1, false));
    out.exact = true;
    out.cr = out.lo = out.hi = Rational(1);
    if (deg.satisfied) {
      out.warnings.push_back(
          "degenerate: admissible flows bank no clairvoyant utility (silent-cycle rule)");
      attach_flow_witness(pg, deg, Rational(1), out);
    } else {
      out.warnings.push_back(
          "no admissible release sequence survives the constraints; reporting 1 vacuously");
    }
    return out;
  }

  Rational l(0), r = flow_ratio(pg, first.flow);
  attach_flow_witness(pg, first, r, out);
  while (r - l > epsilon) {
    const Rational nu = (l + r) / 2;
    ++out.probes;
    ConjunctionResult d =
        solve_conjunction(pg.g, pg.start, pg.x, pg.y, limitavg_objective(pg, lambda, nu, true));
    if (d.satisfied) {
      const Rational rho = flow_ratio(pg, d.flow);  // <= nu, halving at least
      r = rho;
      attach_flow_witness(pg, d, rho, out);
    } else {
      l = nu;
    }
  }
  out.lo = l;
  out.hi = r;
  out.cr = r;
  return out;
}

Rational brute_force_cycle_oracle(const ProductGraph& pg) {
  if (pg.g.n > 12) fail(errc::state_explosion, "oracle limited to 12 product nodes");
  if (pg.dims() != 1) fail(errc::unsupported, "oracle handles the single-dimension case");

  const MultiGraph& g = pg.g;
  NodeMask alive = prune_safety(g, pg.x);
  if (pg.start >= g.n || !alive[pg.start]) return Rational(1);

  // Reachable part only.
  NodeMask reach(g.n, 0);
  std::vector<int> stack{pg.start};
  reach[pg.start] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int e = 0; e < g.m(); ++e)
      if (g.efrom[e] == u && alive[g.eto[e]] && !reach[g.eto[e]]) {
        reach[g.eto[e]] = 1;
        stack.push_back(g.eto[e]);
      }
  }
  std::vector<int> comp;
  const int nc = scc_decompose(g, reach, comp);
  const std::vector<char> live = live_components(g, comp, nc, pg.y);

  std::optional<Rational> best;
  bool silent = false;  // saw a cycle with both weight sums zero
  std::vector<char> on_path(g.n, 0);
  std::int64_t steps = 0;

  // All simple cycles anchored at their minimum node, inside one live
  // component: depth-first over nodes >= anchor.
  std::function<void(int, int, int, std::int64_t, std::int64_t)> dfs =
      [&](int anchor, int u, int cid, std::int64_t wa, std::int64_t wc) {
        if (++steps > 20'000'000)
          fail(errc::state_explosion, "oracle cycle enumeration exploded");
        for (int e = 0; e < g.m(); ++e) {
          if (g.efrom[e] != u) continue;
          const int v = g.eto[e];
          if (v < anchor || !reach[v] || comp[v] != cid) continue;
          const std::int64_t wa2 = wa + pg.wa[0][e];
          const std::int64_t wc2 = wc + pg.wc[0][e];
          if (v == anchor) {
            if (wc2 > 0) {
              const Rational rho = make_rational(wa2, wc2);
              if (!best || rho < *best) best = rho;
            } else if (wa2 == 0) {
              silent = true;
            }  // wc = 0 < wa: unbounded ratio, never the minimum
          } else if (!on_path[v]) {
            on_path[v] = 1;
            dfs(anchor, v, cid, wa2, wc2);
            on_path[v] = 0;
          }
        }
      };
  for (int anchor = 0; anchor < g.n; ++anchor) {
    if (!reach[anchor] || comp[anchor] < 0 || !live[comp[anchor]]) continue;
    on_path[anchor] = 1;
    dfs(anchor, anchor, comp[anchor], 0, 0);
    on_path[anchor] = 0;
  }

  Rational result = best ? *best : Rational(1);
  if (silent && Rational(1) < result) result = 1;
  if (result > 1) result = 1;  // reports clamp to [0, 1]; keep the oracle aligned
  return result;
}

std::vector<int> witness_edges(const ProductGraph& pg, const CrWitness& w, int rounds) {
  std::vector<int> out = w.path;
  if (!w.multi) {
    if (w.cycle.empty()) return out;
    for (int r = 0; r < rounds; ++r) out.insert(out.end(), w.cycle.begin(), w.cycle.end());
    return out;
  }
  if (w.multicycle.cycles.empty()) return out;
  NodeMask alive = prune_safety(pg.g, pg.x);
  // An accepting node of the witness component keeps liveness honest; the
  // walk detours through it once per round.
  const int head = pg.g.efrom[w.multicycle.cycles.front().front()];
  std::vector<int> comp;
  const int nc = scc_decompose(pg.g, alive, comp);
  (void)nc;
  std::optional<int> via;
  for (int v = 0; v < pg.g.n; ++v)
    if (comp[v] >= 0 && comp[v] == comp[head] && pg.y[v]) {
      via = v;
      break;
    }
  NodeMask cmask(pg.g.n, 0);
  for (int v = 0; v < pg.g.n; ++v) cmask[v] = comp[v] >= 0 && comp[v] == comp[head];
  WitnessWalk walk(pg.g, w.multicycle, cmask, via);
  // Rounds grow linearly; enough next() calls to cover `rounds` of them.
  std::int64_t budget = 0;
  for (int r = 1; r <= rounds; ++r)
    for (std::size_t i = 0; i < w.multicycle.cycles.size(); ++i)
      budget += static_cast<std::int64_t>(r) * to_i64(w.multicycle.mult[i]) *
                    static_cast<std::int64_t>(w.multicycle.cycles[i].size()) +
                static_cast<std::int64_t>(pg.g.n);
  for (std::int64_t i = 0; i < budget; ++i) out.push_back(walk.next());
  return out;
}

std::vector<ReleaseMask> witness_releases(const ProductGraph& pg, const std::vector<int>& edges) {
  std::vector<ReleaseMask> rel;
  rel.reserve(edges.size());
  for (int e : edges) {
    if (e < 0 || e >= pg.g.m()) fail(errc::internal, "walk edge out of range");
    rel.push_back(pg.input[e]);
  }
  return rel;
}

namespace {

EdgeDesc describe_edge(const ProductGraph& pg, int e) {
  EdgeDesc d;
  d.from = pg.g.efrom[e];
  d.to = pg.g.eto[e];
  d.releases = pg.input[e];
  d.output = pg.output[e];
  d.wa = pg.wa[0][e];
  d.wc = pg.wc[0][e];
  return d;
}

}  // namespace

CrReport competitive_ratio(const Taskset& ts, const AnalysisOptions& opt,
                           ProductGraph* keep_product) {
  const auto t0 = std::chrono::steady_clock::now();
  const int cap32 = static_cast<int>(
      std::min<std::int64_t>(opt.state_cap, std::numeric_limits<int>::max()));

  Lts online;
  if (opt.scheduler_lts) {
    online = *opt.scheduler_lts;
    online.finalize();
    if (online.num_tasks != static_cast<int>(ts.size()))
      fail(errc::parse, "scheduler transducer task count does not match the taskset");
    if (!online.deterministic())
      fail(errc::parse, "scheduler transducer is not deterministic");
    std::string why;
    if (!online.input_enabled(&why))
      fail(errc::parse, "scheduler transducer is not input-enabled: " + why);
  } else {
    auto policy = make_policy(opt.scheduler);
    OnlineOptions oo;
    oo.retention = opt.retention;
    oo.prune_unschedulable = opt.prune_unschedulable;
    oo.state_cap = cap32;
    online = build_online_lts(ts, *policy, oo).lts;
  }

  ClairvoyantLts clair = build_clairvoyant_lts(ts, cap32);
  ConstraintSet cons = build_constraints(opt.constraints, ts, cap32);

  ProductGraph pg = build_product(online, clair.lts, cons.safety, cons.liveness, cons.limitavg,
                                  opt.state_cap);
  pg.d_max = ts.d_max();

  CrReport rep;
  rep.d_max = ts.d_max();
  rep.online_states = online.num_states;
  rep.clair_states = clair.lts.num_states;
  rep.safety_states = cons.safety.lts.num_states;
  rep.liveness_states = cons.liveness.lts.num_states;
  rep.product_nodes = pg.g.n;
  rep.product_edges = pg.g.m();

  std::vector<Rational> lambda;
  for (const auto& la : cons.limitavg)
    lambda.insert(lambda.end(), la.thresholds.begin(), la.thresholds.end());

  if (opt.dry_run) {
    rep.dry_run = true;
    rep.cr = rep.lo = rep.hi = Rational(0);
    rep.exact = false;
  } else {
    SearchResult sr = lambda.empty() ? adaptive_binary_search(pg)
                                     : cr_with_limitavg(pg, lambda, opt.epsilon);
    rep.cr = sr.cr;
    rep.exact = sr.exact;
    rep.lo = sr.lo;
    rep.hi = sr.hi;
    rep.warnings = std::move(sr.warnings);
    rep.probes = sr.probes;
    if (opt.want_witness && sr.has_witness) {
      rep.has_witness = true;
      rep.witness = std::move(sr.witness);
      const std::vector<int>& period = rep.witness.multi && !rep.witness.multicycle.cycles.empty()
                                           ? rep.witness.multicycle.cycles.front()
                                           : rep.witness.cycle;
      for (int e : rep.witness.path) {
        rep.witness_path_desc.push_back(describe_edge(pg, e));
        rep.witness_path_releases.push_back(pg.input[e]);
      }
      for (int e : period) {
        rep.witness_cycle_desc.push_back(describe_edge(pg, e));
        rep.witness_cycle_releases.push_back(pg.input[e]);
      }
      if (rep.witness.multi) {
        for (const auto& cyc : rep.witness.multicycle.cycles) {
          std::vector<EdgeDesc> ds;
          for (int e : cyc) ds.push_back(describe_edge(pg, e));
          rep.witness_multicycle_desc.push_back(std::move(ds));
        }
        for (const BigInt& m : rep.witness.multicycle.mult)
          rep.witness_multiplicities.push_back(m.str());
      }
    }
  }
  if (keep_product) *keep_product = std::move(pg);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace crsched
