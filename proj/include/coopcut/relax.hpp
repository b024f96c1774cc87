#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

#include "coopcut/graph.hpp"
#include "coopcut/instances.hpp"
#include "coopcut/lp.hpp"
#include "coopcut/solution.hpp"
#include "coopcut/submodular.hpp"

namespace coopcut {

struct FractionalSolution {
  std::vector<double> x;  // node potentials, x(s) = 1, x(t) = 0
  EdgeVector y;           // arc lengths, y = max(0, x(tail) - x(head))
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> log;  // objective per iterate
  int iterations = 0;
  bool exact = false;
};

// y(e) = max(0, x(tail) - x(head)) per arc.
inline EdgeVector arc_lengths(const Graph& g, const std::vector<double>& x) {
  EdgeVector y(g.m());
  for (int a = 0; a < g.m(); ++a) y[a] = std::max(0.0, x[g.arc(a).tail] - x[g.arc(a).head]);
  return y;
}

inline std::vector<int> bfs_hops(const Graph& g, int src, bool reverse) {
  std::vector<int> d(g.n(), -1);
  std::queue<int> q;
  d[src] = 0;
  q.push(src);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int a : reverse ? g.in(u) : g.out(u)) {
      int v = reverse ? g.arc(a).tail : g.arc(a).head;
      if (d[v] < 0) d[v] = d[u] + 1, q.push(v);
    }
  }
  return d;
}

// x(v) = d_t(v) / (d_s(v) + d_t(v)) in hop counts.
inline std::vector<double> hop_potentials(const Graph& g, int s, int t) {
  auto ds = bfs_hops(g, s, false), dt = bfs_hops(g, t, true);
  std::vector<double> x(g.n());
  for (int v = 0; v < g.n(); ++v) {
    if (ds[v] < 0) x[v] = 0;
    else if (dt[v] < 0) x[v] = 1;
    else x[v] = static_cast<double>(dt[v]) / (ds[v] + dt[v]);
  }
  x[s] = 1, x[t] = 0;
  return x;
}

struct RelaxationParams {
  int iters = 2000;
  double step_scale = 0;  // 0 selects initial objective / m
  int polish_every = 50;  // level-set candidates of the iterate; 0 disables
};

// Best indicator vector 1[x > theta] over thresholds theta in [0, 1).
inline std::pair<double, std::vector<double>> best_level_set(const Graph& g,
                                                             const SubmodularOracle& f,
                                                             const std::vector<double>& x) {
  std::vector<double> levels(x.begin(), x.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> arg;
  std::vector<double> ind(x.size());
  for (double theta : levels) {
    if (theta >= 1) break;
    for (std::size_t v = 0; v < x.size(); ++v) ind[v] = x[v] > theta ? 1.0 : 0.0;
    double val = lovasz_extension(f, arc_lengths(g, ind));
    if (val < best) best = val, arg = ind;
  }
  return {best, arg};
}

// Projected subgradient on x for min f~(y(x)) over the box with x(s), x(t) pinned.
inline FractionalSolution solve_relaxation(const Instance& I, int s, int t,
                                           const RelaxationParams& p = {}) {
  const Graph& g = I.graph;
  const SubmodularOracle& f = *I.arc_cost;
  check_terminals(g, s, t);
  FractionalSolution best;
  std::vector<double> x = hop_potentials(g, s, t);
  auto objective = [&](const std::vector<double>& xv) {
    double v = lovasz_extension(f, arc_lengths(g, xv));
    if (!std::isfinite(v)) throw std::domain_error("non-finite oracle value");
    return v;
  };
  double obj = objective(x);
  best.x = x, best.objective = obj;
  best.log.push_back(obj);
  const double a = p.step_scale > 0 ? p.step_scale : obj / std::max(1, g.m());
  for (int k = 1; k <= p.iters; ++k) {
    EdgeVector y = arc_lengths(g, x);
    EdgeVector z = greedy_vertex(f, y);
    std::vector<double> grad(g.n(), 0.0);
    for (int e = 0; e < g.m(); ++e) {
      if (!(y[e] > 0)) continue;
      grad[g.arc(e).tail] += z[e];
      grad[g.arc(e).head] -= z[e];
    }
    grad[s] = grad[t] = 0;
    double norm = 0;
    for (double v : grad) norm += v * v;
    if (norm == 0) break;
    // a / sqrt(k) is the decrease predicted by the linearization, so the step is
    // invariant under scaling f.
    const double step = a / std::sqrt(static_cast<double>(k)) / norm;
    for (int v = 0; v < g.n(); ++v) x[v] = std::clamp(x[v] - step * grad[v], 0.0, 1.0);
    obj = objective(x);
    best.log.push_back(obj);
    best.iterations = k;
    if (obj < best.objective) best.objective = obj, best.x = x;
    if (p.polish_every > 0 && (k % p.polish_every == 0 || k == p.iters)) {
      auto [val, ind] = best_level_set(g, f, x);
      if (val < best.objective) best.objective = val, best.x = ind;
    }
  }
  best.y = arc_lengths(g, best.x);
  best.objective = lovasz_extension(f, best.y);
  return best;
}

// Exact relaxation optimum by cutting planes on the vertices of P(f):
// min tau s.t. tau >= z^T y for generated greedy vertices z, y >= x(u) - x(v),
// x(s) = 1, x(t) = 0, 0 <= x <= 1. Every LP is solved over the rationals.
inline FractionalSolution solve_relaxation_exact(const Instance& I, int s, int t,
                                                 int max_rounds = 500) {
  const Graph& g = I.graph;
  const SubmodularOracle& f = *I.arc_cost;
  check_terminals(g, s, t);
  const int n = g.n(), m = g.m();
  const int tau = n + m;
  LinearProgram lp;
  lp.num_vars = n + m + 1;
  lp.objective.assign(lp.num_vars, 0);
  lp.objective[tau] = -1;
  for (int a = 0; a < m; ++a)
    lp.add_row({{{n + a, 1}, {g.arc(a).tail, -1}, {g.arc(a).head, 1}}, Sense::ge, 0});
  lp.add_row({{{s, 1}}, Sense::eq, 1});
  lp.add_row({{{t, 1}}, Sense::eq, 0});
  for (int v = 0; v < n; ++v) lp.add_row({{{v, 1}}, Sense::le, 1});

  FractionalSolution out;
  out.exact = true;
  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  std::vector<double> F(m);
  for (int round = 0; round < max_rounds; ++round) {
    LpResult r = solve_lp(lp);
    if (r.status != LpStatus::optimal) throw std::logic_error("relaxation LP not optimal");
    std::vector<Rational> y(r.x.begin() + n, r.x.begin() + n + m);
    std::vector<int> order = all;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return y[a] > y[b]; });
    f.prefix(order, F);
    std::vector<Rational> z(m);
    Rational zy = 0, prev = 0;
    for (int j = 0; j < m; ++j) {
      Rational Fj = to_rational(F[j]);
      z[order[j]] = Fj - prev;
      prev = Fj;
      zy += z[order[j]] * y[order[j]];
    }
    out.iterations = round + 1;
    out.log.push_back(to_double(zy));
    if (zy <= r.x[tau]) {
      out.x.resize(n);
      for (int v = 0; v < n; ++v) out.x[v] = to_double(r.x[v]);
      out.y = arc_lengths(g, out.x);
      out.objective = lovasz_extension(f, out.y);
      return out;
    }
    LpRow row;
    row.sense = Sense::ge;
    row.coefs.push_back({tau, 1});
    for (int a = 0; a < m; ++a)
      if (z[a] != 0) row.coefs.push_back({n + a, -z[a]});
    lp.add_row(std::move(row));
  }
  throw std::runtime_error("relaxation cutting planes did not converge");
}

struct ThresholdRounding {
  CutSolution cut;
  double theta = 0;
  double certificate = std::numeric_limits<double>::infinity();  // 1 / theta
  int prefix = 0;
};

// Adds arcs by descending y until the prefix cuts s from t, then prunes.
inline ThresholdRounding round_edge_threshold(const Instance& I, int s, int t, const EdgeVector& y,
                                              const std::string& name = "CR") {
  const Graph& g = I.graph;
  if (static_cast<int>(y.size()) != g.m()) throw std::invalid_argument("y size");
  auto order = descending_order(y);
  std::vector<int> C;
  ThresholdRounding out;
  for (int a : order) {
    C.push_back(a);
    if (is_st_cut(g, C, s, t)) {
      out.theta = y[a];
      break;
    }
  }
  out.prefix = static_cast<int>(C.size());
  out.certificate = out.theta > 0 ? 1.0 / out.theta : std::numeric_limits<double>::infinity();
  out.cut = finish_cut(I, C, s, t, name);
  return out;
}

struct DistanceRounding {
  CutSolution cut;
  double theta = 0;
  double expectation = 0;           // E_theta f(delta+(V_theta))
  double node_expectation = 0;      // E_theta sum_u f(delta+(V_theta) cap delta+(u))
  double node_lovasz = 0;           // sum_u f~(y restricted to delta+(u))
};

// Restriction of y to the out-arcs of u.
inline EdgeVector restrict_out(const Graph& g, const EdgeVector& y, int u) {
  EdgeVector r(g.m(), 0.0);
  for (int a : g.out(u)) r[a] = y[a];
  return r;
}

inline double node_lovasz_sum(const Instance& I, const EdgeVector& y) {
  double sum = 0;
  for (int u = 0; u < I.graph.n(); ++u) sum += lovasz_extension(*I.arc_cost, restrict_out(I.graph, y, u));
  return sum;
}

// Level sets V_theta = {v : x(v) > theta} over theta in [0, 1).
inline DistanceRounding round_distance(const Instance& I, int s, int t, std::vector<double> x,
                                       const std::string& name = "DB") {
  const Graph& g = I.graph;
  check_terminals(g, s, t);
  if (static_cast<int>(x.size()) != g.n()) throw std::invalid_argument("x size");
  for (auto& v : x) v = std::clamp(v, 0.0, 1.0);
  x[s] = 1, x[t] = 0;
  std::vector<double> levels(x.begin(), x.end());
  levels.push_back(0), levels.push_back(1);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  DistanceRounding out;
  out.cut.solver = name;
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
    const double theta = levels[j], width = levels[j + 1] - levels[j];
    std::vector<char> X(g.n());
    for (int v = 0; v < g.n(); ++v) X[v] = x[v] > theta;
    auto arcs = out_boundary(g, X);
    out.expectation += width * I.f(arcs);
    std::vector<std::vector<int>> per_node(g.n());
    for (int a : arcs) per_node[g.arc(a).tail].push_back(a);
    for (auto& part : per_node)
      if (!part.empty()) out.node_expectation += width * I.f(part);
    CutSolution c = finish_cut(I, arcs, s, t, name);
    if (better(c, out.cut)) out.cut = std::move(c), out.theta = theta;
  }
  out.node_lovasz = node_lovasz_sum(I, arc_lengths(g, x));
  return out;
}

// sum_u f~(y | delta+(u)) / f~(y).
inline double certificate_factor(const Instance& I, const EdgeVector& y) {
  const double whole = lovasz_extension(*I.arc_cost, y);
  const double parts = node_lovasz_sum(I, y);
  if (whole == 0) return parts == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return parts / whole;
}

struct CoopFlowResult {
  double nu = 0;
  Rational nu_exact = 0;
  EdgeVector phi;
  std::vector<std::vector<int>> active_sets;  // constraints phi(A) <= f(A) tight at the optimum
  int rounds = 0;
  int constraints = 0;
};

// Maximum cooperative flow over arcs by constraint generation with exact LPs.
inline CoopFlowResult max_coop_flow_small(const Instance& I, int s, int t, int max_arcs = 16,
                                          int max_rounds = 2000) {
  const Graph& g = I.graph;
  check_terminals(g, s, t);
  const int n = g.n(), m = g.m();
  if (m > max_arcs) throw std::invalid_argument("max_coop_flow_small: too many arcs");
  const auto table = subset_table(*I.arc_cost, max_arcs);
  const double tol = 1e-9 * std::max(1.0, *std::max_element(table.begin(), table.end()));
  std::vector<Rational> rtable(table.size());
  std::vector<char> have(table.size(), 0);

  LinearProgram lp;
  lp.num_vars = m + 1;
  lp.objective.assign(m + 1, 0);
  lp.objective[m] = 1;
  for (int u = 0; u < n; ++u) {
    LpRow row;
    row.sense = Sense::eq;
    for (int a : g.out(u)) row.coefs.push_back({a, 1});
    for (int a : g.in(u)) row.coefs.push_back({a, -1});
    if (u == s) row.coefs.push_back({m, -1});
    if (u == t) row.coefs.push_back({m, 1});
    lp.add_row(std::move(row));
  }
  std::vector<std::uint64_t> masks;
  auto add_mask = [&](std::uint64_t mask) {
    LpRow row;
    row.sense = Sense::le;
    for (int a = 0; a < m; ++a)
      if (mask >> a & 1) row.coefs.push_back({a, 1});
    row.rhs = to_rational(table[mask]);
    lp.add_row(std::move(row));
    masks.push_back(mask);
    have[mask] = 1;
  };
  for (int a = 0; a < m; ++a) add_mask(std::uint64_t{1} << a);

  CoopFlowResult out;
  std::vector<double> psum(table.size());
  for (int round = 0; round < max_rounds; ++round) {
    LpResult r = solve_lp(lp);
    if (r.status != LpStatus::optimal) throw std::logic_error("cooperative flow LP not optimal");
    out.rounds = round + 1;
    std::vector<double> phi(m);
    for (int a = 0; a < m; ++a) phi[a] = to_double(r.x[a]);
    psum[0] = 0;
    std::uint64_t worst = 0;
    double worst_slack = 0;
    std::vector<std::uint64_t> near;
    for (std::uint64_t mask = 1; mask < table.size(); ++mask) {
      int low = std::countr_zero(mask);
      psum[mask] = psum[mask & (mask - 1)] + phi[low];
      double slack = table[mask] - psum[mask];
      if (slack < worst_slack) worst_slack = slack, worst = mask;
      if (slack < tol && !have[mask]) near.push_back(mask);
    }
    if (worst_slack < -tol) {
      add_mask(worst);
      continue;
    }
    // Floating point says feasible; settle the near-tight sets exactly.
    bool added = false;
    for (auto mask : near) {
      Rational lhs = 0;
      for (int a = 0; a < m; ++a)
        if (mask >> a & 1) lhs += r.x[a];
      if (lhs > to_rational(table[mask])) add_mask(mask), added = true;
    }
    if (added) continue;
    out.nu_exact = r.x[m];
    out.nu = to_double(r.x[m]);
    out.phi = phi;
    out.constraints = static_cast<int>(masks.size());
    for (std::uint64_t mask = 1; mask < table.size(); ++mask) {
      Rational lhs = 0;
      bool any = false;
      for (int a = 0; a < m; ++a)
        if (mask >> a & 1) lhs += r.x[a], any = true;
      if (any && lhs == to_rational(table[mask])) out.active_sets.push_back(mask_to_set(mask));
    }
    return out;
  }
  throw std::runtime_error("cooperative flow constraint generation did not converge");
}

// min over nonempty P' of P of f(P') / |P'|.
inline double min_average_capacity(const SubmodularOracle& f, const std::vector<int>& P) {
  const int k = static_cast<int>(P.size());
  if (k > 20) throw std::invalid_argument("path too long for exhaustive search");
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> sub;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    sub.clear();
    for (int i = 0; i < k; ++i)
      if (mask >> i & 1) sub.push_back(P[i]);
    best = std::min(best, f.eval(sub) / static_cast<double>(sub.size()));
  }
  return best;
}

struct GapBounds {
  double lower = 0, upper = 0;  // bounds on f(C*) / nu*
  double optimum = 0;           // f(C*)
  double flow_upper = 0;        // sum over paths of the min average capacity
  double flow_lower = 0;        // max over paths of the same
  int paths = 0;
};

// Needs the arcs to split into arc-disjoint s-t paths covering the graph.
inline GapBounds flow_cut_gap_bounds(const Instance& I, int s, int t) {
  const Graph& g = I.graph;
  auto paths = enumerate_st_paths(g, s, t);
  std::vector<int> use(g.m(), 0);
  for (auto& P : paths)
    for (int a : P) ++use[a];
  for (int a = 0; a < g.m(); ++a)
    if (use[a] != 1) throw std::invalid_argument("graph is not a union of arc-disjoint s-t paths");
  GapBounds b;
  b.paths = static_cast<int>(paths.size());
  for (auto& P : paths) {
    double c = min_average_capacity(*I.arc_cost, P);
    b.flow_upper += c;
    b.flow_lower = std::max(b.flow_lower, c);
  }
  b.optimum = std::numeric_limits<double>::infinity();
  for (auto& c : enumerate_st_cuts(g, s, t)) b.optimum = std::min(b.optimum, I.f(c.arcs));
  b.lower = b.optimum / b.flow_upper;
  b.upper = b.optimum / b.flow_lower;
  return b;
}

inline FractionalSolution relaxation_for(const Instance& I, int s, int t, const SolverParams& p) {
  if (p.exact_relaxation) return solve_relaxation_exact(I, s, t);
  RelaxationParams rp;
  if (p.max_iters > 0) rp.iters = p.max_iters;
  return solve_relaxation(I, s, t, rp);
}

inline SolverReport solve_cr(const Instance& I, int s, int t, const SolverParams& p = {}) {
  Stopwatch sw;
  auto fr = relaxation_for(I, s, t, p);
  auto rr = round_edge_threshold(I, s, t, fr.y, "CR");
  SolverReport r;
  r.solution = rr.cut;
  r.surrogate_value = fr.objective;
  r.iterations = fr.iterations;
  r.extra["theta"] = rr.theta;
  r.extra["certificate"] = rr.certificate;
  r.extra["relaxation"] = fr.objective;
  r.oracle_calls = sw.calls();
  r.wall_ms = sw.ms();
  return r;
}

inline SolverReport solve_db(const Instance& I, int s, int t, const SolverParams& p = {}) {
  Stopwatch sw;
  auto fr = relaxation_for(I, s, t, p);
  auto dr = round_distance(I, s, t, fr.x, "DB");
  SolverReport r;
  r.solution = dr.cut;
  r.surrogate_value = fr.objective;
  r.iterations = fr.iterations;
  r.extra["theta"] = dr.theta;
  r.extra["expectation"] = dr.expectation;
  r.extra["certificate"] = certificate_factor(I, fr.y);
  r.extra["relaxation"] = fr.objective;
  r.oracle_calls = sw.calls();
  r.wall_ms = sw.ms();
  return r;
}

}  // namespace coopcut
