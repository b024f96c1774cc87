#pragma once

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "coopcut/graph.hpp"
#include "coopcut/instances.hpp"
#include "coopcut/rng.hpp"
#include "coopcut/solution.hpp"
#include "coopcut/submodular.hpp"

namespace coopcut {

// Min cut under per-element weights, pruned.
inline CutSolution modular_cut(const Instance& I, const EdgeVector& elem_w, int s, int t,
                               const std::string& name) {
  auto mc = min_st_cut_modular(I.graph, to_arc_weights(I.graph, elem_w), s, t);
  return finish_cut(I, mc.cut.arcs, s, t, name);
}

inline double modular_value(const Graph& g, const EdgeVector& elem_w, std::span<const int> arcs) {
  double v = 0;
  for (int e : g.elements_of(arcs)) v += elem_w[e];
  return v;
}

inline SolverReport solve_mc(const Instance& I, int s, int t, const SolverParams& = {}) {
  Stopwatch sw;
  auto w = element_singletons(*I.cost);
  SolverReport r;
  r.solution = modular_cut(I, w, s, t, "MC");
  r.surrogate_value = modular_value(I.graph, w, r.solution.arcs);
  r.iterations = 1;
  r.oracle_calls = sw.calls();
  r.wall_ms = sw.ms();
  return r;
}

// Squared singleton costs. sqrt(m * sum of these) bounds f from above.
inline EdgeVector ea_lite_weights(const SubmodularOracle& f) {
  auto w = element_singletons(f);
  for (auto& x : w) x *= x;
  return w;
}

inline double ea_lite_value(const EdgeVector& w2, std::span<const int> elements) {
  double s = 0;
  for (int e : elements) s += w2[e];
  return std::sqrt(static_cast<double>(w2.size()) * s);
}

inline SolverReport solve_ea(const Instance& I, int s, int t, const SolverParams& = {}) {
  Stopwatch sw;
  auto w2 = ea_lite_weights(*I.cost);
  SolverReport r;
  r.solution = modular_cut(I, w2, s, t, "EA");
  r.surrogate_value = ea_lite_value(w2, I.graph.elements_of(r.solution.arcs));
  r.iterations = 1;
  r.oracle_calls = sw.calls();
  r.wall_ms = sw.ms();
  return r;
}

// Gomory-Hu cut basis under singleton costs as node sides.
inline std::vector<TreeEdge> min_cut_basis(const Instance& I) {
  if (!I.graph.is_undirected()) throw std::invalid_argument("cut basis needs an undirected graph");
  return gomory_hu_tree(I.graph, element_singletons(*I.cost));
}

// Argmin of f over basis cuts; in s-t mode only cuts separating s and t count.
inline SolverReport solve_mb(const Instance& I, int s, int t, const SolverParams& = {}) {
  Stopwatch sw;
  auto tree = min_cut_basis(I);
  SolverReport r;
  r.solution.solver = "MB";
  for (auto& te : tree) {
    std::vector<char> X = te.side;
    CutSolution c;
    if (s < 0) {
      c = finish_global(I, global_cut_arcs(I.graph, X), "MB");
    } else {
      if (X[s] == X[t]) continue;
      if (!X[s])
        for (auto& x : X) x = !x;
      c = finish_cut(I, out_boundary(I.graph, X), s, t, "MB");
    }
    if (better(c, r.solution)) r.solution = std::move(c);
  }
  r.iterations = static_cast<int>(tree.size());
  r.oracle_calls = sw.calls();
  r.wall_ms = sw.ms();
  return r;
}

// Pendent-pair minimization of h(X) = f(delta X) over proper nonempty X.
// Supernodes are scanned in node order and ties go to the earliest one.
inline SolverReport solve_queyranne(const Instance& I, const SolverParams& = {}) {
  const Graph& g = I.graph;
  if (!g.is_undirected()) throw std::invalid_argument("Queyranne needs an undirected instance");
  if (g.n() < 2) throw std::invalid_argument("Queyranne needs two nodes");
  Stopwatch sw;
  const int n = g.n();
  auto h = [&](const std::vector<char>& X) {
    auto els = boundary_elements(g, X);
    return I.cost->eval(els);
  };
  std::vector<std::vector<int>> groups(n);
  for (int v = 0; v < n; ++v) groups[v] = {v};
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<char> best_X;
  int rounds = 0;
  while (groups.size() > 1) {
    const int k = static_cast<int>(groups.size());
    std::vector<std::vector<char>> gx(k, std::vector<char>(n, 0));
    std::vector<double> hg(k);
    for (int i = 0; i < k; ++i) {
      for (int v : groups[i]) gx[i][v] = 1;
      hg[i] = h(gx[i]);
    }
    std::vector<char> W = gx[0], used(k, 0);
    used[0] = 1;
    std::vector<int> seq{0};
    for (int step = 1; step < k; ++step) {
      int pick = -1;
      double pv = std::numeric_limits<double>::infinity();
      for (int i = 0; i < k; ++i) {
        if (used[i]) continue;
        std::vector<char> Wu = W;
        for (int v : groups[i]) Wu[v] = 1;
        double val = h(Wu) - hg[i];
        if (val < pv) pv = val, pick = i;
      }
      used[pick] = 1;
      seq.push_back(pick);
      for (int v : groups[pick]) W[v] = 1;
    }
    int last = seq[k - 1], prev = seq[k - 2];
    if (hg[last] < best_val) best_val = hg[last], best_X = gx[last];
    groups[prev].insert(groups[prev].end(), groups[last].begin(), groups[last].end());
    std::sort(groups[prev].begin(), groups[prev].end());
    groups.erase(groups.begin() + last);
    ++rounds;
  }
  SolverReport r;
  r.solution = finish_global(I, global_cut_arcs(g, best_X), "QU");
  r.surrogate_value = best_val;
  r.iterations = rounds;
  r.oracle_calls = sw.calls();
  r.wall_ms = sw.ms();
  return r;
}

// f(A) + sum_{B-A} f(e|A) - sum_{A-B} f(e|E-e); an upper bound on f(B) that is
// tight at B = A.
inline double supergradient_bound(const SubmodularOracle& f, std::span<const int> B,
                                  std::span<const int> A) {
  const int m = f.size();
  std::vector<char> inA(m, 0), inB(m, 0);
  for (int e : A) inA[e] = 1;
  for (int e : B) inB[e] = 1;
  std::vector<int> Av(A.begin(), A.end());
  const double fA = f.eval(Av);
  double v = fA;
  auto tail = tail_marginals(f);
  for (int e = 0; e < m; ++e) {
    if (inB[e] && !inA[e]) {
      Av.push_back(e);
      v += f.eval(Av) - fA;
      Av.pop_back();
    }
    if (inA[e] && !inB[e]) v -= tail[e];
  }
  return v;
}

// Uniform spanning tree of the underlying undirected graph (Wilson's
// algorithm), as a list of element ids. A disconnected graph gets one uniform
// tree per component.
inline std::vector<int> random_spanning_tree(const Graph& g, Rng& rng) {
  const int n = g.n();
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (int e = 0; e < g.num_elements(); ++e) {
    auto [u, v] = g.element_ends(e);
    adj[u].push_back({v, e});
    adj[v].push_back({u, e});
  }
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> members;
  for (int r = 0; r < n; ++r) {
    if (comp[r] >= 0) continue;
    members.emplace_back();
    std::vector<int> stack{r};
    comp[r] = static_cast<int>(members.size()) - 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      members.back().push_back(u);
      for (auto [v, e] : adj[u])
        if (comp[v] < 0) comp[v] = comp[r], stack.push_back(v);
    }
  }
  std::vector<char> in_tree(n, 0);
  for (auto& c : members) in_tree[c[rng.below(c.size())]] = 1;
  std::vector<int> next(n, -1), via(n, -1);
  std::vector<int> tree;
  for (int start = 0; start < n; ++start) {
    int u = start;
    while (!in_tree[u]) {
      auto [v, e] = adj[u][rng.below(adj[u].size())];
      next[u] = v, via[u] = e;
      u = v;
    }
    for (u = start; !in_tree[u]; u = next[u]) {
      in_tree[u] = 1;
      tree.push_back(via[u]);
    }
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

// Fundamental cuts of a spanning tree, as element sets.
inline std::vector<std::vector<int>> fundamental_cuts(const Graph& g, const std::vector<int>& tree) {
  const int n = g.n();
  std::vector<std::vector<int>> out;
  for (int skip : tree) {
    std::vector<std::vector<int>> adj(n);
    for (int e : tree) {
      if (e == skip) continue;
      auto [u, v] = g.element_ends(e);
      adj[u].push_back(v), adj[v].push_back(u);
    }
    std::vector<char> X(n, 0);
    int root = g.element_ends(skip).first;
    std::vector<int> stack{root};
    X[root] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!X[v]) X[v] = 1, stack.push_back(v);
    }
    out.push_back(boundary_elements(g, X));
  }
  return out;
}

enum class SemigradientInit { empty, random_basis, min_basis };

struct SemigradientRun {
  CutSolution best;
  std::vector<double> trace;  // f of each iterate
  int iterations = 0;
};

// Iterated min cuts under w(e) = f(e|E-e) on the previous cut, f(e|C) elsewhere.
inline SemigradientRun semigradient_descent(const Instance& I, int s, int t,
                                            std::vector<int> start_elements, int max_iters,
                                            const EdgeVector& tail, const std::string& name) {
  const Graph& g = I.graph;
  const SubmodularOracle& f = *I.cost;
  const int m = f.size();
  SemigradientRun run;
  run.best.solver = name;
  std::set<std::vector<int>> seen;
  const EdgeVector singles = element_singletons(f);
  double singles_sum = 0;
  for (double v : singles) singles_sum += v;
  std::vector<int> cur = std::move(start_elements);
  std::sort(cur.begin(), cur.end());
  for (int it = 0; it < max_iters; ++it) {
    std::vector<char> in(m, 0);
    for (int e : cur) in[e] = 1;
    EdgeVector w(m);
    std::vector<int> tmp = cur;
    const double fc = f.eval(tmp);
    for (int e = 0; e < m; ++e) {
      if (in[e]) {
        w[e] = tail[e];
      } else {
        tmp.push_back(e);
        w[e] = std::max(0.0, f.eval(tmp) - fc);
        tmp.pop_back();
      }
    }
    // Ties among surrogate minimizers go to the lower singleton cost.
    double wsum = 0;
    for (double v : w) wsum += v;
    const double eta = 1e-9 * (wsum > 0 ? wsum : 1.0) / std::max(singles_sum, 1e-300);
    for (int e = 0; e < m; ++e) w[e] += eta * singles[e];
    CutSolution c = modular_cut(I, w, s, t, name);
    run.trace.push_back(c.cost);
    ++run.iterations;
    auto els = g.elements_of(c.arcs);
    if (better(c, run.best)) run.best = c;
    if (!seen.insert(els).second) break;
    cur = std::move(els);
  }
  return run;
}

inline SolverReport solve_semigradient(const Instance& I, int s, int t, SemigradientInit init,
                                       const SolverParams& p = {}) {
  Stopwatch sw;
  const int max_iters = p.max_iters > 0 ? p.max_iters : 50;
  const std::string name = init == SemigradientInit::empty          ? "SG"
                           : init == SemigradientInit::random_basis ? "RI"
                                                                    : "MI";
  std::vector<std::vector<int>> starts;
  if (init == SemigradientInit::empty) {
    starts.push_back({});
  } else if (init == SemigradientInit::random_basis) {
    Rng rng(derive_seed(p.seed, 0x5249));
    starts = fundamental_cuts(I.graph, random_spanning_tree(I.graph, rng));
  } else {
    for (auto& te : min_cut_basis(I)) starts.push_back(boundary_elements(I.graph, te.side));
  }
  auto tail = tail_marginals(*I.cost);
  SolverReport r;
  r.solution.solver = name;
  json traces = json::array();
  for (auto& st : starts) {
    auto run = semigradient_descent(I, s, t, st, max_iters, tail, name);
    r.iterations += run.iterations;
    traces.push_back(run.trace);
    if (better(run.best, r.solution)) r.solution = run.best;
  }
  r.extra["traces"] = traces;
  r.oracle_calls = sw.calls();
  r.wall_ms = sw.ms();
  return r;
}

}  // namespace coopcut
