#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coopcut/oracles.hpp"
#include "coopcut/submodular.hpp"

namespace coopcut {

struct Arc {
  int tail = 0, head = 0;
};

// Directed simple graph. Each arc maps to a cost element; an undirected edge is a
// pair of opposing arcs (twins) sharing one element.
class Graph {
 public:
  class Builder {
   public:
    explicit Builder(int n) : n_(n) {
      if (n < 1) throw std::invalid_argument("graph needs at least one node");
    }
    // One directed arc that is its own cost element.
    int add_arc(int u, int v) {
      add(u, v, next_elem_, -1);
      elem_kind_.push_back(0);
      return next_elem_++;
    }
    // An undirected edge: two arcs, one element.
    int add_edge(int u, int v) {
      int a = static_cast<int>(arcs_.size());
      add(u, v, next_elem_, a + 1);
      add(v, u, next_elem_, a);
      elem_kind_.push_back(1);
      return next_elem_++;
    }
    Graph build() const {
      Graph g;
      g.n_ = n_;
      g.arcs_ = arcs_;
      g.elem_ = elem_;
      g.twin_ = twin_;
      g.undirected_elem_ = elem_kind_;
      g.num_elements_ = next_elem_;
      g.finish();
      return g;
    }

   private:
    void add(int u, int v, int e, int twin) {
      if (u < 0 || v < 0 || u >= n_ || v >= n_) throw std::out_of_range("arc endpoint out of range");
      if (u == v) throw std::invalid_argument("self-loops are not allowed");
      if (!seen_.insert({u, v}).second) throw std::invalid_argument("duplicate edge");
      arcs_.push_back({u, v});
      elem_.push_back(e);
      twin_.push_back(twin);
    }
    int n_;
    int next_elem_ = 0;
    std::vector<Arc> arcs_;
    std::vector<int> elem_, twin_;
    std::vector<char> elem_kind_;
    std::set<std::pair<int, int>> seen_;
  };

  Graph() = default;

  static Graph directed(int n, const std::vector<std::pair<int, int>>& arcs) {
    Builder b(n);
    for (auto [u, v] : arcs) b.add_arc(u, v);
    return b.build();
  }
  static Graph bidirect(int n, const std::vector<std::pair<int, int>>& edges) {
    Builder b(n);
    for (auto [u, v] : edges) b.add_edge(u, v);
    return b.build();
  }

  int n() const { return n_; }
  int m() const { return static_cast<int>(arcs_.size()); }
  int num_elements() const { return num_elements_; }
  const Arc& arc(int a) const { return arcs_[a]; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  int element(int a) const { return elem_[a]; }
  const std::vector<int>& element_map() const { return elem_; }
  int twin(int a) const { return twin_[a]; }
  bool element_is_undirected(int e) const { return undirected_elem_[e] != 0; }
  const std::vector<int>& element_arcs(int e) const { return elem_arcs_[e]; }
  const std::vector<int>& out(int v) const { return out_[v]; }
  const std::vector<int>& in(int v) const { return in_[v]; }
  bool is_undirected() const {
    return std::all_of(undirected_elem_.begin(), undirected_elem_.end(), [](char c) { return c; });
  }
  bool is_directed() const {
    return std::none_of(undirected_elem_.begin(), undirected_elem_.end(), [](char c) { return c; });
  }

  // Sorted, duplicate-free elements touched by a set of arcs.
  std::vector<int> elements_of(std::span<const int> arcs) const {
    std::vector<int> e;
    e.reserve(arcs.size());
    for (int a : arcs) e.push_back(elem_[a]);
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
  }

  // Endpoints of an element, as stored for its first arc.
  std::pair<int, int> element_ends(int e) const {
    const Arc& a = arcs_[elem_arcs_[e][0]];
    return {a.tail, a.head};
  }

 private:
  void finish() {
    out_.assign(n_, {});
    in_.assign(n_, {});
    elem_arcs_.assign(num_elements_, {});
    for (int a = 0; a < m(); ++a) {
      out_[arcs_[a].tail].push_back(a);
      in_[arcs_[a].head].push_back(a);
      elem_arcs_[elem_[a]].push_back(a);
    }
  }

  int n_ = 0;
  int num_elements_ = 0;
  std::vector<Arc> arcs_;
  std::vector<int> elem_, twin_;
  std::vector<char> undirected_elem_;
  std::vector<std::vector<int>> out_, in_, elem_arcs_;
};

// Cost of arc sets: the element oracle lifted through the arc-to-element map.
inline OraclePtr arc_cost(const Graph& g, OraclePtr element_cost) {
  if (element_cost->size() != g.num_elements())
    throw std::invalid_argument("cost ground set does not match graph elements");
  return std::make_shared<LiftedOracle>(std::move(element_cost), g.element_map());
}

struct Cut {
  std::vector<int> arcs;  // sorted arc ids
  double cost = 0;
  bool minimal = false;
};

// Nodes reachable from s without using arcs in `removed` (a 0/1 mask by arc).
inline std::vector<char> reachable(const Graph& g, int s, const std::vector<char>& removed) {
  std::vector<char> seen(g.n(), 0);
  std::vector<int> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int a : g.out(u)) {
      if (removed[a]) continue;
      int v = g.arc(a).head;
      if (!seen[v]) seen[v] = 1, stack.push_back(v);
    }
  }
  return seen;
}

inline std::vector<char> arc_mask(const Graph& g, std::span<const int> arcs) {
  std::vector<char> mask(g.m(), 0);
  for (int a : arcs) {
    if (a < 0 || a >= g.m()) throw std::out_of_range("arc id out of range");
    mask[a] = 1;
  }
  return mask;
}

inline void check_terminals(const Graph& g, int s, int t) {
  if (s < 0 || t < 0 || s >= g.n() || t >= g.n() || s == t)
    throw std::invalid_argument("invalid terminals");
}

inline bool is_st_cut(const Graph& g, std::span<const int> C, int s, int t) {
  check_terminals(g, s, t);
  return !reachable(g, s, arc_mask(g, C))[t];
}

// delta^+(X) for a node indicator X.
inline std::vector<int> out_boundary(const Graph& g, const std::vector<char>& X) {
  std::vector<int> c;
  for (int a = 0; a < g.m(); ++a)
    if (X[g.arc(a).tail] && !X[g.arc(a).head]) c.push_back(a);
  return c;
}

// Removing any single arc reconnects s and t.
inline bool is_minimal_cut(const Graph& g, std::span<const int> C, int s, int t) {
  if (!is_st_cut(g, C, s, t)) return false;
  auto mask = arc_mask(g, C);
  for (int a : C) {
    mask[a] = 0;
    bool still = !reachable(g, s, mask)[t];
    mask[a] = 1;
    if (still) return false;
  }
  return true;
}

// delta^+(V_s) where V_s is what s still reaches; a minimal cut inside C.
inline Cut prune_to_minimal(const Graph& g, std::span<const int> C, int s, int t) {
  check_terminals(g, s, t);
  auto Vs = reachable(g, s, arc_mask(g, C));
  if (Vs[t]) throw std::invalid_argument("prune_to_minimal: not an (s,t)-cut");
  // Arcs leaving V_s that cannot reach t anyway are dropped as well.
  Cut out;
  std::vector<char> reach_t(g.n(), 0);
  {
    std::vector<int> stack{t};
    reach_t[t] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int a : g.in(v)) {
        int u = g.arc(a).tail;
        if (!Vs[u] && !reach_t[u]) reach_t[u] = 1, stack.push_back(u);
      }
    }
  }
  for (int a : out_boundary(g, Vs))
    if (reach_t[g.arc(a).head]) out.arcs.push_back(a);
  out.minimal = true;
  return out;
}

// Shortest path under nonnegative arc lengths. Among shortest paths the one with
// fewest arcs wins, then the lexicographically smallest node sequence.
inline std::optional<std::vector<int>> shortest_path(const Graph& g, const EdgeVector& len, int s,
                                                     int t) {
  check_terminals(g, s, t);
  if (static_cast<int>(len.size()) != g.m()) throw std::invalid_argument("length vector size");
  for (double l : len)
    if (!(l >= 0)) throw std::invalid_argument("lengths must be nonnegative");
  using Key = std::pair<double, int>;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Key> dist(g.n(), {inf, 0});
  std::vector<char> done(g.n(), 0);
  std::priority_queue<std::pair<Key, int>, std::vector<std::pair<Key, int>>, std::greater<>> pq;
  dist[t] = {0, 0};
  pq.push({dist[t], t});
  while (!pq.empty()) {
    auto [k, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    done[v] = 1;
    for (int a : g.in(v)) {
      int u = g.arc(a).tail;
      Key cand{k.first + len[a], k.second + 1};
      if (cand < dist[u]) dist[u] = cand, pq.push({cand, u});
    }
  }
  if (dist[s].first == inf) return std::nullopt;
  std::vector<int> path;
  int u = s;
  std::vector<char> on_path(g.n(), 0);
  on_path[s] = 1;
  while (u != t) {
    const double tol = 1e-12 * std::max(1.0, dist[u].first);
    int best = -1;
    for (int a : g.out(u)) {
      int v = g.arc(a).head;
      if (on_path[v] || dist[v].first == inf) continue;
      if (dist[v].second + 1 != dist[u].second) continue;
      if (len[a] + dist[v].first > dist[u].first + tol) continue;
      if (best < 0 || v < g.arc(best).head) best = a;
    }
    if (best < 0) throw std::logic_error("shortest_path: reconstruction failed");
    path.push_back(best);
    u = g.arc(best).head;
    on_path[u] = 1;
  }
  return path;
}

// Dinic max-flow on arc capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : n_(n), adj_(n) {}

  // Returns the index of the forward residual edge.
  int add(int u, int v, double cap) {
    int id = static_cast<int>(to_.size());
    to_.push_back(v), cap_.push_back(cap), adj_[u].push_back(id);
    to_.push_back(u), cap_.push_back(0), adj_[v].push_back(id + 1);
    max_cap_ = std::max(max_cap_, cap);
    return id;
  }

  double run(int s, int t) {
    eps_ = 1e-12 * std::max(1.0, max_cap_);
    double flow = 0;
    while (bfs(s, t)) {
      it_.assign(n_, 0);
      while (true) {
        double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= eps_) break;
        flow += f;
      }
    }
    return flow;
  }

  // Residual reachability from s after run().
  std::vector<char> source_side(int s) const {
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int id : adj_[u])
        if (cap_[id] > eps_ && !seen[to_[id]]) seen[to_[id]] = 1, stack.push_back(to_[id]);
    }
    return seen;
  }

  double flow_on(int id) const { return cap_[id ^ 1]; }

 private:
  bool bfs(int s, int t) {
    level_.assign(n_, -1);
    std::deque<int> q{s};
    level_[s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int id : adj_[u])
        if (cap_[id] > eps_ && level_[to_[id]] < 0) level_[to_[id]] = level_[u] + 1, q.push_back(to_[id]);
    }
    return level_[t] >= 0;
  }
  double dfs(int u, int t, double pushed) {
    if (u == t) return pushed;
    for (int& i = it_[u]; i < static_cast<int>(adj_[u].size()); ++i) {
      int id = adj_[u][i];
      int v = to_[id];
      if (cap_[id] <= eps_ || level_[v] != level_[u] + 1) continue;
      double f = dfs(v, t, std::min(pushed, cap_[id]));
      if (f > eps_) {
        cap_[id] -= f;
        cap_[id ^ 1] += f;
        return f;
      }
    }
    return 0;
  }

  int n_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> to_;
  std::vector<double> cap_;
  std::vector<int> level_, it_;
  double max_cap_ = 0, eps_ = 0;
};

struct ModularCut {
  Cut cut;
  double value = 0;
  std::vector<char> source_side;
};

// Exact minimum (s,t)-cut for arc weights; the cut is delta^+ of the residual
// source side, so it is the cut with the smallest source side.
inline ModularCut min_st_cut_modular(const Graph& g, const EdgeVector& w, int s, int t) {
  check_terminals(g, s, t);
  if (static_cast<int>(w.size()) != g.m()) throw std::invalid_argument("weight vector size");
  MaxFlow mf(g.n());
  for (int a = 0; a < g.m(); ++a) {
    if (!(w[a] >= 0)) throw std::invalid_argument("weights must be nonnegative");
    mf.add(g.arc(a).tail, g.arc(a).head, w[a]);
  }
  ModularCut r;
  r.value = mf.run(s, t);
  r.source_side = mf.source_side(s);
  r.cut.arcs = out_boundary(g, r.source_side);
  r.cut.cost = 0;
  for (int a : r.cut.arcs) r.cut.cost += w[a];
  r.cut.minimal = false;
  return r;
}

struct TreeEdge {
  int u = 0, v = 0;
  double value = 0;
  std::vector<char> side;  // nodes on u's side once the tree edge is removed
};

// Gomory-Hu tree by the contraction construction, for undirected element
// weights. Each tree edge yields a cut delta(side) whose weight is the max-flow
// value between its endpoints.
inline std::vector<TreeEdge> gomory_hu_tree(const Graph& g, const EdgeVector& w) {
  if (!g.is_undirected()) throw std::invalid_argument("Gomory-Hu tree needs an undirected graph");
  if (static_cast<int>(w.size()) != g.num_elements()) throw std::invalid_argument("weight size");
  const int n = g.n();
  {
    std::vector<char> none(g.m(), 0);
    auto r = reachable(g, 0, none);
    if (std::find(r.begin(), r.end(), 0) != r.end())
      throw std::invalid_argument("Gomory-Hu tree needs a connected graph");
  }
  struct TEdge {
    int a, b;
    double w;
  };
  std::vector<std::vector<int>> super{std::vector<int>(n)};
  for (int v = 0; v < n; ++v) super[0][v] = v;
  std::vector<TEdge> tree;
  while (true) {
    int X = -1;
    for (int i = 0; i < static_cast<int>(super.size()); ++i)
      if (super[i].size() >= 2) {
        X = i;
        break;
      }
    if (X < 0) break;
    // Components of the tree with X removed, each contracted to one node.
    const int S = static_cast<int>(super.size());
    std::vector<int> comp(S, -1);
    int ncomp = 0;
    for (int start = 0; start < S; ++start) {
      if (start == X || comp[start] >= 0) continue;
      std::vector<int> stack{start};
      comp[start] = ncomp;
      while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        for (auto& e : tree) {
          int o = e.a == c ? e.b : e.b == c ? e.a : -1;
          if (o < 0 || o == X || comp[o] >= 0) continue;
          comp[o] = ncomp;
          stack.push_back(o);
        }
      }
      ++ncomp;
    }
    // Contracted graph: X's nodes keep their ids 0..|X|-1, components follow.
    std::vector<int> node_of(n, -1);
    for (int i = 0; i < static_cast<int>(super[X].size()); ++i) node_of[super[X][i]] = i;
    const int kx = static_cast<int>(super[X].size());
    for (int i = 0; i < S; ++i)
      if (i != X)
        for (int v : super[i]) node_of[v] = kx + comp[i];
    MaxFlow mf(kx + ncomp);
    std::map<std::pair<int, int>, double> merged;
    for (int e = 0; e < g.num_elements(); ++e) {
      auto [u, v] = g.element_ends(e);
      int a = node_of[u], b = node_of[v];
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      merged[{a, b}] += w[e];
    }
    for (auto& [ab, c] : merged) {
      mf.add(ab.first, ab.second, c);
      mf.add(ab.second, ab.first, c);
    }
    double val = mf.run(0, 1);
    auto side = mf.source_side(0);
    std::vector<int> xs, xt;
    for (int i = 0; i < kx; ++i) (side[i] ? xs : xt).push_back(super[X][i]);
    super[X] = xs;
    int Y = static_cast<int>(super.size());
    super.push_back(xt);
    for (auto& e : tree) {
      int other = e.a == X ? e.b : e.b == X ? e.a : -1;
      if (other < 0) continue;
      if (!side[kx + comp[other]]) (e.a == X ? e.a : e.b) = Y;
    }
    tree.push_back({X, Y, val});
  }
  std::vector<int> node_super(n);
  for (int i = 0; i < static_cast<int>(super.size()); ++i) node_super[super[i][0]] = i;
  std::vector<int> super_node(super.size());
  for (int v = 0; v < n; ++v) super_node[node_super[v]] = v;
  std::vector<TreeEdge> out;
  for (std::size_t k = 0; k < tree.size(); ++k) {
    TreeEdge te;
    te.u = super_node[tree[k].a];
    te.v = super_node[tree[k].b];
    te.value = tree[k].w;
    te.side.assign(n, 0);
    std::vector<int> stack{tree[k].a};
    std::vector<char> seen(super.size(), 0);
    seen[tree[k].a] = 1;
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      te.side[super_node[c]] = 1;
      for (std::size_t j = 0; j < tree.size(); ++j) {
        if (j == k) continue;
        int o = tree[j].a == c ? tree[j].b : tree[j].b == c ? tree[j].a : -1;
        if (o >= 0 && !seen[o]) seen[o] = 1, stack.push_back(o);
      }
    }
    out.push_back(std::move(te));
  }
  return out;
}

// Bottleneck (minimum edge) on the tree path between u and v.
inline double tree_bottleneck(const std::vector<TreeEdge>& tree, int n, int u, int v) {
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (auto& e : tree) adj[e.u].push_back({e.v, e.value}), adj[e.v].push_back({e.u, e.value});
  std::vector<double> best(n, -1);
  best[u] = std::numeric_limits<double>::infinity();
  std::vector<int> stack{u};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (auto [y, w] : adj[x])
      if (best[y] < 0) best[y] = std::min(best[x], w), stack.push_back(y);
  }
  return best[v];
}

// Minimal cuts delta^+(S) over all S containing s and not t, deduplicated.
inline std::vector<Cut> enumerate_st_cuts(const Graph& g, int s, int t, int cap = 16) {
  check_terminals(g, s, t);
  if (g.n() > cap) throw std::invalid_argument("enumerate_st_cuts: graph too large");
  std::vector<int> free;
  for (int v = 0; v < g.n(); ++v)
    if (v != s && v != t) free.push_back(v);
  std::set<std::vector<int>> seen;
  std::vector<Cut> out;
  std::vector<char> X(g.n());
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
    std::fill(X.begin(), X.end(), 0);
    X[s] = 1;
    for (std::size_t i = 0; i < free.size(); ++i)
      if (mask >> i & 1) X[free[i]] = 1;
    auto c = out_boundary(g, X);
    if (!is_minimal_cut(g, c, s, t)) continue;
    if (seen.insert(c).second) out.push_back({c, 0, true});
  }
  return out;
}

// Global cuts delta^+(X), X containing node 0, with both sides connected; for
// undirected graphs these are exactly the minimal global cuts.
inline std::vector<Cut> enumerate_global_cuts(const Graph& g, int cap = 16) {
  if (g.n() > cap) throw std::invalid_argument("enumerate_global_cuts: graph too large");
  if (g.n() < 2) throw std::invalid_argument("global cut needs two nodes");
  std::vector<Cut> out;
  std::set<std::vector<int>> seen;
  const int n = g.n();
  std::vector<char> X(n);
  auto connected = [&](char side) {
    int start = -1;
    for (int v = 0; v < n; ++v)
      if (X[v] == side) {
        start = v;
        break;
      }
    std::vector<char> seen_v(n, 0);
    std::vector<int> stack{start};
    seen_v[start] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int a : g.out(u)) {
        int v = g.arc(a).head;
        if (X[v] == side && !seen_v[v]) seen_v[v] = 1, stack.push_back(v);
      }
      for (int a : g.in(u)) {
        int v = g.arc(a).tail;
        if (X[v] == side && !seen_v[v]) seen_v[v] = 1, stack.push_back(v);
      }
    }
    for (int v = 0; v < n; ++v)
      if (X[v] == side && !seen_v[v]) return false;
    return true;
  };
  for (std::uint64_t mask = 0; mask + 1 < (std::uint64_t{1} << (n - 1)); ++mask) {
    X[0] = 1;
    for (int v = 1; v < n; ++v) X[v] = (mask >> (v - 1) & 1) ? 1 : 0;
    if (!connected(1) || !connected(0)) continue;
    auto c = out_boundary(g, X);
    if (c.empty()) continue;
    if (seen.insert(c).second) out.push_back({c, 0, true});
  }
  return out;
}

// Simple (s,t)-paths as arc lists, in DFS order by arc id.
inline std::vector<std::vector<int>> enumerate_st_paths(const Graph& g, int s, int t,
                                                        std::size_t cap = 100000) {
  check_terminals(g, s, t);
  std::vector<std::vector<int>> out;
  std::vector<int> path;
  std::vector<char> on(g.n(), 0);
  std::function<void(int)> rec = [&](int u) {
    if (u == t) {
      out.push_back(path);
      if (out.size() > cap) throw std::length_error("enumerate_st_paths: too many paths");
      return;
    }
    for (int a : g.out(u)) {
      int v = g.arc(a).head;
      if (on[v]) continue;
      on[v] = 1, path.push_back(a);
      rec(v);
      on[v] = 0, path.pop_back();
    }
  };
  on[s] = 1;
  rec(s);
  return out;
}

inline json graph_to_json(const Graph& g, int s = -1, int t = -1) {
  json edges = json::array();
  std::vector<int> undirected;
  for (int e = 0; e < g.num_elements(); ++e) {
    auto [u, v] = g.element_ends(e);
    edges.push_back({u, v});
    if (g.element_is_undirected(e)) undirected.push_back(e);
  }
  json j{{"n", g.n()}, {"edges", edges}, {"s", s}, {"t", t}};
  if (g.is_undirected()) {
    j["directed"] = false;
  } else {
    j["directed"] = true;
    if (!undirected.empty()) j["undirected"] = undirected;
  }
  return j;
}

struct GraphFile {
  Graph graph;
  int s = -1, t = -1;
};

inline GraphFile graph_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  const bool directed = j.at("directed").get<bool>();
  std::vector<char> und;
  auto edges = j.at("edges");
  und.assign(edges.size(), directed ? 0 : 1);
  if (directed && j.contains("undirected"))
    for (int e : j.at("undirected").get<std::vector<int>>()) und.at(e) = 1;
  Graph::Builder b(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    int u = edges[e].at(0).get<int>(), v = edges[e].at(1).get<int>();
    if (und[e])
      b.add_edge(u, v);
    else
      b.add_arc(u, v);
  }
  GraphFile f{b.build(), j.value("s", -1), j.value("t", -1)};
  return f;
}

}  // namespace coopcut
