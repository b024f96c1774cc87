#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "coopcut/graph.hpp"
#include "coopcut/instances.hpp"
#include "coopcut/solution.hpp"
#include "coopcut/submodular.hpp"

namespace coopcut {

// min over A containing element i of g(A) - phi(A), for g given as a table over
// subsets of a small ground set.
inline double residual_capacity(const std::vector<double>& g_table, const std::vector<double>& phi,
                                int i) {
  const int k = static_cast<int>(phi.size());
  if (g_table.size() != (std::size_t{1} << k)) throw std::invalid_argument("table size mismatch");
  if (i < 0 || i >= k) throw std::out_of_range("element outside incidence set");
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t A = 0; A < g_table.size(); ++A) {
    if (!(A >> i & 1)) continue;
    double p = 0;
    for (int j = 0; j < k; ++j)
      if (A >> j & 1) p += phi[j];
    best = std::min(best, g_table[A] - p);
  }
  return best;
}

// Same quantity evaluated through an oracle on the arcs `ground`.
inline double residual_capacity(const SubmodularOracle& f, std::span<const int> ground,
                                const std::vector<double>& phi, int i, int cap = 14) {
  const int k = static_cast<int>(ground.size());
  if (k > cap) throw std::invalid_argument("incidence set exceeds degree cap");
  auto r = sfm_bruteforce(
      k,
      [&](std::span<const int> A) {
        if (std::find(A.begin(), A.end(), i) == A.end()) return std::numeric_limits<double>::infinity();
        std::vector<int> arcs;
        double p = 0;
        for (int j : A) arcs.push_back(ground[j]), p += phi[j];
        return f.eval(arcs) - p;
      },
      cap);
  return r.value;
}

// Capacity tables of every in- and out-polymatroid. Polymatroid 2v is the
// in-set of v, 2v + 1 its out-set.
class PolyCaps {
 public:
  PolyCaps(const Graph& g, const SubmodularOracle& arc_cost, int degree_cap = 14) : g_(&g) {
    if (arc_cost.size() != g.m()) throw std::invalid_argument("arc cost size mismatch");
    const int n = g.n();
    arcs_.resize(2 * n);
    table_.resize(2 * n);
    pos_in_.assign(g.m(), -1);
    pos_out_.assign(g.m(), -1);
    for (int v = 0; v < n; ++v) {
      arcs_[2 * v] = g.in(v);
      arcs_[2 * v + 1] = g.out(v);
      for (int p = 2 * v; p <= 2 * v + 1; ++p) {
        auto& A = arcs_[p];
        std::sort(A.begin(), A.end());
        if (static_cast<int>(A.size()) > degree_cap)
          throw std::invalid_argument("node degree exceeds polymatroid cap");
        const std::size_t full = std::size_t{1} << A.size();
        table_[p].assign(full, 0.0);
        std::vector<int> sub;
        for (std::size_t mask = 1; mask < full; ++mask) {
          sub.clear();
          for (std::size_t j = 0; j < A.size(); ++j)
            if (mask >> j & 1) sub.push_back(A[j]);
          table_[p][mask] = arc_cost.eval(sub);
        }
        for (std::size_t j = 0; j < A.size(); ++j) (p % 2 ? pos_out_ : pos_in_)[A[j]] = static_cast<int>(j);
      }
    }
    double mx = 1;
    for (auto& t : table_)
      for (double x : t) mx = std::max(mx, std::abs(x));
    eps_ = 1e-11 * mx;
  }

  const Graph& graph() const { return *g_; }
  int num_polys() const { return static_cast<int>(arcs_.size()); }
  const std::vector<int>& arcs(int p) const { return arcs_[p]; }
  const std::vector<double>& table(int p) const { return table_[p]; }
  int in_poly(int a) const { return 2 * g_->arc(a).head; }
  int out_poly(int a) const { return 2 * g_->arc(a).tail + 1; }
  int pos_in(int a) const { return pos_in_[a]; }
  int pos_out(int a) const { return pos_out_[a]; }
  double eps() const { return eps_; }

 private:
  const Graph* g_;
  std::vector<std::vector<int>> arcs_;
  std::vector<std::vector<double>> table_;
  std::vector<int> pos_in_, pos_out_;
  double eps_ = 1e-11;
};

struct FlowState {
  EdgeVector phi;
  double value = 0;
  int augmentations = 0;
  std::vector<char> source_side;  // nodes whose out-hub is reachable at termination
};

// phi(A) <= cap(A) for every subset of every incidence set, and conservation.
inline bool flow_feasible(const PolyCaps& caps, const FlowState& fs, int s, int t, double tol = 1e-9) {
  const Graph& g = caps.graph();
  for (double x : fs.phi)
    if (x < -tol) return false;
  for (int p = 0; p < caps.num_polys(); ++p) {
    const auto& A = caps.arcs(p);
    const auto& T = caps.table(p);
    for (std::size_t mask = 1; mask < T.size(); ++mask) {
      double x = 0;
      for (std::size_t j = 0; j < A.size(); ++j)
        if (mask >> j & 1) x += fs.phi[A[j]];
      if (x > T[mask] + tol * std::max(1.0, T[mask])) return false;
    }
  }
  for (int v = 0; v < g.n(); ++v) {
    if (v == s || v == t) continue;
    double bal = 0;
    for (int a : g.in(v)) bal += fs.phi[a];
    for (int a : g.out(v)) bal -= fs.phi[a];
    if (std::abs(bal) > tol) return false;
  }
  return true;
}

namespace detail {

// Slack tables g(A) - phi(A) with lazy recomputation per polymatroid.
class SlackCache {
 public:
  SlackCache(const PolyCaps& caps, const EdgeVector& phi)
      : caps_(caps), phi_(phi), slack_(caps.num_polys()), valid_(caps.num_polys(), 0) {}
  void invalidate(int p) { valid_[p] = 0; }
  const std::vector<double>& slack(int p) {
    if (!valid_[p]) {
      const auto& A = caps_.arcs(p);
      const auto& T = caps_.table(p);
      auto& S = slack_[p];
      S.assign(T.size(), 0.0);
      std::vector<double> ph(T.size(), 0.0);
      for (std::size_t mask = 1; mask < T.size(); ++mask) {
        int low = __builtin_ctzll(mask);
        ph[mask] = ph[mask & (mask - 1)] + phi_[A[low]];
        S[mask] = T[mask] - ph[mask];
      }
      valid_[p] = 1;
    }
    return slack_[p];
  }
  // min slack over sets containing position i and avoiding position j (j < 0: no
  // exclusion).
  double min_slack(int p, int i, int j = -1) {
    const auto& S = slack(p);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 1; mask < S.size(); ++mask) {
      if (!(mask >> i & 1)) continue;
      if (j >= 0 && (mask >> j & 1)) continue;
      best = std::min(best, S[mask]);
    }
    return best;
  }

 private:
  const PolyCaps& caps_;
  const EdgeVector& phi_;
  std::vector<std::vector<double>> slack_;
  std::vector<char> valid_;
};

}  // namespace detail

// Augmenting paths over in/out hubs. Moves: F (raise an arc, tail-out to
// head-in), B (lower an arc, head-in to tail-out), I (in-hub to out-hub of a
// node) and J (out-hub to in-hub after lowering an out-arc). Raising an arc
// next to a lowered one in the same polymatroid needs positive exchange
// capacity. Paths are shortest by hop count; the step is the largest one that
// keeps every touched polymatroid feasible.
inline FlowState max_polyflow(const PolyCaps& caps, int s, int t, int max_augmentations = 200000) {
  const Graph& g = caps.graph();
  check_terminals(g, s, t);
  const int n = g.n(), m = g.m();
  const double eps = caps.eps();
  FlowState fs;
  fs.phi.assign(m, 0.0);
  detail::SlackCache cache(caps, fs.phi);
  // State: hub h (2v in, 2v+1 out) and tag (arrival arc, or -1 for a free arrival).
  auto key = [m](int hub, int tag) { return static_cast<std::size_t>(hub) * (m + 1) + (tag + 1); };
  const std::size_t nstates = static_cast<std::size_t>(2 * n) * (m + 1);
  enum Move : char { kNone, kF, kB, kI, kJ };
  std::vector<std::int64_t> parent(nstates);
  std::vector<char> move(nstates);
  std::vector<int> move_arc(nstates);
  std::vector<char> seen(nstates);
  while (true) {
    std::fill(seen.begin(), seen.end(), 0);
    std::deque<std::pair<int, int>> q;
    auto push = [&](int hub, int tag, std::int64_t par, Move mv, int arc) {
      auto k = key(hub, tag);
      if (seen[k]) return false;
      seen[k] = 1, parent[k] = par, move[k] = mv, move_arc[k] = arc;
      q.push_back({hub, tag});
      return true;
    };
    push(2 * s + 1, -1, -1, kNone, -1);
    push(2 * s, -1, -1, kNone, -1);
    std::int64_t sink = -1;
    auto is_sink = [&](int hub, int tag) {
      if (tag < 0) return false;
      if (hub == 2 * t) return cache.min_slack(2 * t, caps.pos_in(tag)) > eps;
      return hub == 2 * t + 1;
    };
    while (!q.empty() && sink < 0) {
      auto [hub, tag] = q.front();
      q.pop_front();
      const std::int64_t cur = static_cast<std::int64_t>(key(hub, tag));
      const int v = hub / 2;
      if (is_sink(hub, tag)) {
        sink = cur;
        break;
      }
      if (hub % 2 == 0) {
        // in-hub
        if (tag >= 0) {
          const int pi = caps.pos_in(tag);
          if (cache.min_slack(hub, pi) > eps) push(2 * v + 1, -1, cur, kI, -1);
          for (int a : g.in(v)) {
            if (a == tag || fs.phi[a] <= eps) continue;
            if (cache.min_slack(hub, pi, caps.pos_in(a)) > eps)
              push(2 * g.arc(a).tail + 1, a, cur, kB, a);
          }
        } else {
          for (int a : g.in(v))
            if (fs.phi[a] > eps) push(2 * g.arc(a).tail + 1, a, cur, kB, a);
        }
      } else {
        // out-hub
        if (tag < 0) {
          for (int a : g.out(v))
            if (cache.min_slack(hub, caps.pos_out(a)) > eps) push(2 * g.arc(a).head, a, cur, kF, a);
        } else {
          const int po = caps.pos_out(tag);
          for (int a : g.out(v)) {
            if (a == tag) continue;
            if (cache.min_slack(hub, caps.pos_out(a), po) > eps)
              push(2 * g.arc(a).head, a, cur, kF, a);
          }
          push(2 * v, -1, cur, kJ, -1);
        }
      }
    }
    if (sink < 0) {
      fs.source_side.assign(n, 0);
      for (int v = 0; v < n; ++v)
        for (int tag = -1; tag < m && !fs.source_side[v]; ++tag)
          if (seen[key(2 * v + 1, tag)]) fs.source_side[v] = 1;
      break;
    }
    if (fs.augmentations >= max_augmentations)
      throw std::runtime_error("max_polyflow: augmentation limit reached");
    // Net change per arc along the path.
    std::map<int, int> net;
    for (std::int64_t k = sink; parent[k] >= 0; k = parent[k]) {
      if (move[k] == kF) net[move_arc[k]] += 1;
      if (move[k] == kB) net[move_arc[k]] -= 1;
    }
    double alpha = std::numeric_limits<double>::infinity();
    std::map<int, std::vector<std::pair<int, int>>> touched;  // poly -> (position, delta)
    for (auto [a, d] : net) {
      if (d == 0) continue;
      if (d < 0) alpha = std::min(alpha, fs.phi[a] / -d);
      touched[caps.out_poly(a)].push_back({caps.pos_out(a), d});
      touched[caps.in_poly(a)].push_back({caps.pos_in(a), d});
    }
    for (auto& [p, ds] : touched) {
      bool any_pos = std::any_of(ds.begin(), ds.end(), [](auto x) { return x.second > 0; });
      if (!any_pos) continue;
      const auto& S = cache.slack(p);
      for (std::size_t mask = 1; mask < S.size(); ++mask) {
        int d = 0;
        for (auto [pos, dd] : ds)
          if (mask >> pos & 1) d += dd;
        if (d > 0) alpha = std::min(alpha, std::max(0.0, S[mask]) / d);
      }
    }
    if (!(alpha > eps) || !std::isfinite(alpha))
      throw std::logic_error("max_polyflow: augmenting path admits no positive step");
    for (auto [a, d] : net) {
      fs.phi[a] = std::max(0.0, fs.phi[a] + alpha * d);
      cache.invalidate(caps.out_poly(a));
      cache.invalidate(caps.in_poly(a));
    }
    ++fs.augmentations;
  }
  fs.value = 0;
  for (int a : g.in(t)) fs.value += fs.phi[a];
  for (int a : g.out(t)) fs.value -= fs.phi[a];
  return fs;
}

// delta^+ of the terminal source side, pruned to a minimal cut.
inline Cut extract_min_cut(const Graph& g, const FlowState& fs, int s, int t) {
  if (fs.source_side.empty() || !fs.source_side[s] || fs.source_side[t])
    throw std::invalid_argument("flow state has no valid source side");
  auto c = out_boundary(g, fs.source_side);
  return prune_to_minimal(g, c, s, t);
}

// Cheapest assignment of each cut arc to its tail or head, priced per node.
inline double fhat_pmf(const Graph& g, const SubmodularOracle& arc_cost, std::span<const int> C,
                       int cap = 20) {
  const int k = static_cast<int>(C.size());
  if (k > cap) throw std::invalid_argument("fhat_pmf: cut too large for exact evaluation");
  double best = std::numeric_limits<double>::infinity();
  std::map<int, std::vector<int>> groups;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    groups.clear();
    for (int j = 0; j < k; ++j) {
      const Arc& a = g.arc(C[j]);
      groups[(mask >> j & 1) ? a.head : a.tail].push_back(C[j]);
    }
    double v = 0;
    for (auto& [node, arcs] : groups) v += arc_cost.eval(arcs);
    best = std::min(best, v);
  }
  return best;
}

// Tails and heads of a cut.
inline std::pair<int, int> cut_width(const Graph& g, std::span<const int> C) {
  std::set<int> ds, dt;
  for (int a : C) ds.insert(g.arc(a).tail), dt.insert(g.arc(a).head);
  return {static_cast<int>(ds.size()), static_cast<int>(dt.size())};
}

inline SolverReport solve_pf(const Instance& I, int s, int t, const SolverParams& = {},
                             const PolyCaps* shared = nullptr) {
  Stopwatch sw;
  std::optional<PolyCaps> own;
  if (!shared) own.emplace(I.graph, *I.arc_cost);
  const PolyCaps& caps = shared ? *shared : *own;
  auto fs = max_polyflow(caps, s, t);
  auto cut = extract_min_cut(I.graph, fs, s, t);
  SolverReport r;
  r.solution = make_solution(I, cut.arcs, s, t, "PF");
  r.surrogate_value = fs.value;
  r.iterations = fs.augmentations;
  r.extra["flow_value"] = fs.value;
  r.oracle_calls = sw.calls();
  r.wall_ms = sw.ms();
  return r;
}

}  // namespace coopcut
