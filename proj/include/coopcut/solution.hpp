#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "coopcut/graph.hpp"
#include "coopcut/instances.hpp"
#include "coopcut/submodular.hpp"

namespace coopcut {

struct CutSolution {
  std::vector<int> arcs;  // sorted arc ids
  double cost = std::numeric_limits<double>::infinity();
  std::string solver;
  int s = -1, t = -1;  // the terminal pair the cut is minimal for
};

struct SolverReport {
  CutSolution solution;
  int iterations = 0;
  std::uint64_t oracle_calls = 0;
  double wall_ms = 0;
  double surrogate_value = std::numeric_limits<double>::quiet_NaN();
  json extra = json::object();  // solver specific certificates
};

struct SolverParams {
  std::uint64_t seed = 0;
  int max_iters = 0;  // 0 selects the solver default
  bool exact_relaxation = false;
};

// f({e}) for every element.
inline EdgeVector element_singletons(const SubmodularOracle& f) {
  EdgeVector w(f.size());
  for (int e = 0; e < f.size(); ++e) w[e] = f.eval({e});
  return w;
}

inline EdgeVector to_arc_weights(const Graph& g, const EdgeVector& per_element) {
  EdgeVector w(g.m());
  for (int a = 0; a < g.m(); ++a) w[a] = per_element[g.element(a)];
  return w;
}

inline CutSolution make_solution(const Instance& I, std::vector<int> arcs, int s, int t,
                                 const std::string& name) {
  std::sort(arcs.begin(), arcs.end());
  CutSolution c;
  c.cost = I.f(arcs);
  c.arcs = std::move(arcs);
  c.solver = name;
  c.s = s, c.t = t;
  return c;
}

// Prunes an (s,t)-cut to a minimal one and prices it.
inline CutSolution finish_cut(const Instance& I, std::span<const int> arcs, int s, int t,
                              const std::string& name) {
  return make_solution(I, prune_to_minimal(I.graph, arcs, s, t).arcs, s, t, name);
}

// A global cut delta^+(X), X holding node 0, pruned against the best sink.
inline CutSolution finish_global(const Instance& I, std::span<const int> arcs,
                                 const std::string& name) {
  const Graph& g = I.graph;
  auto side = reachable(g, 0, arc_mask(g, arcs));
  CutSolution best;
  for (int t = 1; t < g.n(); ++t) {
    if (side[t]) continue;
    auto c = finish_cut(I, arcs, 0, t, name);
    if (c.cost < best.cost || (c.cost == best.cost && c.arcs < best.arcs)) best = std::move(c);
  }
  if (best.s < 0) throw std::invalid_argument("not a global cut");
  return best;
}

inline bool better(const CutSolution& a, const CutSolution& b) {
  return a.cost < b.cost || (a.cost == b.cost && a.arcs < b.arcs);
}

// A solution is valid if it is a minimal cut for its recorded terminals, and for
// the instance's terminals in s-t mode.
inline bool valid_solution(const Instance& I, const CutSolution& c) {
  if (c.s < 0 || c.t < 0) return false;
  if (!I.global() && (c.s != I.s || c.t != I.t)) return false;
  if (!std::is_sorted(c.arcs.begin(), c.arcs.end())) return false;
  return is_minimal_cut(I.graph, c.arcs, c.s, c.t);
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()), calls_(thread_oracle_calls()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }
  std::uint64_t calls() const { return thread_oracle_calls() - calls_; }

 private:
  std::chrono::steady_clock::time_point start_;
  std::uint64_t calls_;
};

}  // namespace coopcut
