#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "coopcut/graph.hpp"
#include "coopcut/instances.hpp"
#include "coopcut/rng.hpp"
#include "coopcut/solution.hpp"

namespace coopcut {

enum class BetaMode { max, almost };  // beta = min marginal, or 0.9 of it

struct GreedyStep {
  std::vector<int> path;
  double beta = 0;
  std::vector<double> marginals;  // f(e|C) at the start of the pass, in path order
  std::vector<int> added;
  bool forced = false;
};

struct GreedyTrace {
  std::vector<GreedyStep> steps;
  std::vector<int> raw;     // C before pruning
  double raw_cost = 0;
  std::vector<int> pruned;  // returned cut
};

namespace detail {

class LiveCut {
 public:
  LiveCut(const Instance& I) : I_(I), in_(I.graph.m(), 0), y_(I.graph.m(), 0.0) {}

  double value() const { return fc_; }
  double marginal(int a) {
    if (in_[a]) return 0;
    C_.push_back(a);
    double v = I_.f(C_) - fc_;
    C_.pop_back();
    return std::max(0.0, v);
  }
  void add(int a) {
    if (in_[a]) return;
    in_[a] = 1, y_[a] = 1;
    C_.push_back(a);
    fc_ = I_.f(C_);
  }
  const EdgeVector& lengths() const { return y_; }
  std::vector<int> arcs() const {
    auto c = C_;
    std::sort(c.begin(), c.end());
    return c;
  }

 private:
  const Instance& I_;
  std::vector<int> C_;
  std::vector<char> in_;
  EdgeVector y_;
  double fc_ = 0;
};

// Shortest path under the 0/1 lengths if it is still uncovered.
inline std::optional<std::vector<int>> uncovered_path(const Graph& g, const EdgeVector& y, int s,
                                                      int t) {
  auto p = shortest_path(g, y, s, t);
  if (!p) return std::nullopt;
  double len = 0;
  for (int a : *p) len += y[a];
  if (len >= 1) return std::nullopt;
  return p;
}

inline SolverReport finish_greedy(const Instance& I, const detail::LiveCut& C, int s, int t,
                                  const std::string& name, GreedyTrace* trace, Stopwatch& sw,
                                  int iterations) {
  SolverReport r;
  auto raw = C.arcs();
  r.solution = finish_cut(I, raw, s, t, name);
  r.iterations = iterations;
  r.extra["raw_size"] = raw.size();
  r.extra["raw_cost"] = C.value();
  if (trace) {
    trace->raw = raw;
    trace->raw_cost = C.value();
    trace->pruned = r.solution.arcs;
  }
  r.oracle_calls = sw.calls();
  r.wall_ms = sw.ms();
  return r;
}

}  // namespace detail

// Randomized path cover. Marginals follow the live C inside each pass; edges are
// visited from s to t. In the 0.9 mode a pass may add nothing; after 50 such
// passes in a row the cheapest edge on the path is added.
inline SolverReport solve_greedy_random(const Instance& I, int s, int t, BetaMode mode,
                                        std::uint64_t seed, GreedyTrace* trace = nullptr) {
  const Graph& g = I.graph;
  check_terminals(g, s, t);
  Stopwatch sw;
  const std::string name = mode == BetaMode::max ? "GM" : "GA";
  Rng rng(derive_seed(seed, mode == BetaMode::max ? 0x474d : 0x4741));
  detail::LiveCut C(I);
  const double factor = mode == BetaMode::max ? 1.0 : 0.9;
  int iterations = 0, empty_run = 0;
  const int max_passes = 1000 * (g.m() + 1);
  while (auto P = detail::uncovered_path(g, C.lengths(), s, t)) {
    if (++iterations > max_passes) throw std::runtime_error("greedy path cover did not terminate");
    GreedyStep step;
    step.path = *P;
    double mn = std::numeric_limits<double>::infinity();
    int argmin = -1;
    for (int a : *P) {
      double mv = C.marginal(a);
      step.marginals.push_back(mv);
      if (mv < mn) mn = mv, argmin = a;
    }
    step.beta = factor * mn;
    if (mn <= 0) {
      for (int a : *P)
        if (C.marginal(a) <= 0) C.add(a), step.added.push_back(a);
    } else {
      for (int a : *P) {
        double mv = C.marginal(a);
        double p = mv <= 0 ? 1.0 : step.beta / mv;
        if (rng.uniform() < p) C.add(a), step.added.push_back(a);
      }
    }
    if (step.added.empty()) {
      if (++empty_run >= 50) {
        C.add(argmin);
        step.added.push_back(argmin);
        step.forced = true;
        empty_run = 0;
      }
    } else {
      empty_run = 0;
    }
    if (trace) trace->steps.push_back(std::move(step));
  }
  return detail::finish_greedy(I, C, s, t, name, trace, sw, iterations);
}

// Adds the path edge of least marginal cost each pass; ties go to the lower arc id.
// The returned cut satisfies f(C) <= |C| f(C*).
inline SolverReport solve_greedy_det(const Instance& I, int s, int t,
                                     GreedyTrace* trace = nullptr) {
  const Graph& g = I.graph;
  check_terminals(g, s, t);
  Stopwatch sw;
  detail::LiveCut C(I);
  int iterations = 0;
  while (auto P = detail::uncovered_path(g, C.lengths(), s, t)) {
    ++iterations;
    GreedyStep step;
    step.path = *P;
    double mn = std::numeric_limits<double>::infinity();
    int argmin = -1;
    for (int a : *P) {
      double mv = C.marginal(a);
      step.marginals.push_back(mv);
      if (mv < mn || (mv == mn && a < argmin)) mn = mv, argmin = a;
    }
    step.beta = mn;
    C.add(argmin);
    step.added.push_back(argmin);
    if (trace) trace->steps.push_back(std::move(step));
  }
  auto r = detail::finish_greedy(I, C, s, t, "GH", trace, sw, iterations);
  r.extra["certificate"] = r.solution.arcs.size();
  return r;
}

inline json to_json(const GreedyTrace& tr) {
  json steps = json::array();
  for (auto& s : tr.steps)
    steps.push_back({{"path", s.path},
                     {"beta", s.beta},
                     {"marginals", s.marginals},
                     {"added", s.added},
                     {"forced", s.forced}});
  return {{"steps", steps}, {"raw", tr.raw}, {"raw_cost", tr.raw_cost}, {"pruned", tr.pruned}};
}

}  // namespace coopcut
