#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopcut/greedy.hpp"
#include "coopcut/instances.hpp"
#include "coopcut/polyflow.hpp"
#include "coopcut/relax.hpp"
#include "coopcut/solution.hpp"
#include "coopcut/surrogate.hpp"

namespace coopcut {

inline const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names = {"MC", "MB", "QU", "EA", "SG", "RI", "MI",
                                                 "PF", "CR", "DB", "GM", "GA", "GH"};
  return names;
}

inline bool known_solver(const std::string& name) {
  auto& n = solver_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

// Whether the solver runs on this instance in its mode.
inline bool applicable(const Instance& I, const std::string& name) {
  if (name == "QU") return I.global() && I.graph.is_undirected();
  if (name == "MB" || name == "MI") return I.graph.is_undirected();
  return true;
}

inline SolverReport solve_st(const Instance& I, const std::string& name, int s, int t,
                             const SolverParams& p = {}, const PolyCaps* caps = nullptr) {
  if (name == "MC") return solve_mc(I, s, t, p);
  if (name == "MB") return solve_mb(I, s, t, p);
  if (name == "EA") return solve_ea(I, s, t, p);
  if (name == "SG") return solve_semigradient(I, s, t, SemigradientInit::empty, p);
  if (name == "RI") return solve_semigradient(I, s, t, SemigradientInit::random_basis, p);
  if (name == "MI") return solve_semigradient(I, s, t, SemigradientInit::min_basis, p);
  if (name == "PF") return solve_pf(I, s, t, p, caps);
  if (name == "CR") return solve_cr(I, s, t, p);
  if (name == "DB") return solve_db(I, s, t, p);
  if (name == "GM") return solve_greedy_random(I, s, t, BetaMode::max, p.seed);
  if (name == "GA") return solve_greedy_random(I, s, t, BetaMode::almost, p.seed);
  if (name == "GH") return solve_greedy_det(I, s, t);
  if (name == "QU") throw std::invalid_argument("QU solves global instances only");
  throw std::invalid_argument("unknown solver: " + name);
}

// Global minimum cut through n-1 (s,t) runs with s = 0. QU and MB work on the
// global problem directly.
inline SolverReport run_global(const Instance& I, const std::string& name, const SolverParams& p = {}) {
  const Graph& g = I.graph;
  if (g.n() < 2) throw std::invalid_argument("global cut needs two nodes");
  if (name == "QU") return solve_queyranne(I, p);
  if (name == "MB") return solve_mb(I, -1, -1, p);
  Stopwatch sw;
  std::optional<PolyCaps> caps;
  if (name == "PF") caps.emplace(g, *I.arc_cost);
  SolverReport best;
  best.solution.solver = name;
  int iterations = 0;
  double cert_max = 0;
  bool has_cert = false;
  for (int t = 1; t < g.n(); ++t) {
    SolverParams pt = p;
    pt.seed = derive_seed(p.seed, static_cast<std::uint64_t>(t));
    auto r = solve_st(I, name, 0, t, pt, caps ? &*caps : nullptr);
    iterations += r.iterations;
    if (r.extra.contains("certificate")) {
      has_cert = true;
      cert_max = std::max(cert_max, r.extra["certificate"].get<double>());
    }
    if (better(r.solution, best.solution)) best = std::move(r);
  }
  best.iterations = iterations;
  best.extra["sink"] = best.solution.t;
  if (has_cert) best.extra["certificate_max"] = cert_max;
  best.oracle_calls = sw.calls();
  best.wall_ms = sw.ms();
  return best;
}

inline SolverReport run_solver(const Instance& I, const std::string& name, const SolverParams& p = {}) {
  if (!known_solver(name)) throw std::invalid_argument("unknown solver: " + name);
  return I.global() ? run_global(I, name, p) : solve_st(I, name, I.s, I.t, p);
}

}  // namespace coopcut
