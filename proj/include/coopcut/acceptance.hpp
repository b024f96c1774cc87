#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "coopcut/bench.hpp"
#include "coopcut/solvers.hpp"

namespace coopcut {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  double budget = 0;  // seconds; 0 means no runtime limit
};

struct AcceptanceOptions {
  std::string out_dir = "acceptance_out";
  bool inject_fault = false;  // corrupt generated costs in the hygiene check
  std::uint64_t seed = 7;
};

namespace accept {

inline std::string num(double x, int prec = 10) {
  std::ostringstream o;
  o.precision(prec);
  o << x;
  return o.str();
}

inline std::string list(const std::vector<int>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "}";
}

class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (ok) return;
    if (failures_.size() < 4) failures_.push_back(what);
    ++failed_;
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return failed_ == 0; }
  std::string detail() const {
    std::string d = std::to_string(total_ - failed_) + "/" + std::to_string(total_) + " checks";
    for (auto& n : notes_) d += "; " + n;
    for (auto& f : failures_) d += "; FAIL " + f;
    if (failed_ > static_cast<int>(failures_.size()))
      d += "; (" + std::to_string(failed_ - static_cast<int>(failures_.size())) + " more failures)";
    return d;
  }

 private:
  int total_ = 0, failed_ = 0;
  std::vector<std::string> notes_, failures_;
};

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double rel_tol(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

// cost / optimum, with 0 / 0 read as 1.
inline double factor(double cost, double opt) {
  if (opt > 0) return cost / opt;
  return cost > 0 ? std::numeric_limits<double>::infinity() : 1.0;
}

inline std::vector<int> element_set(const Instance& I, const std::vector<int>& arcs) {
  return I.graph.elements_of(arcs);
}

// Longest simple s-t path in arcs.
inline int longest_path(const Graph& g, int s, int t) {
  std::size_t best = 0;
  for (auto& p : enumerate_st_paths(g, s, t)) best = std::max(best, p.size());
  return static_cast<int>(best);
}

inline Instance path_instance(int n) {
  Instance I = make_instance(gen_path_graph(n),
                             std::make_shared<MaxWeightOracle>(std::vector<double>(n - 1, 1.0)), 0,
                             n - 1, "custom");
  I.graph_class = "path";
  I.params = {{"n", n}};
  return I;
}

// ------------------------------------------------------------------ 1

inline void worst_case_b(Checks& c, const AcceptanceOptions& o) {
  Instance I = gen_worstcase(WorstCase::b, 10);
  auto opt = enumerated_optimum(I, 10);
  c.expect(opt.has_value() && opt->cost == 1.0,
           "enumerated optimum " + (opt ? num(opt->cost) : std::string("none")) + " != 1");
  if (opt)
    c.expect(element_set(I, opt->arcs) == element_set(I, I.known->arcs),
             "enumerated optimum is not E_k");
  SolverParams p;
  p.seed = o.seed;
  std::string costs;
  for (const char* name : {"MC", "MB", "EA", "SG", "RI", "MI", "PF", "CR", "DB", "GM", "GA", "GH"}) {
    auto r = run_global(I, name, p);
    costs += std::string(costs.empty() ? "" : " ") + name + "=" + num(r.solution.cost);
    c.expect(r.solution.cost == 1.0, std::string(name) + " cost " + num(r.solution.cost));
    c.expect(valid_solution(I, r.solution), std::string(name) + " returned an invalid cut");
  }
  c.note(costs);
  Instance Q = gen_worstcase(WorstCase::b, 10, 0.001, worstcase_adversarial_label());
  auto q = run_global(Q, "QU", p);
  auto v1 = node_cut(Q.graph, worstcase_node(Q, 1));
  c.expect(q.solution.cost == 101.0, "QU cost " + num(q.solution.cost) + " != 101");
  c.expect(element_set(Q, q.solution.arcs) == element_set(Q, v1), "QU cut is not delta(v1)");
  auto q_id = run_global(I, "QU", p);
  c.note("QU adversarial label " + list(worstcase_adversarial_label()) + " -> " +
         num(q.solution.cost) + ", identity label -> " + num(q_id.solution.cost));
}

// ------------------------------------------------------------------ 2

inline void worst_case_a(Checks& c, const AcceptanceOptions& o) {
  const double tol = 1e-12;
  Instance I = gen_worstcase(WorstCase::a, 10, 0.001);
  auto opt = enumerated_optimum(I, 10);
  const double fopt = opt ? opt->cost : -1;
  c.expect(close(fopt, 1.025, tol), "optimum " + num(fopt, 17) + " != 1.025");
  c.expect(close(I.known->value, 1.025, tol), "f_a(E_k) " + num(I.known->value, 17));
  const double fv1 = I.f(node_cut(I.graph, worstcase_node(I, 1)));
  const double fvn = I.f(node_cut(I.graph, worstcase_node(I, 10)));
  c.expect(close(fv1, 6.005, tol), "f_a(delta v1) " + num(fv1, 17));
  c.expect(close(fvn, 21.005, tol), "f_a(delta vn) " + num(fvn, 17));
  SolverParams p;
  p.seed = o.seed;
  std::string factors;
  double mc_factor = 0;
  for (auto& name : solver_names()) {
    auto r = run_global(I, name, p);
    const double fac = r.solution.cost / 1.025;
    if (name == "MC") mc_factor = fac;
    factors += (factors.empty() ? "" : " ") + name + "=" + num(fac, 6);
  }
  const bool mc_ok = close(mc_factor, 6.005 / 1.025, tol) || close(mc_factor, 21.005 / 1.025, tol);
  c.expect(mc_ok, "MC factor " + num(mc_factor, 17));
  c.note("factors " + factors);
}

// ------------------------------------------------------------------ 3

inline void convolution_witness(Checks& c, const AcceptanceOptions&) {
  Instance I = gen_convolution_example(1.5, 2.0, 0.001);
  auto h = [&](std::vector<int> C) { return fhat_pmf(I.graph, *I.arc_cost, C); };
  // Arc ids 0, 1, 2 are e1, e2, e3.
  const double small = h({1, 2}) - h({1});
  const double large = h({0, 1, 2}) - h({0, 1});
  c.expect(close(small, 0.5, 1e-12), "h(e3 | {e2}) = " + num(small, 17));
  c.expect(close(large, 2.0, 1e-12), "h(e3 | {e1,e2}) = " + num(large, 17));
  c.note("h(e3|{e2}) = " + num(small) + ", h(e3|{e1,e2}) = " + num(large));
}

// ------------------------------------------------------------------ 4

inline void flow_cut_gap(Checks& c, const AcceptanceOptions&) {
  const int n = 5;
  Instance I = path_instance(n);
  auto cf = max_coop_flow_small(I, 0, n - 1);
  c.expect(cf.nu_exact == Rational(1, 4), "nu* = " + cf.nu_exact.str());
  double mincut = std::numeric_limits<double>::infinity();
  for (auto& cut : enumerate_st_cuts(I.graph, 0, n - 1)) mincut = std::min(mincut, I.f(cut.arcs));
  c.expect(mincut == 1.0, "min cut " + num(mincut));
  const Rational gap = Rational(1) / cf.nu_exact;
  c.expect(gap == Rational(n - 1), "gap " + gap.str());
  auto gb = flow_cut_gap_bounds(I, 0, n - 1);
  c.expect(close(gb.lower, n - 1, 1e-12) && close(gb.upper, n - 1, 1e-12),
           "gap bounds [" + num(gb.lower) + ", " + num(gb.upper) + "]");
  auto fr = solve_relaxation(I, 0, n - 1);
  c.expect(close(fr.objective, 0.25, 1e-3), "relaxation objective " + num(fr.objective));
  c.note("nu* = " + cf.nu_exact.str() + ", min cut " + num(mincut) + ", gap " + gap.str() +
         ", relaxation " + num(fr.objective, 8) + " after " + std::to_string(fr.iterations) +
         " iterations");
}

// ------------------------------------------------------------------ 5

inline void duality(Checks& c, const AcceptanceOptions&) {
  std::map<std::string, int> fams;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Instance I = gen_random_small(seed, 6, 12);
    ++fams[I.family];
    PolyCaps caps(I.graph, *I.arc_cost);
    auto fs = max_polyflow(caps, I.s, I.t);
    c.expect(flow_feasible(caps, fs, I.s, I.t), I.id + ": infeasible flow");
    double best = std::numeric_limits<double>::infinity();
    for (auto& cut : enumerate_st_cuts(I.graph, I.s, I.t))
      best = std::min(best, fhat_pmf(I.graph, *I.arc_cost, cut.arcs));
    const double diff = std::abs(fs.value - best);
    worst = std::max(worst, diff);
    c.expect(diff <= 1e-9, I.id + ": flow " + num(fs.value, 17) + " vs cut " + num(best, 17));
  }
  std::string mix;
  for (auto& [f, k] : fams) mix += (mix.empty() ? "" : " ") + f + "=" + std::to_string(k);
  c.note("families " + mix);
  c.note("max |flow - min cut| = " + num(worst, 3));
}

// ------------------------------------------------------------------ 6

inline void surrogate_bounds(Checks& c, const AcceptanceOptions& o) {
  std::vector<Instance> insts;
  for (std::uint64_t seed = 101; seed <= 125; ++seed) insts.push_back(gen_random_small(seed, 6, 12));
  for (auto& fam : cost_families())
    insts.push_back(generate({"grid_i", {{"rows", 3}, {"cols", 3}}, fam, 1}));
  SolverParams p;
  p.seed = o.seed;
  Rng rng(derive_seed(o.seed, 0x5342));
  double worst_mc = 0, worst_ea = 0, worst_sg = 0;
  long long subsets = 0;
  for (auto& I : insts) {
    const SubmodularOracle& f = *I.cost;
    const int m = f.size();
    if (m > 12) continue;
    const auto table = subset_table(f, 12);
    const double tol = table_tolerance(table);
    const auto singles = element_singletons(f);
    const auto w2 = ea_lite_weights(f);
    const auto tail = tail_marginals(f);
    const std::uint64_t full = (std::uint64_t{1} << m) - 1;

    auto opt = enumerated_optimum(I, 10);
    c.expect(opt.has_value(), I.id + ": no enumerated optimum");
    if (!opt) continue;
    const auto copt = element_set(I, opt->arcs);

    auto fs = [&](std::uint64_t B, std::uint64_t A) {
      double v = table[A];
      for (int e = 0; e < m; ++e) {
        const bool a = A >> e & 1, b = B >> e & 1;
        if (b && !a) v += table[A | (std::uint64_t{1} << e)] - table[A];
        if (a && !b) v -= tail[e];
      }
      return v;
    };
    std::vector<std::uint64_t> anchors = {0, full, set_to_mask(copt)};
    for (int i = 0; i < 3; ++i) anchors.push_back(rng.below(full + 1));
    for (std::uint64_t B = 0; B <= full; ++B) {
      double add = 0, ea = 0;
      for (int e = 0; e < m; ++e)
        if (B >> e & 1) add += singles[e], ea += w2[e];
      ea = std::sqrt(m * ea);
      c.expect(table[B] <= add + tol, I.id + ": f > f_add at " + list(mask_to_set(B)));
      c.expect(table[B] <= ea + tol, I.id + ": f > f_ea at " + list(mask_to_set(B)));
      for (auto A : anchors)
        c.expect(table[B] <= fs(B, A) + tol, I.id + ": f > f_s(.;A) at B=" + list(mask_to_set(B)) +
                                                 " A=" + list(mask_to_set(A)));
      ++subsets;
    }
    // The oracle-level bound agrees with the table form.
    for (int i = 0; i < 8; ++i) {
      const std::uint64_t A = anchors[i % anchors.size()], B = rng.below(full + 1);
      const double sb = supergradient_bound(f, mask_to_set(B), mask_to_set(A));
      c.expect(close(sb, fs(B, A), tol), I.id + ": supergradient_bound disagrees with table");
      c.expect(close(supergradient_bound(f, mask_to_set(A), mask_to_set(A)), table[A], tol),
               I.id + ": supergradient bound not tight at A");
    }

    const double fopt = opt->cost, k = static_cast<double>(copt.size());
    const double kappa = curvature(f);
    const double bounds[3] = {k, std::sqrt(m * k), k / ((k - 1) * (1 - kappa) + 1)};
    const char* names[3] = {"MC", "EA", "SG"};
    double* worst[3] = {&worst_mc, &worst_ea, &worst_sg};
    std::vector<Cut> cuts = I.global() ? enumerate_global_cuts(I.graph)
                                       : enumerate_st_cuts(I.graph, I.s, I.t);
    for (int j = 0; j < 3; ++j) {
      auto r = run_solver(I, names[j], p);
      const double fc = r.solution.cost;
      c.expect(fc <= bounds[j] * fopt + tol,
               I.id + ": " + names[j] + " " + num(fc) + " > " + num(bounds[j]) + " * " + num(fopt));
      *worst[j] = std::max(*worst[j], factor(fc, fopt) / bounds[j]);
      if (j == 2) continue;
      // f(C) <= fhat(C) <= fhat(any cut) for the modular surrogates.
      auto fhat = [&](const std::vector<int>& arcs) {
        double s = 0;
        for (int e : element_set(I, arcs)) s += j == 0 ? singles[e] : w2[e];
        return j == 0 ? s : std::sqrt(m * s);
      };
      const double own = fhat(r.solution.arcs);
      c.expect(fc <= own + tol, I.id + ": " + names[j] + " f above its surrogate");
      for (auto& cut : cuts)
        c.expect(own <= fhat(cut.arcs) + tol, I.id + ": " + names[j] + " surrogate not minimal");
    }
  }
  c.note(std::to_string(insts.size()) + " instances, " + std::to_string(subsets) +
         " subsets; max factor/bound MC " + num(worst_mc, 4) + " EA " + num(worst_ea, 4) + " SG " +
         num(worst_sg, 4));
}

// ------------------------------------------------------------------ 7

inline void rounding_greedy(Checks& c, const AcceptanceOptions& o) {
  std::vector<Instance> insts;
  for (std::uint64_t seed = 201; seed <= 225; ++seed) insts.push_back(gen_random_small(seed, 6, 12));
  auto lb = gen_lowerbound_paths(3, 3, 5);
  insts.push_back(lb.h);
  insts.push_back(lb.f);
  insts.push_back(path_instance(5));
  insts.push_back(gen_convolution_example());
  Rng rng(derive_seed(o.seed, 0x5247));
  double worst_cr = 0, worst_db = 0, worst_gm = 0, worst_gap = -1e300;
  for (auto& I : insts) {
    const Graph& g = I.graph;
    const int s = I.s, t = I.t, n = g.n();
    auto opt = enumerated_optimum(I, 10);
    c.expect(opt.has_value(), I.id + ": no optimum");
    if (!opt) continue;
    const double fopt = opt->cost, tol = rel_tol(fopt);
    const int pmax = longest_path(g, s, t);
    c.expect(pmax <= n - 1, I.id + ": path longer than n-1");

    auto fr = solve_relaxation_exact(I, s, t);
    c.expect(fr.objective <= fopt + tol, I.id + ": relaxation above the optimum");

    auto tr = round_edge_threshold(I, s, t, fr.y);
    c.expect(tr.theta > 0, I.id + ": threshold zero");
    c.expect(tr.cut.cost <= fr.objective / tr.theta + tol,
             I.id + ": CR " + num(tr.cut.cost) + " above f~(y)/theta");
    c.expect(tr.certificate <= pmax + tol, I.id + ": 1/theta " + num(tr.certificate) + " > |P_max|");
    c.expect(tr.cut.cost <= (n - 1) * fopt + tol, I.id + ": CR above (n-1) f(C*)");
    worst_cr = std::max(worst_cr, factor(tr.cut.cost, fopt));

    auto dr = round_distance(I, s, t, fr.x);
    c.expect(close(dr.node_expectation, dr.node_lovasz, 1e-9),
             I.id + ": node expectation " + num(dr.node_expectation, 17) + " vs " +
                 num(dr.node_lovasz, 17));
    c.expect(dr.cut.cost <= dr.expectation + tol, I.id + ": DB above its expectation");
    c.expect(dr.expectation <= dr.node_expectation + tol, I.id + ": expectation above node sum");
    c.expect(dr.node_lovasz <= (n - 1) * fr.objective + tol, I.id + ": node sum above (n-1) f~(y)");
    c.expect(dr.cut.cost <= (n - 1) * fopt + tol, I.id + ": DB above (n-1) f(C*)");
    worst_db = std::max(worst_db, factor(dr.cut.cost, fopt));
    worst_gap = std::max(worst_gap, std::abs(dr.node_expectation - dr.node_lovasz));
    for (int k = 0; k < 3; ++k) {
      std::vector<double> x(n);
      for (auto& v : x) v = rng.uniform();
      x[s] = 1, x[t] = 0;
      auto d = round_distance(I, s, t, x);
      c.expect(close(d.node_expectation, d.node_lovasz, 1e-9), I.id + ": identity fails at random x");
      worst_gap = std::max(worst_gap, std::abs(d.node_expectation - d.node_lovasz));
    }

    auto gh = solve_greedy_det(I, s, t);
    const double cert = gh.extra["certificate"].get<double>();
    c.expect(gh.solution.cost <= cert * fopt + tol, I.id + ": GH above |C| f(C*)");

    const int runs = 200;
    std::vector<double> fac(runs);
    for (int k = 0; k < runs; ++k)
      fac[k] = factor(solve_greedy_random(I, s, t, BetaMode::max, derive_seed(o.seed, k)).solution.cost, fopt);
    const double mean = std::accumulate(fac.begin(), fac.end(), 0.0) / runs;
    double var = 0;
    for (double v : fac) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (runs - 1)) / std::sqrt(static_cast<double>(runs));
    c.expect(mean <= pmax + 2 * se + 1e-12, I.id + ": GM mean " + num(mean) + " > |P_max| + 2se");
    worst_gm = std::max(worst_gm, mean);
  }
  c.note(std::to_string(insts.size()) + " instances; max factor CR " + num(worst_cr, 4) + " DB " +
         num(worst_db, 4) + "; max GM mean " + num(worst_gm, 4) + "; max identity gap " +
         num(worst_gap, 3));
}

// ------------------------------------------------------------------ 8

inline void combinatorics(Checks& c, const AcceptanceOptions& o) {
  for (int n = 1; n <= 8; ++n) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    long long d = 0, dp = 0;
    do {
      int fixed_other = 0;
      for (int i = 1; i < n; ++i) fixed_other += perm[i] == i;
      if (fixed_other == 0) ++dp, d += perm[0] != 0;
    } while (std::next_permutation(perm.begin(), perm.end()));
    c.expect(DerangementTables::D(n) == d, "D(" + std::to_string(n) + ") = " +
                                               std::to_string(DerangementTables::D(n)) + " vs " +
                                               std::to_string(d));
    c.expect(DerangementTables::Dprime(n) == dp, "D'(" + std::to_string(n) + ") mismatch");
  }

  double worst = 0;
  for (int nB = 2; nB <= 5; ++nB) {
    std::vector<std::vector<int>> der;
    std::vector<int> perm(nB);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      bool ok = true;
      for (int i = 0; i < nB; ++i) ok = ok && perm[i] != i;
      if (ok) der.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    // The reduction's balance term on the same (C_s, C_t) arc sets.
    auto zero = std::vector<double>{};
    std::vector<std::pair<int, int>> no_edges;
    auto red = gen_bisection_reduction(nB, no_edges, zero, 1.0);
    const int full = (1 << nB) - 1;
    for (int cs = 0; cs <= full; ++cs)
      for (int ct = 0; ct <= full; ++ct) {
        double sum = 0;
        for (auto& sg : der) {
          int hits = 0;
          for (int i = 0; i < nB; ++i) hits += (cs >> i & 1) && (ct >> sg[i] & 1);
          sum += std::popcount(static_cast<unsigned>(cs)) + std::popcount(static_cast<unsigned>(ct)) - hits;
        }
        const double avg = sum / static_cast<double>(der.size());
        const double closed = f_bal(std::popcount(static_cast<unsigned>(cs)),
                                    std::popcount(static_cast<unsigned>(ct)),
                                    std::popcount(static_cast<unsigned>(cs & ct)), nB);
        std::vector<int> arcs;
        for (int i = 0; i < nB; ++i) {
          if (cs >> i & 1) arcs.push_back(red.s_arcs[i]);
          if (ct >> i & 1) arcs.push_back(red.t_arcs[i]);
        }
        const double oracle = red.inst.f(arcs);
        worst = std::max({worst, std::abs(avg - closed), std::abs(oracle - closed)});
        c.expect(close(avg, closed, 1e-12), "f_bal nB=" + std::to_string(nB) + " mismatch");
        c.expect(close(oracle, closed, 1e-12), "balance oracle nB=" + std::to_string(nB) + " mismatch");
      }
  }
  c.note("max f_bal error " + num(worst, 3));

  Rng rng(derive_seed(o.seed, 0x4253));
  int recovered = 0, trials = 0, naive_ok = 0;
  for (int nB : {4, 6}) {
    for (int rep = 0; rep < 4; ++rep) {
      std::vector<std::pair<int, int>> edges;
      std::vector<double> w;
      for (int u = 0; u < nB; ++u)
        for (int v = u + 1; v < nB; ++v)
          if (rng.bernoulli(0.6)) edges.push_back({u, v}), w.push_back(1 + static_cast<double>(rng.below(5)));
      if (edges.empty()) edges.push_back({0, 1}), w.push_back(1);
      double bf = std::numeric_limits<double>::infinity();
      for (int X = 0; X < (1 << nB); ++X) {
        if (std::popcount(static_cast<unsigned>(X)) != nB / 2) continue;
        double cw = 0;
        for (std::size_t i = 0; i < edges.size(); ++i)
          cw += ((X >> edges[i].first & 1) != (X >> edges[i].second & 1)) ? w[i] : 0;
        bf = std::min(bf, cw);
      }
      auto solve = [&](double beta, double& cut_w, int& side) {
        auto red = gen_bisection_reduction(nB, edges, w, beta);
        const Graph& g = red.inst.graph;
        const int s = nB, t = nB + 1;
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> best_arcs;
        for (auto& cut : enumerate_st_cuts(g, s, t)) {
          double v = red.inst.f(cut.arcs);
          if (v < best) best = v, best_arcs = cut.arcs;
        }
        auto X = reachable(g, s, arc_mask(g, best_arcs));
        side = 0;
        cut_w = 0;
        for (int v = 0; v < nB; ++v) side += X[v];
        for (std::size_t i = 0; i < edges.size(); ++i)
          cut_w += (X[edges[i].first] != X[edges[i].second]) ? w[i] : 0;
      };
      double cw = 0;
      int side = 0;
      solve(bisection_safe_beta(nB, w), cw, side);
      ++trials;
      const bool ok = side == nB / 2 && close(cw, bf, 1e-9);
      recovered += ok;
      c.expect(ok, "nB=" + std::to_string(nB) + ": reduction gives side " + std::to_string(side) +
                       " weight " + num(cw) + ", optimum " + num(bf));
      const double naive = 1 + std::accumulate(w.begin(), w.end(), 0.0);
      solve(naive, cw, side);
      naive_ok += side == nB / 2 && close(cw, bf, 1e-9);
    }
  }
  c.note("bisections recovered " + std::to_string(recovered) + "/" + std::to_string(trials) +
         " (beta = 1 + w(E_B) recovers " + std::to_string(naive_ok) + ")");
}

// ------------------------------------------------------------------ 9

inline OraclePtr corrupt(const OraclePtr& f) {
  return std::make_shared<FunctionOracle>(
      f->size(),
      [f](std::span<const int> A) { return f->eval(A) + (A.size() == 2 ? 1.0 : 0.0); },
      "corrupted");
}

inline void generator_hygiene(Checks& c, const AcceptanceOptions& o) {
  std::vector<std::pair<std::string, json>> graphs = {
      {"grid_i", {{"rows", 3}, {"cols", 3}}},
      {"clustered", {{"k", 2}, {"size", 3}, {"inter", 2}}},
      {"grid_ii", {{"rows", 2}, {"cols", 3}}}};
  int checked = 0;
  bool witness_noted = false;
  for (auto& [cls, params] : graphs)
    for (auto& fam : cost_families())
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Instance I = generate({cls, params, fam, seed});
        OraclePtr f = o.inject_fault ? corrupt(I.cost) : I.cost;
        const std::string id = I.id;
        c.expect(f->size() <= 12, id + ": more than 12 elements");
        if (f->size() > 12) continue;
        c.expect(check_normalized(*f), id + ": f(empty) != 0");
        auto mw = check_monotone(*f);
        c.expect(!mw, id + (mw ? ": not monotone at A=" + list(mw->A) + " e=" + std::to_string(mw->e)
                               : std::string()));
        auto sw = check_submodular(*f);
        if (sw && !witness_noted) {
          c.note("witness " + id + ": f(e|A)=" + num(sw->marginal_A) + " < f(e|B)=" +
                 num(sw->marginal_B) + " with A=" + list(sw->A) + " B=" + list(sw->B) +
                 " e=" + std::to_string(sw->e));
          witness_noted = true;
        }
        c.expect(!sw, id + ": not submodular");
        ++checked;
        // Same seed, same bytes; stored form reloads to the same instance.
        Instance J = generate({cls, params, fam, seed});
        c.expect(instance_to_json(I).dump() == instance_to_json(J).dump(), id + ": not reproducible");
        Instance K = instance_from_json(json::parse(instance_to_json(I).dump()));
        c.expect(content_hash(K) == content_hash(I), id + ": round trip changed the instance");
        c.expect(matches_regeneration(K), id + ": regeneration mismatch");
      }
  c.note(std::to_string(checked) + " generated costs checked");

  int verified = 0;
  std::vector<std::pair<std::string, json>> small = {
      {"grid_i", {{"rows", 2}, {"cols", 4}}},
      {"clustered", {{"k", 2}, {"size", 4}, {"inter", 2}}},
      {"grid_ii", {{"rows", 2}, {"cols", 3}}}};
  for (auto& [cls, params] : small)
    for (const char* fam : {"bestcut_i", "bestcut_ii"})
      for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        Instance I = generate({cls, params, fam, seed});
        c.expect(I.known.has_value(), I.id + ": no known optimum");
        if (!I.known) continue;
        auto opt = enumerated_optimum(I, 8);
        c.expect(opt.has_value(), I.id + ": not enumerable");
        if (!opt) continue;
        const double kv = I.known->value;
        c.expect(close(I.f(I.known->arcs), kv, rel_tol(kv)), I.id + ": stored value differs from f");
        c.expect(close(opt->cost, kv, rel_tol(kv)),
                 I.id + ": enumerated " + num(opt->cost) + " vs known " + num(kv));
        ++verified;
      }
  c.note(std::to_string(verified) + " bestcut optima verified by enumeration");
}

// ------------------------------------------------------------------ 10

inline void desk_benchmark(Checks& c, const AcceptanceOptions& o, double& bench_seconds) {
  BenchConfig cfg = bench_config_from_json(desk_config());
  auto t0 = std::chrono::steady_clock::now();
  auto br = run_bench(cfg);
  bench_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(br.invalid == 0, std::to_string(br.invalid) + " invalid cuts");
  c.expect(br.bound_violations == 0, std::to_string(br.bound_violations) + " bound violations");
  int bounded = 0;
  for (auto& r : br.rows) {
    c.expect(r.factor >= 1 - 1e-12, r.instance + " " + r.solver + ": factor below 1");
    if (r.bound) {
      ++bounded;
      c.expect(r.factor <= *r.bound * (1 + cfg.tolerance) + cfg.tolerance,
               r.instance + " " + r.solver + ": factor " + num(r.factor) + " > bound " + num(*r.bound));
    }
  }
  std::filesystem::create_directories(o.out_dir);
  const auto csv_path = (std::filesystem::path(o.out_dir) / "summary.csv").string();
  write_text(csv_path, summary_csv(br.summary));
  write_text((std::filesystem::path(o.out_dir) / "results.jsonl").string(), results_jsonl(br, true));
  write_text((std::filesystem::path(o.out_dir) / "summary.svg").string(), summary_svg(br.summary));
  std::ifstream in(csv_path);
  std::string header;
  std::getline(in, header);
  int lines = 0;
  for (std::string l; std::getline(in, l);) lines += !l.empty();
  c.expect(header == "family,solver,mean_factor,max_factor,mean_calls,mean_time_ms",
           "summary header '" + header + "'");
  c.expect(lines == static_cast<int>(br.summary.size()) && lines > 0, "summary rows missing");
  c.note(std::to_string(br.rows.size()) + " rows, " + std::to_string(bounded) + " with bounds, " +
         std::to_string(worker_count(cfg.threads)) + " threads, bench " + num(bench_seconds, 4) +
         " s, summary " + csv_path);
}

}  // namespace accept

struct CriterionDef {
  int id;
  std::string name;
  double budget;
  std::function<void(accept::Checks&, const AcceptanceOptions&)> run;
};

inline std::vector<CriterionDef> acceptance_criteria() {
  using namespace accept;
  return {
      {1, "worst case (b), n=10", 10, worst_case_b},
      {2, "worst case (a), n=10", 0, worst_case_a},
      {3, "convolution witness", 0, convolution_witness},
      {4, "flow-cut gap on a 5-node path", 0, flow_cut_gap},
      {5, "polymatroidal flow duality", 60, duality},
      {6, "surrogate bounds", 120, surrogate_bounds},
      {7, "rounding and greedy bounds", 180, rounding_greedy},
      {8, "derangements and bisection reduction", 60, combinatorics},
      {9, "generator hygiene", 0, generator_hygiene},
      {10, "desk benchmark", 600,
       [](accept::Checks& c, const AcceptanceOptions& o) {
         double s = 0;
         desk_benchmark(c, o, s);
       }},
  };
}

inline CriterionResult run_criterion(const CriterionDef& def, const AcceptanceOptions& o) {
  CriterionResult r;
  r.id = def.id;
  r.name = def.name;
  r.budget = def.budget;
  accept::Checks c;
  auto t0 = std::chrono::steady_clock::now();
  std::string error;
  try {
    def.run(c, o);
  } catch (const std::exception& e) {
    error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = def.budget <= 0 || r.seconds < def.budget;
  r.pass = c.ok() && error.empty() && in_time;
  r.detail = c.detail();
  if (!error.empty()) r.detail += "; exception: " + error;
  if (!in_time) r.detail += "; over budget " + accept::num(def.budget) + " s";
  return r;
}

inline std::string format_result(const CriterionResult& r) {
  std::ostringstream o;
  o << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << " (" << accept::num(r.seconds, 3)
    << " s";
  if (r.budget > 0) o << ", budget " << r.budget << " s";
  o << "): " << r.detail;
  return o.str();
}

// Runs the selected criteria (all when `only` is empty), printing one line each.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o,
                                                   const std::vector<int>& only,
                                                   std::ostream* log) {
  std::vector<CriterionResult> out;
  for (auto& def : acceptance_criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), def.id) == only.end()) continue;
    out.push_back(run_criterion(def, o));
    if (log) *log << format_result(out.back()) << std::endl;
  }
  return out;
}

}  // namespace coopcut
