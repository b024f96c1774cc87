#include <gtest/gtest.h>

#include <cmath>

#include "coopcut/bench.hpp"
#include "coopcut/polyflow.hpp"

using namespace coopcut;

namespace {

double min_fhat(const Instance& I) {
  double best = std::numeric_limits<double>::infinity();
  for (auto& c : enumerate_st_cuts(I.graph, I.s, I.t))
    best = std::min(best, fhat_pmf(I.graph, *I.arc_cost, c.arcs));
  return best;
}

// h(X) = f(delta+(X)) over node sets containing s and avoiding t.
std::vector<double> node_cut_table(const Instance& I) {
  const int n = I.graph.n();
  std::vector<double> h(std::size_t{1} << n, 0.0);
  for (std::uint64_t mask = 0; mask < h.size(); ++mask) {
    std::vector<char> X(n);
    for (int v = 0; v < n; ++v) X[v] = mask >> v & 1;
    h[mask] = I.f(out_boundary(I.graph, X));
  }
  return h;
}

}  // namespace

TEST(Residual, MaxWeightPairSharesCapacity) {
  const double gamma = 2.0;
  std::vector<double> table{0, gamma, gamma, gamma};
  EXPECT_DOUBLE_EQ(residual_capacity(table, {0, 0}, 0), gamma);
  EXPECT_DOUBLE_EQ(residual_capacity(table, {0, 0}, 1), gamma);
  // Either arc alone may carry gamma; once one does, the other has nothing left.
  EXPECT_DOUBLE_EQ(residual_capacity(table, {gamma, 0}, 1), 0.0);
  EXPECT_DOUBLE_EQ(residual_capacity(table, {0.5, 0}, 1), 1.5);
  EXPECT_DOUBLE_EQ(residual_capacity(table, {0.5, 0}, 0), 1.5);
}

TEST(Residual, ModularIsIndependent) {
  std::vector<double> table{0, 1, 3, 4};
  EXPECT_DOUBLE_EQ(residual_capacity(table, {1, 0}, 1), 3.0);
  EXPECT_DOUBLE_EQ(residual_capacity(table, {0.25, 2}, 0), 0.75);
}

TEST(Residual, OracleMatchesTable) {
  MaxWeightOracle f({1.0, 2.0, 0.5});
  std::vector<int> ground{0, 1, 2};
  auto table = subset_table(f);
  std::vector<double> phi{0.5, 0.75, 0.25};
  for (int i = 0; i < 3; ++i)
    EXPECT_DOUBLE_EQ(residual_capacity(f, ground, phi, i), residual_capacity(table, phi, i));
  EXPECT_THROW(residual_capacity(table, phi, 3), std::out_of_range);
}

TEST(Polyflow, ModularEqualsClassicalMaxFlow) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng(seed);
    const int n = 4 + static_cast<int>(seed % 3);
    std::vector<std::pair<int, int>> arcs;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v && rng.bernoulli(0.45)) arcs.push_back({u, v});
    if (arcs.empty()) continue;
    Graph g = Graph::directed(n, arcs);
    std::vector<double> w(g.m());
    for (auto& x : w) x = rng.uniform(0.1, 3.0);
    Instance I = make_instance(g, std::make_shared<ModularOracle>(w), 0, n - 1);
    PolyCaps caps(I.graph, *I.arc_cost);
    auto fs = max_polyflow(caps, 0, n - 1);
    EXPECT_TRUE(flow_feasible(caps, fs, 0, n - 1)) << seed;
    EXPECT_NEAR(fs.value, min_st_cut_modular(I.graph, w, 0, n - 1).value, 1e-9) << seed;
  }
}

TEST(Polyflow, MaxWeightPath) {
  const double gamma = 1.75;
  Instance I = make_instance(gen_path_graph(5), std::make_shared<MaxWeightOracle>(std::vector<double>(4, gamma)),
                             0, 4);
  PolyCaps caps(I.graph, *I.arc_cost);
  auto fs = max_polyflow(caps, 0, 4);
  EXPECT_NEAR(fs.value, gamma, 1e-12);
}

TEST(Polyflow, ParallelPathsCoupledAtSource) {
  // s -> a -> t and s -> b -> t; a classical flow would carry 2 gamma.
  const double gamma = 3.0;
  Graph g = Graph::directed(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
  Instance I = make_instance(g, std::make_shared<MaxWeightOracle>(std::vector<double>(4, gamma)), 0, 3);
  PolyCaps caps(I.graph, *I.arc_cost);
  auto fs = max_polyflow(caps, 0, 3);
  EXPECT_NEAR(fs.value, gamma, 1e-12);
  EXPECT_TRUE(flow_feasible(caps, fs, 0, 3));
  EXPECT_NEAR(min_fhat(I), gamma, 1e-12);
}

TEST(Polyflow, ExtractedCutAttainsFlowValue) {
  for (std::uint64_t seed = 21; seed <= 60; ++seed) {
    Instance I = gen_random_small(seed);
    PolyCaps caps(I.graph, *I.arc_cost);
    auto fs = max_polyflow(caps, I.s, I.t);
    ASSERT_TRUE(flow_feasible(caps, fs, I.s, I.t)) << I.id;
    auto cut = extract_min_cut(I.graph, fs, I.s, I.t);
    EXPECT_TRUE(is_st_cut(I.graph, cut.arcs, I.s, I.t)) << I.id;
    EXPECT_TRUE(is_minimal_cut(I.graph, cut.arcs, I.s, I.t)) << I.id;
    const double best = min_fhat(I);
    EXPECT_NEAR(fs.value, best, 1e-9) << I.id;
    EXPECT_LE(fhat_pmf(I.graph, *I.arc_cost, cut.arcs), best + 1e-9) << I.id;
  }
}

TEST(Polyflow, WeakDuality) {
  for (std::uint64_t seed = 61; seed <= 80; ++seed) {
    Instance I = gen_random_small(seed);
    PolyCaps caps(I.graph, *I.arc_cost);
    auto fs = max_polyflow(caps, I.s, I.t);
    for (auto& c : enumerate_st_cuts(I.graph, I.s, I.t)) {
      double through = 0;
      for (int a : c.arcs) through += fs.phi[a];
      EXPECT_LE(fs.value, through + 1e-9) << I.id;
      EXPECT_LE(through, fhat_pmf(I.graph, *I.arc_cost, c.arcs) + 1e-9) << I.id;
    }
  }
}

TEST(Fhat, ConvolutionIsNotSubmodular) {
  const double a = 1.2, b = 3.0;
  Instance I = gen_convolution_example(a, b, 0.001);
  auto h = [&](std::vector<int> C) { return fhat_pmf(I.graph, *I.arc_cost, C); };
  EXPECT_NEAR(h({1, 2}) - h({1}), b - a, 1e-12);
  EXPECT_NEAR(h({0, 1, 2}) - h({0, 1}), b, 1e-12);
}

TEST(Fhat, UpperBoundsCostAndSplitsByNode) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Instance I = gen_random_small(seed);
    const Graph& g = I.graph;
    for (auto& c : enumerate_st_cuts(g, I.s, I.t)) {
      const double fh = fhat_pmf(g, *I.arc_cost, c.arcs);
      EXPECT_GE(fh + 1e-12, I.f(c.arcs)) << I.id;
      std::vector<std::vector<int>> by_tail(g.n()), by_head(g.n());
      for (int a : c.arcs) by_tail[g.arc(a).tail].push_back(a), by_head[g.arc(a).head].push_back(a);
      double out = 0, in = 0;
      for (int v = 0; v < g.n(); ++v) out += I.f(by_tail[v]), in += I.f(by_head[v]);
      EXPECT_LE(fh, std::min(out, in) + 1e-12) << I.id;
    }
  }
}

TEST(NodeCutFunction, SubadditiveButNotSubmodular) {
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Instance I = gen_random_small(seed);
    if (I.graph.n() > 6) continue;
    auto h = node_cut_table(I);
    const double tol = 1e-9 * std::max(1.0, *std::max_element(h.begin(), h.end()));
    for (std::uint64_t X = 0; X < h.size(); ++X)
      for (std::uint64_t Y = 0; Y < h.size(); ++Y) {
        EXPECT_LE(h[X | Y], h[X] + h[Y] + tol) << I.id;
        if (h[X] + h[Y] + tol < h[X | Y] + h[X & Y]) ++violations;
      }
  }
  EXPECT_GT(violations, 0);
}

TEST(Pf, WidthBound) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Instance I = gen_random_small(seed);
    auto opt = enumerated_optimum(I, 10);
    ASSERT_TRUE(opt);
    auto r = solve_pf(I, I.s, I.t);
    EXPECT_TRUE(valid_solution(I, r.solution)) << I.id;
    auto [ds, dt] = cut_width(I.graph, opt->arcs);
    EXPECT_LE(r.solution.cost, std::min(ds, dt) * opt->cost + 1e-9) << I.id;
    EXPECT_GE(r.solution.cost + 1e-9, opt->cost) << I.id;
  }
}

TEST(Pf, RejectsHighDegree) {
  auto g = Graph::directed(17, [] {
    std::vector<std::pair<int, int>> e;
    for (int v = 1; v < 17; ++v) e.push_back({0, v});
    return e;
  }());
  EXPECT_THROW(PolyCaps(g, ModularOracle(std::vector<double>(16, 1.0)), 14), std::invalid_argument);
}
