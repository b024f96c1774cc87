#include <gtest/gtest.h>

#include <numeric>

#include "coopcut/bench.hpp"
#include "coopcut/greedy.hpp"

using namespace coopcut;

namespace {

Instance modular_path(const std::vector<double>& w) {
  const int n = static_cast<int>(w.size()) + 1;
  return make_instance(gen_path_graph(n), std::make_shared<ModularOracle>(w), 0, n - 1);
}

int longest_simple_path(const Graph& g, int s, int t) {
  int best = 0;
  for (auto& P : enumerate_st_paths(g, s, t)) best = std::max(best, static_cast<int>(P.size()));
  return best;
}

}  // namespace

TEST(Gh, AdversarialInstanceFallsIntoTrap) {
  const double gamma = 1.0, eps = 0.01;
  for (int n : {4, 8}) {
    Instance I = gen_greedy_adversarial(n, gamma, eps);
    auto r = solve_greedy_det(I, I.s, I.t);
    auto trap = greedy_adversarial_trap(I);
    EXPECT_EQ(r.solution.arcs, trap) << n;
    EXPECT_NEAR(r.solution.cost, n * n / 4.0 * gamma * (1 - eps), 1e-9) << n;
    EXPECT_EQ(r.extra["certificate"].get<double>(), n * n / 4.0);
    EXPECT_LE(r.solution.cost, trap.size() * I.known->value + 1e-12);
  }
}

TEST(Gh, ModularPathIsOptimal) {
  Instance I = modular_path({3.0, 1.5, 0.5, 2.0});
  auto r = solve_greedy_det(I, 0, 4);
  EXPECT_EQ(r.solution.arcs, std::vector<int>{2});
  EXPECT_DOUBLE_EQ(r.solution.cost, 0.5);
  EXPECT_EQ(r.iterations, 1);
}

TEST(Gh, TiesGoToLowerArc) {
  Instance I = modular_path({1.0, 1.0, 1.0});
  EXPECT_EQ(solve_greedy_det(I, 0, 3).solution.arcs, std::vector<int>{0});
}

TEST(Gh, CertificateBound) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Instance I = gen_random_small(seed);
    auto opt = enumerated_optimum(I, 10);
    ASSERT_TRUE(opt);
    auto r = solve_greedy_det(I, I.s, I.t);
    const double cert = r.extra["certificate"].get<double>();
    EXPECT_EQ(cert, static_cast<double>(r.solution.arcs.size()));
    EXPECT_LE(r.solution.cost, cert * opt->cost + 1e-9 * std::max(1.0, opt->cost)) << I.id;
  }
}

TEST(Gh, Deterministic) {
  Instance I = gen_random_small(17);
  auto a = solve_greedy_det(I, I.s, I.t), b = solve_greedy_det(I, I.s, I.t);
  EXPECT_EQ(a.solution.arcs, b.solution.arcs);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Gm, MaxWeightPathKeepsOneArc) {
  const int n = 6;
  Instance I = make_instance(gen_path_graph(n), std::make_shared<MaxWeightOracle>(std::vector<double>(n - 1, 2.0)),
                             0, n - 1);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GreedyTrace tr;
    auto r = solve_greedy_random(I, 0, n - 1, BetaMode::max, seed, &tr);
    EXPECT_EQ(r.solution.arcs.size(), 1u);
    EXPECT_DOUBLE_EQ(r.solution.cost, 2.0);
    // Every marginal is 2 on the first pass, so every arc is taken with probability 1.
    ASSERT_EQ(tr.steps.size(), 1u);
    EXPECT_EQ(tr.steps[0].added.size(), static_cast<std::size_t>(n - 1));
    EXPECT_DOUBLE_EQ(tr.steps[0].beta, 2.0);
  }
}

TEST(Gm, MeanWithinLongestPath) {
  for (std::uint64_t seed = 300; seed < 310; ++seed) {
    Instance I = gen_random_small(seed);
    auto opt = enumerated_optimum(I, 10);
    ASSERT_TRUE(opt);
    if (opt->cost == 0) continue;
    const int runs = 100;
    double sum = 0;
    for (int k = 0; k < runs; ++k)
      sum += solve_greedy_random(I, I.s, I.t, BetaMode::max, k).solution.cost / opt->cost;
    EXPECT_LE(sum / runs, longest_simple_path(I.graph, I.s, I.t) + 1e-9) << I.id;
  }
}

TEST(GreedyTrace, CoverAtExitAndPruning) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Instance I = gen_random_small(seed);
    for (int which = 0; which < 3; ++which) {
      GreedyTrace tr;
      SolverReport r = which == 0   ? solve_greedy_det(I, I.s, I.t, &tr)
                       : which == 1 ? solve_greedy_random(I, I.s, I.t, BetaMode::max, seed, &tr)
                                    : solve_greedy_random(I, I.s, I.t, BetaMode::almost, seed, &tr);
      // y = 1 on the raw set gives every s-t path length at least one.
      for (auto& P : enumerate_st_paths(I.graph, I.s, I.t)) {
        bool hit = false;
        for (int a : P) hit = hit || std::binary_search(tr.raw.begin(), tr.raw.end(), a);
        EXPECT_TRUE(hit) << I.id << " " << which;
      }
      EXPECT_TRUE(std::includes(tr.raw.begin(), tr.raw.end(), tr.pruned.begin(), tr.pruned.end()));
      EXPECT_EQ(tr.pruned, r.solution.arcs);
      EXPECT_NEAR(tr.raw_cost, I.f(tr.raw), 1e-12);
      EXPECT_LE(r.solution.cost, tr.raw_cost + 1e-12) << I.id;
      EXPECT_TRUE(is_minimal_cut(I.graph, r.solution.arcs, I.s, I.t)) << I.id;
      for (auto& st : tr.steps) EXPECT_EQ(st.marginals.size(), st.path.size());
    }
  }
}

TEST(GreedyRandom, ReproducibleBySeed) {
  Instance I = gen_random_small(23);
  for (auto mode : {BetaMode::max, BetaMode::almost}) {
    auto a = solve_greedy_random(I, I.s, I.t, mode, 9);
    auto b = solve_greedy_random(I, I.s, I.t, mode, 9);
    EXPECT_EQ(a.solution.arcs, b.solution.arcs);
    EXPECT_EQ(a.iterations, b.iterations);
  }
}

TEST(GreedyRandom, AlmostModeTerminatesAndForces) {
  Instance I = modular_path({1.0, 1.0, 1.0, 1.0, 1.0});
  int forced = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GreedyTrace tr;
    auto r = solve_greedy_random(I, 0, 5, BetaMode::almost, seed, &tr);
    EXPECT_EQ(r.solution.arcs.size(), 1u);
    for (auto& st : tr.steps) {
      EXPECT_DOUBLE_EQ(st.beta, 0.9);
      forced += st.forced;
    }
  }
  // 0.1^5 per pass: fifty empty passes in a row never happen here.
  EXPECT_EQ(forced, 0);
}

TEST(GreedyTrace, JsonShape) {
  Instance I = gen_random_small(3);
  GreedyTrace tr;
  solve_greedy_det(I, I.s, I.t, &tr);
  auto j = to_json(tr);
  EXPECT_EQ(j["steps"].size(), tr.steps.size());
  EXPECT_EQ(j["pruned"].get<std::vector<int>>(), tr.pruned);
}
