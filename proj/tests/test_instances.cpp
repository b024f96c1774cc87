#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "coopcut/instances.hpp"

using namespace coopcut;

namespace {

std::vector<int> all_arcs_minus(const Graph& g, std::vector<int> drop) {
  std::vector<int> a;
  for (int i = 0; i < g.m(); ++i)
    if (std::find(drop.begin(), drop.end(), i) == drop.end()) a.push_back(i);
  return a;
}

json grid33() { return {{"rows", 3}, {"cols", 3}}; }

}  // namespace

TEST(Grid, TypeISmall) {
  auto g = gen_grid(GridType::I, 2, 2);
  EXPECT_EQ(g.n(), 4);
  EXPECT_EQ(g.num_elements(), 4);
  EXPECT_TRUE(g.is_undirected());
}

TEST(Grid, TypeIIAddsDiagonals) { EXPECT_EQ(gen_grid(GridType::II, 2, 2).num_elements(), 6); }

TEST(Grid, TypeIIIWrapEdges) {
  auto g = gen_grid(GridType::III, 3, 3);
  EXPECT_EQ(g.n(), 9);
  EXPECT_EQ(g.num_elements(), 18);
}

TEST(Grid, TypeIIITooSmallRejected) { EXPECT_THROW(gen_grid(GridType::III, 2, 3), std::invalid_argument); }

TEST(Clustered, EdgeCount) {
  auto g = gen_clustered(2, 3, 1, 5);
  EXPECT_EQ(g.n(), 6);
  EXPECT_EQ(g.num_elements(), 7);
}

TEST(Clustered, SingleClique) {
  auto g = gen_clustered(1, 5, 0, 1);
  EXPECT_EQ(g.num_elements(), 10);
}

TEST(Clustered, ConnectedForAllSeeds) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto g = gen_clustered(4, 5, 6, seed);
    auto r = reachable(g, 0, std::vector<char>(g.m(), 0));
    EXPECT_EQ(std::count(r.begin(), r.end(), 1), g.n()) << "seed " << seed;
  }
}

TEST(MatrixRank, BasicValues) {
  auto g = gen_grid(GridType::I, 3, 3);
  auto f = gen_matrix_rank(Variant::I, g, 4);
  EXPECT_EQ(f->eval({}), 0.0);
  for (int e = 0; e < f->size(); ++e) {
    double v = f->eval({e});
    EXPECT_TRUE(v == 0.0 || v == 1.0);
  }
  EXPECT_FALSE(check_submodular(*f));
  EXPECT_FALSE(check_monotone(*f));
}

TEST(MatrixRank, VariantIIIsScaledSum) {
  auto g = gen_grid(GridType::I, 3, 3);
  auto f = gen_matrix_rank(Variant::II, g, 4);
  std::vector<int> all(f->size());
  std::iota(all.begin(), all.end(), 0);
  // Each summand has rank at most d = round(0.9 sqrt(12)) = 3.
  EXPECT_LE(f->eval(all), 0.33 * 3 * 3 + 1e-12);
  EXPECT_FALSE(check_submodular(*f));
}

TEST(Labels, SingleLabelWhenFewElements) {
  auto g = Graph::bidirect(3, {{0, 1}, {1, 2}});
  auto f = gen_labels(Variant::I, g, 9);
  EXPECT_EQ(f->eval({}), 0.0);
  EXPECT_EQ(f->eval({0}), 1.0);
  EXPECT_EQ(f->eval({0, 1}), 1.0);
}

TEST(Labels, Submodular) {
  auto g = gen_grid(GridType::I, 3, 3);
  for (auto v : {Variant::I, Variant::II}) {
    auto f = gen_labels(v, g, 2);
    EXPECT_FALSE(check_submodular(*f));
    EXPECT_FALSE(check_monotone(*f));
  }
}

TEST(Unstructured, SqrtVariantSingleEdge) {
  auto g = gen_grid(GridType::I, 3, 3);
  auto f = gen_unstructured(Variant::II, g, 3);
  auto* c = dynamic_cast<const ConcaveModularOracle*>(f.get());
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(f->eval({}), 0.0);
  for (int e = 0; e < f->size(); ++e) EXPECT_DOUBLE_EQ(f->eval({e}), std::sqrt(c->weights()[e]));
}

TEST(Unstructured, WeightRanges) {
  auto g = gen_grid(GridType::I, 5, 5);
  auto f = gen_unstructured(Variant::I, g, 11);
  auto* c = dynamic_cast<const ConcaveModularOracle*>(f.get());
  ASSERT_NE(c, nullptr);
  const double n = g.n();
  int light = 0;
  for (double w : c->weights()) {
    EXPECT_GE(w, 1.001 - 1e-12);
    EXPECT_LE(w, n * n / 4 + 1e-9);  // heavy weights reach n^2/4
    light += w == 1.001;
  }
  EXPECT_GT(light, 0);
}

TEST(Unstructured, BothVariantsSubmodular) {
  auto g = gen_grid(GridType::I, 3, 3);
  for (auto v : {Variant::I, Variant::II}) {
    auto f = gen_unstructured(v, g, 8);
    EXPECT_FALSE(check_submodular(*f));
    EXPECT_TRUE(check_normalized(*f));
  }
}

TEST(Bestcut, VariantIOptimumCostsOne) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Instance I = generate({"grid_i", {{"rows", 2}, {"cols", 4}}, "bestcut_i", seed});
    ASSERT_TRUE(I.known);
    EXPECT_DOUBLE_EQ(I.known->value, 1.0);
    auto opt = I.graph.elements_of(I.known->arcs);
    // Every other minimal cut costs at least 1.5.
    for (auto& c : enumerate_global_cuts(I.graph)) {
      if (I.graph.elements_of(c.arcs) == opt) continue;
      bool minimal = false;
      for (int t = 1; t < I.graph.n() && !minimal; ++t) minimal = is_minimal_cut(I.graph, c.arcs, 0, t);
      if (minimal) {
        EXPECT_GE(I.f(c.arcs), 1.5) << "seed " << seed;
      }
    }
  }
}

TEST(Bestcut, VariantIISubmodularAndOptimal) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Instance I = generate({"grid_i", grid33(), "bestcut_ii", seed});
    EXPECT_FALSE(check_submodular(*I.cost));
    EXPECT_FALSE(check_monotone(*I.cost));
    double best = std::numeric_limits<double>::infinity();
    for (auto& c : enumerate_global_cuts(I.graph)) best = std::min(best, I.f(c.arcs));
    EXPECT_NEAR(best, I.known->value, 1e-12);
  }
}

TEST(Truncated, ValueAtR) {
  auto g = gen_grid(GridType::I, 4, 4);
  auto tr = gen_truncated_rank(g, 6);
  EXPECT_EQ(tr.cost->eval({}), 0.0);
  const double r = static_cast<double>(tr.R.size());
  EXPECT_DOUBLE_EQ(tr.cost->eval(tr.R), std::sqrt(r));
}

TEST(Truncated, SubmodularMonotone) {
  auto g = gen_grid(GridType::I, 3, 3);
  auto tr = gen_truncated_rank(g, 2);
  EXPECT_FALSE(check_submodular(*tr.cost));
  EXPECT_FALSE(check_monotone(*tr.cost));
}

TEST(LowerBound, ValuesAtKnownCuts) {
  auto p = gen_lowerbound_paths(4, 8, 3);
  EXPECT_DOUBLE_EQ(p.beta, 4.0);
  EXPECT_EQ(p.R.size(), 4u);
  EXPECT_DOUBLE_EQ(p.f.f(p.R), p.beta);
  EXPECT_DOUBLE_EQ(p.h.f(p.R), 4.0);
}

TEST(LowerBound, HIsUniformOnMinimalCuts) {
  auto p = gen_lowerbound_paths(3, 2, 1);
  for (auto& c : enumerate_st_cuts(p.h.graph, 0, 1))
    if (is_minimal_cut(p.h.graph, c.arcs, 0, 1)) {
      EXPECT_DOUBLE_EQ(p.h.f(c.arcs), 3.0);
    }
}

TEST(LowerBound, FEqualsHBelowBeta) {
  auto p = gen_lowerbound_paths(2, 3, 7);  // beta = 16/3
  const int m = p.h.graph.m();
  for (std::uint64_t mask = 0; mask < (1u << m); ++mask) {
    auto Q = mask_to_set(mask);
    int inR = 0;
    for (int a : Q) inR += std::count(p.R.begin(), p.R.end(), a);
    if (inR <= p.beta) {
      EXPECT_DOUBLE_EQ(p.f.f(Q), p.h.f(Q));
    }
  }
}

TEST(WorstCase, VariantAValues) {
  Instance I = gen_worstcase(WorstCase::a, 10, 0.001);
  EXPECT_NEAR(I.known->value, 1.025, 1e-12);
  EXPECT_EQ(I.graph.elements_of(I.known->arcs).size(), 25u);
  EXPECT_NEAR(I.f(node_cut(I.graph, worstcase_node(I, 1))), 6.005, 1e-12);
  EXPECT_NEAR(I.f(node_cut(I.graph, worstcase_node(I, 10))), 21.005, 1e-12);
}

TEST(WorstCase, VariantBValues) {
  Instance I = gen_worstcase(WorstCase::b, 10);
  EXPECT_EQ(I.known->value, 1.0);
  EXPECT_EQ(I.f(node_cut(I.graph, worstcase_node(I, 1))), 101.0);
}

TEST(WorstCase, RelabelingKeepsValues) {
  Instance A = gen_worstcase(WorstCase::b, 10);
  Instance B = gen_worstcase(WorstCase::b, 10, 0.001, worstcase_adversarial_label());
  EXPECT_EQ(B.known->value, 1.0);
  for (int i = 1; i <= 10; ++i)
    EXPECT_EQ(A.f(node_cut(A.graph, worstcase_node(A, i))), B.f(node_cut(B.graph, worstcase_node(B, i))));
}

TEST(WorstCase, BadLabelRejected) {
  EXPECT_THROW(gen_worstcase(WorstCase::a, 4, 0.001, {0, 0, 1, 2}), std::invalid_argument);
  EXPECT_THROW(gen_worstcase(WorstCase::a, 5), std::invalid_argument);
}

TEST(Derangements, SmallValues) {
  EXPECT_EQ(DerangementTables::D(0), 1);
  EXPECT_EQ(DerangementTables::D(1), 0);
  EXPECT_EQ(DerangementTables::D(3), 2);
  EXPECT_EQ(DerangementTables::D(4), 9);
  EXPECT_EQ(DerangementTables::Dprime(2), 1);
  EXPECT_EQ(DerangementTables::Dprime(3), 3);
}

TEST(Derangements, RelaxedCountIsSumOfTwo) {
  for (int n = 2; n <= 12; ++n)
    EXPECT_EQ(DerangementTables::Dprime(n), DerangementTables::D(n) + DerangementTables::D(n - 1));
}

TEST(FBal, EmptyIsZero) { EXPECT_EQ(f_bal(0, 0, 0, 4), 0.0); }

TEST(FBal, MatchesDerangementAverageAtFour) {
  // C_s = {0, 1}, C_t = {2, 3}.
  std::vector<int> p = {0, 1, 2, 3};
  double sum = 0;
  int count = 0;
  do {
    bool der = true;
    for (int i = 0; i < 4; ++i) der = der && p[i] != i;
    if (!der) continue;
    ++count;
    int hits = 0;
    for (int i : {0, 1}) hits += p[i] >= 2;
    sum += 4 - hits;
  } while (std::next_permutation(p.begin(), p.end()));
  EXPECT_EQ(count, 9);
  EXPECT_NEAR(f_bal(2, 2, 0, 4), sum / count, 1e-12);
}

TEST(FBal, BalanceOracleSubmodularMonotone) {
  for (int nB = 2; nB <= 6; ++nB) {
    std::vector<int> s(nB), t(nB);
    for (int i = 0; i < nB; ++i) s[i] = i, t[i] = nB + i;
    BalanceOracle f(2 * nB, s, t);
    EXPECT_FALSE(check_submodular(f)) << nB;
    EXPECT_FALSE(check_monotone(f)) << nB;
  }
}

TEST(Bisection, ConstructionCounts) {
  std::vector<std::pair<int, int>> path = {{0, 1}, {1, 2}, {2, 3}};
  auto red = gen_bisection_reduction(4, path, {1, 2, 3}, 10);
  EXPECT_EQ(red.inst.graph.n(), 6);
  EXPECT_EQ(red.inst.graph.num_elements(), 3 + 8);
}

TEST(Bisection, MinimalCutsSplitEveryNode) {
  std::vector<std::pair<int, int>> path = {{0, 1}, {1, 2}, {2, 3}};
  auto red = gen_bisection_reduction(4, path, {1, 2, 3}, 10);
  const Graph& g = red.inst.graph;
  for (auto& c : enumerate_st_cuts(g, 4, 5)) {
    if (!is_minimal_cut(g, c.arcs, 4, 5)) continue;
    for (int v = 0; v < 4; ++v) {
      int in = std::binary_search(c.arcs.begin(), c.arcs.end(), red.s_arcs[v]) +
               std::binary_search(c.arcs.begin(), c.arcs.end(), red.t_arcs[v]);
      EXPECT_EQ(in, 1);
    }
  }
}

TEST(Bisection, PathRecoversMiddleSplit) {
  // Weights make {0,1} | {2,3} the unique optimal bisection.
  std::vector<std::pair<int, int>> path = {{0, 1}, {1, 2}, {2, 3}};
  std::vector<double> w = {5, 1, 5};
  auto red = gen_bisection_reduction(4, path, w, bisection_safe_beta(4, w));
  const Graph& g = red.inst.graph;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> arg;
  for (auto& c : enumerate_st_cuts(g, 4, 5)) {
    double v = red.inst.f(c.arcs);
    if (v < best) best = v, arg = c.arcs;
  }
  auto X = reachable(g, 4, arc_mask(g, arg));
  EXPECT_EQ(X[0], X[1]);
  EXPECT_EQ(X[2], X[3]);
  EXPECT_NE(X[0], X[2]);
}

TEST(GreedyAdversarial, KnownOptimum) {
  Instance I = gen_greedy_adversarial(8, 1.0, 0.01);
  EXPECT_EQ(I.known->value, 1.0);
  EXPECT_EQ(I.f(I.known->arcs), 1.0);
  auto trap = greedy_adversarial_trap(I);
  EXPECT_EQ(trap.size(), 16u);
  EXPECT_NEAR(I.f(trap), 16 * 0.99, 1e-12);
  EXPECT_TRUE(is_st_cut(I.graph, trap, I.s, I.t));
}

TEST(Convolution, GraphShape) {
  Instance I = gen_convolution_example();
  EXPECT_EQ(I.graph.n(), 4);
  EXPECT_EQ(I.graph.m(), 5);
  EXPECT_EQ(I.graph.arc(0).tail, I.graph.arc(1).tail);
  EXPECT_EQ(I.graph.arc(1).head, I.graph.arc(2).head);
}

TEST(RandomSmall, Shape) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Instance I = gen_random_small(seed);
    EXPECT_EQ(I.s, 0);
    EXPECT_EQ(I.t, I.graph.n() - 1);
    EXPECT_LE(I.graph.n(), 6);
    EXPECT_LE(I.graph.num_elements(), 12);
    EXPECT_TRUE(reachable(I.graph, I.s, std::vector<char>(I.graph.m(), 0))[I.t]);
    EXPECT_TRUE(known_family(I.family));
    EXPECT_EQ(content_hash(I), content_hash(gen_random_small(seed)));
  }
}

TEST(Generate, AllFamiliesReproducible) {
  for (auto& fam : cost_families()) {
    InstanceSpec spec{"grid_ii", {{"rows", 3}, {"cols", 3}}, fam, 12};
    Instance a = generate(spec), b = generate(spec);
    EXPECT_EQ(instance_to_json(a).dump(), instance_to_json(b).dump()) << fam;
    EXPECT_TRUE(a.global());
    spec.seed = 13;
    EXPECT_NE(content_hash(generate(spec)), content_hash(a)) << fam;
  }
}

TEST(Generate, UnknownFamilyRejected) {
  EXPECT_THROW(generate({"grid_i", grid33(), "nonsense", 1}), std::invalid_argument);
  EXPECT_THROW(generate({"hexagon", grid33(), "labels_i", 1}), std::invalid_argument);
}

TEST(InstanceIo, SaveLoadRoundTrip) {
  auto path = (std::filesystem::temp_directory_path() / "coopcut_io_test.json").string();
  for (auto& fam : cost_families()) {
    Instance I = generate({"clustered", {{"k", 2}, {"size", 4}, {"inter", 3}}, fam, 5});
    save_instance(I, path);
    Instance J = load_instance(path);
    EXPECT_EQ(instance_to_json(I).dump(), instance_to_json(J).dump()) << fam;
    EXPECT_TRUE(matches_regeneration(J));
    std::vector<int> some = all_arcs_minus(I.graph, {0, 1});
    EXPECT_EQ(I.f(some), J.f(some));
  }
  std::filesystem::remove(path);
}

TEST(InstanceIo, TamperedSeedDetected) {
  Instance I = generate({"grid_i", grid33(), "labels_i", 5});
  json j = instance_to_json(I);
  j["seed"] = 6;
  EXPECT_THROW(instance_from_json(j), std::invalid_argument);
}

TEST(InstanceIo, UnknownFamilyInFile) {
  Instance I = generate({"grid_i", grid33(), "labels_i", 5});
  json j = instance_to_json(I);
  j["family"] = "mystery";
  EXPECT_THROW(instance_from_json(j), std::invalid_argument);
}

TEST(InstanceIo, SpecialInstancesRoundTrip) {
  for (Instance I : {gen_worstcase(WorstCase::a, 6), gen_convolution_example(), gen_random_small(3),
                     gen_greedy_adversarial(4, 1.0, 0.1)}) {
    Instance J = instance_from_json(json::parse(instance_to_json(I).dump()));
    EXPECT_EQ(content_hash(I), content_hash(J)) << I.family;
    EXPECT_EQ(I.s, J.s);
    EXPECT_EQ(I.known.has_value(), J.known.has_value());
  }
}
