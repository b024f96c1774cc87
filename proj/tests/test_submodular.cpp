#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <thread>

#include "coopcut/oracles.hpp"
#include "coopcut/rng.hpp"
#include "coopcut/submodular.hpp"

using namespace coopcut;

namespace {

std::vector<OraclePtr> sample_oracles(int m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(m), w2(m);
  for (auto& x : w) x = rng.uniform(0.5, 3.0);
  for (auto& x : w2) x = rng.uniform(0.0, 2.0);
  std::vector<std::string> cols(m, "000");
  for (auto& c : cols)
    for (auto& ch : c) ch = rng.bernoulli(0.5) ? '1' : '0';
  std::vector<int> labels(m);
  for (auto& l : labels) l = static_cast<int>(rng.below(3));
  std::vector<char> hidden(m, 0);
  for (int e = 0; e < m; e += 2) hidden[e] = 1;
  auto mod = std::make_shared<ModularOracle>(w);
  auto mx = std::make_shared<MaxWeightOracle>(w2);
  return {mod,
          mx,
          std::make_shared<ConcaveModularOracle>(w, ConcaveModularOracle::Shape::sqrt),
          std::make_shared<ConcaveModularOracle>(w, ConcaveModularOracle::Shape::log1p),
          std::make_shared<Gf2RankOracle>(3, cols),
          std::make_shared<LabelOracle>(labels, 3),
          std::make_shared<TruncatedOracle>(hidden, 1.5, 3.0),
          std::make_shared<SumOracle>(std::vector<std::pair<double, OraclePtr>>{{0.5, mod}, {2.0, mx}})};
}

EdgeVector chi(int m, std::uint64_t mask) {
  EdgeVector x(m, 0.0);
  for (int e = 0; e < m; ++e)
    if (mask >> e & 1) x[e] = 1.0;
  return x;
}

}  // namespace

TEST(Marginal, ModularIsWeight) {
  ModularOracle f({1.5, 2.0, 0.25});
  EXPECT_DOUBLE_EQ(marginal(f, 1, {}), 2.0);
  EXPECT_DOUBLE_EQ(marginal(f, 1, {0, 2}), 2.0);
}

TEST(Marginal, MaxWeightPair) {
  MaxWeightOracle f({3, 5});
  EXPECT_DOUBLE_EQ(marginal(f, 1, {0}), 2.0);
}

TEST(Marginal, ElementAlreadyInSetIsZero) {
  MaxWeightOracle f({3, 5});
  EXPECT_DOUBLE_EQ(marginal(f, 0, {0}), 0.0);
}

TEST(Marginal, OutOfRangeThrows) {
  ModularOracle f({1, 2});
  EXPECT_THROW(marginal(f, 2, {}), std::out_of_range);
  EXPECT_THROW(f.eval({-1}), std::out_of_range);
}

TEST(Marginal, TailMarginalNonnegativeForMonotone) {
  for (auto& f : sample_oracles(6, 11))
    for (double x : tail_marginals(*f)) EXPECT_GE(x, -1e-12) << f->kind();
}

TEST(Lovasz, IndicatorGivesSetValue) {
  for (auto& f : sample_oracles(6, 3))
    for (std::uint64_t B = 0; B < 64; ++B) {
      double fb = f->eval(mask_to_set(B));
      EXPECT_NEAR(lovasz_extension(*f, chi(6, B)), fb, 1e-12 * std::max(1.0, fb)) << f->kind();
    }
}

TEST(Lovasz, ZeroVector) {
  MaxWeightOracle f({3, 5});
  EXPECT_DOUBLE_EQ(lovasz_extension(f, {0, 0}), 0.0);
}

TEST(Lovasz, MaxWeightLevelSets) {
  MaxWeightOracle f({3, 5});
  // 0.2 * f({e1, e2}) + 0.3 * f({e1}) = 1.0 + 0.9
  EXPECT_NEAR(lovasz_extension(f, {0.5, 0.2}), 1.9, 1e-15);
}

TEST(Lovasz, NegativeRejected) {
  ModularOracle f({1, 1});
  EXPECT_THROW(lovasz_extension(f, {0.5, -0.1}), std::invalid_argument);
  EXPECT_THROW(lovasz_extension(f, {0.5}), std::invalid_argument);
}

TEST(Lovasz, PositiveHomogeneity) {
  Rng rng(5);
  for (auto& f : sample_oracles(7, 9)) {
    EdgeVector x(7);
    for (auto& v : x) v = rng.uniform();
    double base = lovasz_extension(*f, x);
    for (double c : {0.0, 0.5, 2.0, 7.25}) {
      EdgeVector y = x;
      for (auto& v : y) v *= c;
      EXPECT_NEAR(lovasz_extension(*f, y), c * base, 1e-12 * std::max(1.0, c * base));
    }
  }
}

TEST(GreedyVertex, ModularReturnsWeights) {
  ModularOracle f({1.5, 2.0, 0.25});
  auto z = greedy_vertex(f, {0.1, 0.9, 0.4});
  EXPECT_EQ(z, (EdgeVector{1.5, 2.0, 0.25}));
}

TEST(GreedyVertex, CappedCardinality) {
  FunctionOracle f(2, [](std::span<const int> A) { return std::min<double>(A.size(), 1); });
  auto z = greedy_vertex(f, {0.5, 0.2});
  EXPECT_EQ(z, (EdgeVector{1.0, 0.0}));
}

TEST(GreedyVertex, ChainConsistency) {
  for (auto& f : sample_oracles(6, 21))
    for (std::uint64_t B = 0; B < 64; ++B) {
      auto z = greedy_vertex(*f, chi(6, B));
      double sum = 0;
      for (int e : mask_to_set(B)) sum += z[e];
      EXPECT_NEAR(sum, f->eval(mask_to_set(B)), 1e-12 * std::max(1.0, sum));
    }
}

TEST(GreedyVertex, DualityWithLovasz) {
  Rng rng(17);
  for (auto& f : sample_oracles(8, 4))
    for (int rep = 0; rep < 20; ++rep) {
      EdgeVector x(8);
      for (auto& v : x) v = rng.uniform();
      auto z = greedy_vertex(*f, x);
      double dot = 0;
      for (int e = 0; e < 8; ++e) dot += z[e] * x[e];
      double lv = lovasz_extension(*f, x);
      EXPECT_NEAR(dot, lv, 1e-12 * std::max(1.0, lv));
    }
}

TEST(GreedyVertex, MembershipInPolyhedron) {
  Rng rng(23);
  for (auto& f : sample_oracles(8, 8)) {
    auto table = subset_table(*f);
    for (int rep = 0; rep < 5; ++rep) {
      EdgeVector x(8);
      for (auto& v : x) v = rng.uniform();
      auto z = greedy_vertex(*f, x);
      for (std::uint64_t A = 0; A < table.size(); ++A) {
        double s = 0;
        for (int e : mask_to_set(A)) s += z[e];
        EXPECT_LE(s, table[A] + 1e-9) << f->kind();
      }
    }
  }
}

TEST(Curvature, ModularIsZero) {
  ModularOracle f({1, 2, 3});
  EXPECT_DOUBLE_EQ(curvature(f), 0.0);
}

TEST(Curvature, UniformMaxWeightIsOne) {
  MaxWeightOracle f({2, 2, 2, 2});
  EXPECT_DOUBLE_EQ(curvature(f), 1.0);
}

TEST(Curvature, SqrtOfSum) {
  ConcaveModularOracle f({1, 1}, ConcaveModularOracle::Shape::sqrt);
  EXPECT_NEAR(curvature(f), 2 - std::sqrt(2.0), 1e-15);
}

TEST(Curvature, ZeroSingletonsSkipped) {
  MaxWeightOracle f({0, 2});
  EXPECT_DOUBLE_EQ(curvature(f), 0.0);
}

TEST(CheckSubmodular, ModularPasses) {
  ModularOracle f({1, 2, 3, 4});
  EXPECT_FALSE(check_submodular(f).has_value());
}

TEST(CheckSubmodular, SquareCardinalityWitness) {
  FunctionOracle f(2, [](std::span<const int> A) { return double(A.size() * A.size()); });
  auto w = check_submodular(f);
  ASSERT_TRUE(w.has_value());
  EXPECT_DOUBLE_EQ(w->marginal_A, 1.0);
  EXPECT_DOUBLE_EQ(w->marginal_B, 3.0);
  EXPECT_TRUE(w->A.empty());
  EXPECT_EQ(w->B.size(), 1u);
}

TEST(CheckSubmodular, GroundSetCap) {
  ModularOracle f(std::vector<double>(13, 1.0));
  EXPECT_THROW(check_submodular(f), std::invalid_argument);
  EXPECT_FALSE(check_submodular(f, 13).has_value());
}

TEST(CheckSubmodular, AllSampleOraclesPass) {
  for (auto& f : sample_oracles(10, 77)) {
    EXPECT_FALSE(check_submodular(*f).has_value()) << f->kind();
    EXPECT_FALSE(check_monotone(*f).has_value()) << f->kind();
    EXPECT_TRUE(check_normalized(*f)) << f->kind();
  }
}

TEST(CheckMonotone, ModularPasses) {
  ModularOracle f({1, 2});
  EXPECT_FALSE(check_monotone(f).has_value());
}

TEST(CheckMonotone, NonMonotoneWitness) {
  FunctionOracle f(2, [](std::span<const int> A) {
    double k = A.size();
    return k * (2 - k);
  });
  auto w = check_monotone(f);
  ASSERT_TRUE(w.has_value());
  EXPECT_DOUBLE_EQ(w->f_A, 1.0);
  EXPECT_DOUBLE_EQ(w->f_Ae, 0.0);
}

TEST(Sfm, ConstantZero) {
  auto r = sfm_bruteforce(5, [](std::span<const int>) { return 0.0; });
  EXPECT_TRUE(r.set.empty());
  EXPECT_EQ(r.value, 0.0);
}

TEST(Sfm, SingleDiscountedElement) {
  const int e = 2;
  auto r = sfm_bruteforce(4, [&](std::span<const int> A) {
    double v = A.size();
    if (std::find(A.begin(), A.end(), e) != A.end()) v -= 2;
    return v;
  });
  EXPECT_EQ(r.set, std::vector<int>{e});
  EXPECT_DOUBLE_EQ(r.value, -1.0);
}

TEST(Sfm, PositiveModularGivesEmpty) {
  ModularOracle f({1, 2, 3});
  auto r = sfm_bruteforce(3, [&](std::span<const int> A) { return f.eval(A); });
  EXPECT_TRUE(r.set.empty());
  EXPECT_EQ(r.value, 0.0);
}

TEST(Sfm, LexicographicTieBreak) {
  auto r = sfm_bruteforce(3, [](std::span<const int> A) { return A.size() == 1 ? -1.0 : 0.0; });
  EXPECT_EQ(r.set, std::vector<int>{0});
  EXPECT_THROW(sfm_bruteforce(30, [](std::span<const int>) { return 0.0; }), std::invalid_argument);
}

TEST(Sfm, InfiniteEmptySetValue) {
  auto r = sfm_bruteforce(3, [](std::span<const int> A) {
    return A.empty() ? std::numeric_limits<double>::infinity() : 3.0 - static_cast<double>(A.size());
  });
  EXPECT_EQ(r.set, (std::vector<int>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(r.value, 0.0);
}

TEST(Oracle, CountsCalls) {
  ModularOracle f({1, 2, 3});
  f.reset_calls();
  f.eval({0});
  f.eval({0, 1});
  std::vector<int> order{2, 1, 0};
  std::vector<double> out(3);
  f.prefix(order, out);
  EXPECT_EQ(f.calls(), 5u);
  EXPECT_EQ(out, (std::vector<double>{3, 5, 6}));
}

TEST(Oracle, ConcurrentCountingIsExact) {
  ModularOracle f({1, 2, 3});
  f.reset_calls();
  std::vector<std::thread> th;
  for (int i = 0; i < 4; ++i)
    th.emplace_back([&] {
      for (int k = 0; k < 1000; ++k) f.eval({0, 2});
    });
  for (auto& x : th) x.join();
  EXPECT_EQ(f.calls(), 4000u);
}

TEST(Oracle, EmptyGroundSetRejected) {
  EXPECT_THROW(ModularOracle(std::vector<double>{}), std::invalid_argument);
}

TEST(Oracle, PrefixMatchesEval) {
  Rng rng(99);
  for (auto& f : sample_oracles(9, 5)) {
    std::vector<int> order(9);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<double> out(9);
    f->prefix(order, out);
    for (int j = 0; j < 9; ++j)
      EXPECT_NEAR(out[j], f->eval(std::span<const int>(order).subspan(0, j + 1)), 1e-12) << f->kind();
  }
}

TEST(Oracle, JsonRoundTrip) {
  for (auto& f : sample_oracles(9, 6)) {
    auto g = oracle_from_json(f->to_json());
    EXPECT_EQ(g->to_json(), f->to_json());
    for (std::uint64_t A = 0; A < 512; A += 7)
      EXPECT_EQ(g->eval(mask_to_set(A)), f->eval(mask_to_set(A))) << f->kind();
  }
  EXPECT_THROW(oracle_from_json(json{{"type", "nope"}}), std::invalid_argument);
}

TEST(Oracle, Gf2RankSingleColumn) {
  Gf2RankOracle f(3, {"100", "000", "110", "010"});
  EXPECT_EQ(f.eval({0}), 1);
  EXPECT_EQ(f.eval({1}), 0);
  EXPECT_EQ(f.eval({0, 2, 3}), 2);
  EXPECT_EQ(f.eval({}), 0);
}

TEST(Oracle, LabelsSingleLabel) {
  LabelOracle f({0, 0, 0, 0}, 1);
  EXPECT_EQ(f.eval({}), 0);
  for (std::uint64_t A = 1; A < 16; ++A) EXPECT_EQ(f.eval(mask_to_set(A)), 1);
}

TEST(Oracle, LiftedCountsElementOnce) {
  auto base = std::make_shared<ModularOracle>(std::vector<double>{2, 3});
  LiftedOracle f(base, {0, 0, 1, 1});
  EXPECT_EQ(f.eval({0, 1}), 2);
  EXPECT_EQ(f.eval({0, 1, 3}), 5);
  std::vector<int> order{1, 0, 2};
  std::vector<double> out(3);
  f.prefix(order, out);
  EXPECT_EQ(out, (std::vector<double>{2, 2, 5}));
}
