#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coopcut/graph.hpp"
#include "coopcut/oracles.hpp"
#include "coopcut/rng.hpp"
#include "coopcut/submodular.hpp"

namespace coopcut {

inline constexpr int kInstanceFormatVersion = 1;

struct KnownOptimum {
  std::vector<int> arcs;
  double value = 0;
};

// A graph with a cost over its elements. s = t = -1 marks a global instance.
struct Instance {
  std::string id;
  std::string graph_class;
  std::string family;
  std::uint64_t seed = 0;
  json params = json::object();
  Graph graph;
  OraclePtr cost;      // over graph elements
  OraclePtr arc_cost;  // over arcs
  int s = -1, t = -1;
  std::optional<KnownOptimum> known;

  bool global() const { return s < 0; }
  double f(std::span<const int> arcs) const { return arc_cost->eval(arcs); }
};

inline OraclePtr make_arc_cost(const Graph& g, const OraclePtr& cost) {
  bool identity = g.m() == g.num_elements();
  for (int a = 0; identity && a < g.m(); ++a) identity = g.element(a) == a;
  if (identity) {
    if (cost->size() != g.m()) throw std::invalid_argument("cost ground set does not match graph");
    return cost;
  }
  return arc_cost(g, cost);
}

inline Instance make_instance(Graph g, OraclePtr cost, int s, int t, std::string family = "custom") {
  Instance I;
  I.graph = std::move(g);
  if (cost->size() != I.graph.num_elements())
    throw std::invalid_argument("cost ground set does not match graph elements");
  I.cost = std::move(cost);
  I.arc_cost = make_arc_cost(I.graph, I.cost);
  if (s >= 0 || t >= 0) check_terminals(I.graph, s, t);
  I.s = s, I.t = t;
  I.family = std::move(family);
  I.graph_class = "custom";
  I.id = I.family;
  return I;
}

// ---------------------------------------------------------------- graphs

enum class GridType { I, II, III };

inline Graph gen_grid(GridType type, int rows, int cols) {
  if (rows < 1 || cols < 1 || rows * cols < 2) throw std::invalid_argument("grid too small");
  if (type == GridType::III && (rows < 3 || cols < 3))
    throw std::invalid_argument("type III grid needs at least 3 rows and 3 columns");
  auto id = [cols](int r, int c) { return r * cols + c; };
  std::vector<std::pair<int, int>> e;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.push_back({id(r, c), id(r, c + 1)});
      if (r + 1 < rows) e.push_back({id(r, c), id(r + 1, c)});
    }
  if (type == GridType::II)
    for (int r = 0; r + 1 < rows; ++r)
      for (int c = 0; c + 1 < cols; ++c) {
        e.push_back({id(r, c), id(r + 1, c + 1)});
        e.push_back({id(r, c + 1), id(r + 1, c)});
      }
  if (type == GridType::III) {
    for (int c = 0; c < cols; ++c) e.push_back({id(0, c), id(rows - 1, c)});
    for (int r = 0; r < rows; ++r) e.push_back({id(r, 0), id(r, cols - 1)});
  }
  return Graph::bidirect(rows * cols, e);
}

inline Graph gen_clustered(int k, int size, int inter, std::uint64_t seed) {
  if (k < 1 || size < 1 || k * size < 2) throw std::invalid_argument("clustered graph too small");
  const long long max_inter = static_cast<long long>(k) * (k - 1) / 2 * size * size;
  if (inter < k - 1) throw std::invalid_argument("too few inter-clique edges to connect cliques");
  if (inter > max_inter) throw std::invalid_argument("too many inter-clique edges");
  Rng rng(seed);
  std::vector<std::pair<int, int>> e;
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < size; ++i)
      for (int j = i + 1; j < size; ++j) e.push_back({c * size + i, c * size + j});
  std::set<std::pair<int, int>> used;
  auto add = [&](int ca, int cb) {
    int u = ca * size + static_cast<int>(rng.below(size));
    int v = cb * size + static_cast<int>(rng.below(size));
    auto key = std::minmax(u, v);
    if (!used.insert(key).second) return false;
    e.push_back(key);
    return true;
  };
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (int i = 1; i < k; ++i) add(order[i], order[rng.below(i)]);
  int have = k - 1;
  while (have < inter) {
    int ca = static_cast<int>(rng.below(k)), cb = static_cast<int>(rng.below(k));
    if (ca == cb) continue;
    if (add(ca, cb)) ++have;
  }
  return Graph::bidirect(k * size, e);
}

inline Graph gen_path_graph(int n, bool undirected = false) {
  std::vector<std::pair<int, int>> e;
  for (int v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
  return undirected ? Graph::bidirect(n, e) : Graph::directed(n, e);
}

// ---------------------------------------------------------------- helpers

// Random connected node set of the given size, grown by uniform frontier picks.
inline std::vector<char> random_connected_set(const Graph& g, int size, Rng& rng) {
  const int n = g.n();
  if (size < 1 || size >= n) throw std::invalid_argument("connected set size out of range");
  std::vector<char> X(n, 0);
  X[rng.below(n)] = 1;
  for (int have = 1; have < size; ++have) {
    std::vector<int> frontier;
    for (int a = 0; a < g.m(); ++a) {
      int u = g.arc(a).tail, v = g.arc(a).head;
      if (X[u] && !X[v]) frontier.push_back(v);
    }
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
    if (frontier.empty()) throw std::invalid_argument("graph is not connected");
    X[frontier[rng.below(frontier.size())]] = 1;
  }
  return X;
}

inline bool side_connected(const Graph& g, const std::vector<char>& X, char side) {
  int start = -1, count = 0;
  for (int v = 0; v < g.n(); ++v)
    if (X[v] == side) {
      if (start < 0) start = v;
      ++count;
    }
  if (start < 0) return false;
  std::vector<char> seen(g.n(), 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int a : g.out(u)) {
      int v = g.arc(a).head;
      if (X[v] == side && !seen[v]) seen[v] = 1, ++reached, stack.push_back(v);
    }
    for (int a : g.in(u)) {
      int v = g.arc(a).tail;
      if (X[v] == side && !seen[v]) seen[v] = 1, ++reached, stack.push_back(v);
    }
  }
  return reached == count;
}

// Elements with exactly one endpoint in X.
inline std::vector<int> boundary_elements(const Graph& g, const std::vector<char>& X) {
  std::vector<int> r;
  for (int e = 0; e < g.num_elements(); ++e) {
    auto [u, v] = g.element_ends(e);
    if (X[u] != X[v]) r.push_back(e);
  }
  return r;
}

// The arc form of a global cut delta(X): arcs leaving the side holding node 0.
inline std::vector<int> global_cut_arcs(const Graph& g, std::vector<char> X) {
  if (!X[0])
    for (auto& x : X) x = !x;
  return out_boundary(g, X);
}

inline int round_pos(double x) { return std::max(1, static_cast<int>(std::lround(x))); }

// ---------------------------------------------------------------- cost families

enum class Variant { I, II };

inline OraclePtr gen_matrix_rank_single(int m, Rng& rng) {
  const int d = std::min(m, round_pos(0.9 * std::sqrt(static_cast<double>(m))));
  std::vector<std::string> cols(m, std::string(d, '0'));
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  for (int j = 0; j < d; ++j) cols[j][perm[j]] = '1';
  for (int j = d; j < m; ++j)
    for (int r = 0; r < d; ++r) cols[j][r] = rng.bernoulli(0.5) ? '1' : '0';
  return std::make_shared<Gf2RankOracle>(d, cols);
}

inline OraclePtr gen_matrix_rank(Variant v, const Graph& g, std::uint64_t seed) {
  const int m = g.num_elements();
  if (m < 2) throw std::invalid_argument("matrix rank needs at least two elements");
  Rng rng(seed);
  if (v == Variant::I) return gen_matrix_rank_single(m, rng);
  std::vector<std::pair<double, OraclePtr>> terms;
  for (int i = 0; i < 3; ++i) terms.emplace_back(0.33, gen_matrix_rank_single(m, rng));
  return std::make_shared<SumOracle>(std::move(terms));
}

inline OraclePtr gen_labels_single(int m, Rng& rng) {
  const int L = round_pos(0.8 * std::sqrt(static_cast<double>(m)));
  std::vector<int> labels(m);
  for (auto& l : labels) l = static_cast<int>(rng.below(L));
  return std::make_shared<LabelOracle>(labels, L);
}

inline OraclePtr gen_labels(Variant v, const Graph& g, std::uint64_t seed) {
  const int m = g.num_elements();
  Rng rng(seed);
  if (v == Variant::I) return gen_labels_single(m, rng);
  std::vector<std::pair<double, OraclePtr>> terms;
  for (int i = 0; i < 3; ++i) terms.emplace_back(0.33, gen_labels_single(m, rng));
  return std::make_shared<SumOracle>(std::move(terms));
}

// Weights: 1.001 on delta X, one or two heavy weights per node elsewhere, the
// rest mostly integer.
inline std::vector<double> unstructured_weights(const Graph& g, Rng& rng) {
  const int n = g.n(), m = g.num_elements();
  std::vector<int> nodes(n);
  std::iota(nodes.begin(), nodes.end(), 0);
  rng.shuffle(nodes);
  std::vector<char> X(n, 0);
  const int xs = std::min(n - 1, round_pos(0.4 * n));
  for (int i = 0; i < xs; ++i) X[nodes[i]] = 1;
  std::vector<double> w(m, -1);
  for (int e : boundary_elements(g, X)) w[e] = 1.001;
  const double nn = n;
  std::vector<int> heavy(n, 0);
  for (int v : nodes) {
    if (heavy[v] > 0) continue;
    std::vector<int> cand;
    for (int a : g.out(v)) {
      int e = g.element(a), u = g.arc(a).head;
      if (w[e] < 0 && heavy[u] < 2) cand.push_back(e);
    }
    for (int a : g.in(v)) {
      int e = g.element(a), u = g.arc(a).tail;
      if (w[e] < 0 && heavy[u] < 2) cand.push_back(e);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    if (cand.empty()) continue;
    int take = 1 + static_cast<int>(rng.below(2));
    for (int k = 0; k < take && !cand.empty(); ++k) {
      std::size_t i = rng.below(cand.size());
      int e = cand[i];
      cand.erase(cand.begin() + i);
      auto [a, b] = g.element_ends(e);
      if (heavy[a] >= 2 || heavy[b] >= 2) continue;
      w[e] = rng.uniform(nn / 2, std::max(nn / 2, nn * nn / 4));
      ++heavy[a], ++heavy[b];
    }
  }
  const long long hi = std::max<long long>(2, static_cast<long long>(std::floor(nn * nn / 4 - nn + 1)));
  for (auto& x : w)
    if (x < 0) x = static_cast<double>(rng.range(2, hi));
  return w;
}

inline OraclePtr gen_unstructured(Variant v, const Graph& g, std::uint64_t seed) {
  Rng rng(seed);
  auto w = unstructured_weights(g, rng);
  return std::make_shared<ConcaveModularOracle>(
      std::move(w), v == Variant::I ? ConcaveModularOracle::Shape::log1p
                                    : ConcaveModularOracle::Shape::sqrt);
}

struct BestcutResult {
  OraclePtr cost;
  std::vector<char> X;
  int corrections = 0;
};

inline std::vector<double> indicator_weights(int m, std::span<const int> S, double c) {
  std::vector<double> w(m, 0.0);
  for (int e : S) w[e] = c;
  return w;
}

// A connected X* with connected complement; the optimum is delta X*.
inline BestcutResult gen_bestcut(Variant v, const Graph& g, std::uint64_t seed) {
  const int n = g.n(), m = g.num_elements();
  if (n < 3) throw std::invalid_argument("graph too small to host a best cut");
  if (!g.is_undirected()) throw std::invalid_argument("best cut families need undirected graphs");
  Rng rng(seed);
  const int size = std::min(n - 1, round_pos(0.4 * n));
  std::vector<char> X;
  for (int tries = 0;; ++tries) {
    if (tries >= 10000) throw std::invalid_argument("no connected X* with connected complement");
    X = random_connected_set(g, size, rng);
    if (side_connected(g, X, 0)) break;
  }
  auto dX = boundary_elements(g, X);
  std::vector<char> in_dx(m, 0);
  for (int e : dX) in_dx[e] = 1;
  std::vector<double> w(m, 0.0);
  std::vector<int> rest;
  for (int e = 0; e < m; ++e)
    if (!in_dx[e]) w[e] = rng.uniform(1.5, 2.0), rest.push_back(e);
  std::vector<int> Bset, Cset;
  if (v == Variant::II) {
    std::vector<int> sh = rest;
    rng.shuffle(sh);
    Bset.assign(sh.begin(), sh.begin() + sh.size() / 2);
    Cset.assign(sh.begin() + sh.size() / 2, sh.end());
    std::sort(Bset.begin(), Bset.end());
    std::sort(Cset.begin(), Cset.end());
    for (auto* part : {&Bset, &Cset}) {
      std::vector<int> p = *part;
      rng.shuffle(p);
      for (std::size_t i = 0; i < std::min<std::size_t>(2, p.size()); ++i)
        w[p[i]] = rng.uniform(2.1, 2.2);
    }
  }
  auto build = [&]() -> OraclePtr {
    std::vector<std::pair<double, OraclePtr>> terms;
    terms.emplace_back(1.0, std::make_shared<MaxWeightOracle>(indicator_weights(m, dX, 1.0)));
    terms.emplace_back(1.0, std::make_shared<ModularOracle>(w));
    if (v == Variant::II) {
      std::vector<double> wb(m, 0.0), wc(m, 0.0);
      for (int e : Bset) wb[e] = w[e];
      for (int e : Cset) wc[e] = w[e];
      terms.emplace_back(1.0, std::make_shared<MaxWeightOracle>(wb));
      terms.emplace_back(1.0, std::make_shared<MaxWeightOracle>(wc));
    }
    return std::make_shared<SumOracle>(std::move(terms));
  };
  BestcutResult r{build(), X, 0};
  // Verification pass: any other minimal cut of cost <= 1 gets one edge raised
  // to 2. With a connected complement this never fires; kept as a safeguard.
  if (n <= 14) {
    auto arc_f = make_arc_cost(g, r.cost);
    auto opt = global_cut_arcs(g, X);
    std::sort(opt.begin(), opt.end());
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& c : enumerate_global_cuts(g)) {
        if (c.arcs == opt) continue;
        if (arc_f->eval(c.arcs) > 1.0 + 1e-12) continue;
        for (int e : g.elements_of(c.arcs))
          if (!in_dx[e]) {
            w[e] = 2.0;
            break;
          }
        ++r.corrections;
        r.cost = build();
        arc_f = make_arc_cost(g, r.cost);
        changed = true;
        break;
      }
    }
  }
  return r;
}

struct TruncatedResult {
  OraclePtr cost;
  std::vector<int> R;
};

inline TruncatedResult gen_truncated_rank(const Graph& g, std::uint64_t seed) {
  const int n = g.n();
  if (n < 2) throw std::invalid_argument("graph too small");
  Rng rng(seed);
  auto X = random_connected_set(g, std::min(n - 1, round_pos(0.3 * n)), rng);
  auto R = boundary_elements(g, X);
  std::vector<char> in_r(g.num_elements(), 0);
  for (int e : R) in_r[e] = 1;
  const double r = static_cast<double>(R.size());
  return {std::make_shared<TruncatedOracle>(in_r, std::sqrt(r), 2 * r), R};
}

// ---------------------------------------------------------------- constructions

struct LowerBoundPair {
  Instance h, f;
  std::vector<int> R;
  double beta = 0;
};

// l disjoint s-t paths of k arcs each; s = 0, t = 1.
inline LowerBoundPair gen_lowerbound_paths(int l, int k, std::uint64_t seed) {
  if (l < 1 || k < 1) throw std::invalid_argument("need l >= 1 and k >= 1");
  const int n = 2 + l * (k - 1);
  std::vector<std::pair<int, int>> arcs;
  std::vector<std::vector<int>> path_arcs(l);
  for (int p = 0; p < l; ++p) {
    int prev = 0;
    for (int j = 0; j < k; ++j) {
      int next = j + 1 == k ? 1 : 2 + p * (k - 1) + j;
      path_arcs[p].push_back(static_cast<int>(arcs.size()));
      arcs.push_back({prev, next});
      prev = next;
    }
  }
  Graph g = Graph::directed(n, arcs);
  const int m = g.m();
  Rng rng(seed);
  LowerBoundPair out;
  out.beta = 8.0 * l / k;
  std::vector<char> in_r(m, 0);
  for (int p = 0; p < l; ++p) {
    int a = path_arcs[p][rng.below(k)];
    in_r[a] = 1;
    out.R.push_back(a);
  }
  std::sort(out.R.begin(), out.R.end());
  auto h = std::make_shared<TruncatedOracle>(std::vector<char>(m, 0), 0.0, static_cast<double>(l));
  auto f = std::make_shared<TruncatedOracle>(in_r, out.beta, static_cast<double>(l));
  json params{{"l", l}, {"k", k}};
  out.h = make_instance(g, h, 0, 1, "lowerbound_h");
  out.f = make_instance(g, f, 0, 1, "lowerbound_f");
  std::vector<int> first;
  for (int p = 0; p < l; ++p) first.push_back(path_arcs[p][0]);
  out.h.known = KnownOptimum{first, static_cast<double>(l)};
  out.f.known = KnownOptimum{out.R, std::min(out.beta, static_cast<double>(l))};
  for (auto* I : {&out.h, &out.f}) {
    I->graph_class = "parallel_paths";
    I->params = params;
    I->seed = seed;
  }
  return out;
}

enum class WorstCase { a, b };

struct WorstCaseLayout {
  std::vector<int> Ek;
  std::vector<std::vector<int>> Ei;  // E_1 .. E_{n/2-1}
};

// Node label i (1-based v_i) is placed at node id label[i-1]; the identity
// labeling uses v_i = i - 1.
inline Instance gen_worstcase(WorstCase variant, int n, double eps = 0.001,
                              std::vector<int> label = {}) {
  if (n < 4 || n % 2) throw std::invalid_argument("worst-case instance needs even n >= 4");
  if (label.empty()) {
    label.resize(n);
    std::iota(label.begin(), label.end(), 0);
  }
  {
    auto sorted = label;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i)
      if (sorted[i] != i) throw std::invalid_argument("labeling must be a permutation");
  }
  const int h = n / 2;
  Graph::Builder b(n);
  WorstCaseLayout L;
  L.Ei.resize(h - 1);
  // Elements are created in label order: pairs (i, j), i < j.
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      int e = b.add_edge(label[i - 1], label[j - 1]);
      bool same_first = j <= h, same_second = i > h;
      if (same_first) {
        if (i < h) L.Ei[i - 1].push_back(e);
      } else if (same_second) {
        if (i - h < h) L.Ei[i - h - 1].push_back(e);
      } else {
        L.Ek.push_back(e);
      }
    }
  Graph g = b.build();
  const int m = g.num_elements();
  const double bw = variant == WorstCase::a ? h : static_cast<double>(n) * n;
  std::vector<std::pair<double, OraclePtr>> terms;
  terms.emplace_back(1.0, std::make_shared<MaxWeightOracle>(indicator_weights(m, L.Ek, 1.0)));
  for (auto& Ei : L.Ei)
    terms.emplace_back(bw, std::make_shared<MaxWeightOracle>(indicator_weights(m, Ei, 1.0)));
  if (variant == WorstCase::a)
    terms.emplace_back(eps, std::make_shared<ModularOracle>(indicator_weights(m, L.Ek, 1.0)));
  Instance I = make_instance(std::move(g), std::make_shared<SumOracle>(std::move(terms)), -1, -1,
                             variant == WorstCase::a ? "worstcase_a" : "worstcase_b");
  std::vector<char> X(n, 0);
  for (int i = 0; i < h; ++i) X[label[i]] = 1;
  auto opt = global_cut_arcs(I.graph, X);
  I.known = KnownOptimum{opt, I.arc_cost->eval(opt)};
  I.graph_class = "worstcase";
  I.params = {{"n", n}, {"eps", eps}, {"label", label}};
  return I;
}

// Labeling for n = 10 under which Queyranne's pendent-pair scan (node order,
// earliest group on ties) ends at delta(v_1). Found by a seeded search over
// permutations.
inline const std::vector<int>& worstcase_adversarial_label() {
  static const std::vector<int> label = {6, 8, 2, 4, 1, 0, 3, 5, 9, 7};
  return label;
}

// Node id of label v_i in a worst-case instance.
inline int worstcase_node(const Instance& I, int i) {
  return I.params.at("label").at(i - 1).get<int>();
}

// Node cut delta(v) as arcs leaving v.
inline std::vector<int> node_cut(const Graph& g, int v) {
  std::vector<int> c = g.out(v);
  std::sort(c.begin(), c.end());
  return c;
}

// G_B on nodes 0..nB-1 plus s = nB, t = nB + 1 joined to every node.
struct BisectionInstance {
  Instance inst;
  std::vector<int> s_arcs, t_arcs;  // arc (s, v_i) and (v_i, t)
};

inline BisectionInstance gen_bisection_reduction(int nB,
                                                 const std::vector<std::pair<int, int>>& edges,
                                                 const std::vector<double>& wB, double beta) {
  if (nB < 2) throw std::invalid_argument("bisection needs at least two nodes");
  if (edges.size() != wB.size()) throw std::invalid_argument("one weight per edge");
  Graph::Builder b(nB + 2);
  for (auto [u, v] : edges) b.add_edge(u, v);
  const int s = nB, t = nB + 1;
  std::vector<int> se, te;
  for (int v = 0; v < nB; ++v) se.push_back(b.add_arc(s, v));
  for (int v = 0; v < nB; ++v) te.push_back(b.add_arc(v, t));
  Graph g = b.build();
  const int m = g.num_elements();
  std::vector<double> w(m, 0.0);
  for (std::size_t i = 0; i < wB.size(); ++i) w[i] = wB[i];
  std::vector<std::pair<double, OraclePtr>> terms;
  terms.emplace_back(1.0, std::make_shared<ModularOracle>(w));
  terms.emplace_back(beta, std::make_shared<BalanceOracle>(m, se, te));
  BisectionInstance out;
  out.inst = make_instance(std::move(g), std::make_shared<SumOracle>(std::move(terms)), s, t,
                           "bisection");
  out.inst.graph_class = "bisection";
  json je = json::array();
  for (auto [u, v] : edges) je.push_back({u, v});
  out.inst.params = {{"nB", nB}, {"edges", je}, {"w", wB}, {"beta", beta}};
  for (int e : se) out.s_arcs.push_back(out.inst.graph.element_arcs(e)[0]);
  for (int e : te) out.t_arcs.push_back(out.inst.graph.element_arcs(e)[0]);
  return out;
}

// Penalty weight large enough that every optimal cut is a balanced bisection.
inline double bisection_safe_beta(int nB, const std::vector<double>& wB) {
  double W = 0;
  for (double x : wB) W += x;
  return (nB - 1) * W + 1;
}

// Clique on 0..n-1 (both directions), s = n feeding S = {0..n/2-1}, and t
// reached only through v' = n/2.
inline Instance gen_greedy_adversarial(int n, double gamma, double eps) {
  if (n < 4 || n % 2) throw std::invalid_argument("adversarial instance needs even n >= 4");
  const int s = n, t = n + 1, vp = n / 2;
  Graph::Builder b(n + 2);
  std::vector<double> w;
  const double other = gamma * (1 - eps / 2);
  for (int v = 0; v < n / 2; ++v) b.add_arc(s, v), w.push_back(other);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      b.add_arc(u, v);
      w.push_back(u < n / 2 && v >= n / 2 ? gamma * (1 - eps) : other);
    }
  int opt = b.add_arc(vp, t);
  w.push_back(gamma);
  Instance I = make_instance(b.build(), std::make_shared<ModularOracle>(w), s, t,
                             "greedy_adversarial");
  I.graph_class = "greedy_adversarial";
  I.params = {{"n", n}, {"gamma", gamma}, {"eps", eps}};
  I.known = KnownOptimum{{opt}, gamma};
  return I;
}

// Arcs of delta^+(S) in the adversarial instance.
inline std::vector<int> greedy_adversarial_trap(const Instance& I) {
  const int n = I.params.at("n").get<int>();
  std::vector<int> c;
  for (int a = 0; a < I.graph.m(); ++a) {
    auto [u, v] = I.graph.arc(a);
    if (u < n / 2 && v >= n / 2 && v < n) c.push_back(a);
  }
  return c;
}

// Arcs e1..e5 = (0,1), (0,3), (2,3), (0,2), (1,3) on s = 0, t = 3 with
// f(A) = max weight, w = (a, a, b, eps, eps). e1 and e2 share a tail, e2 and e3
// share a head.
inline Instance gen_convolution_example(double a = 1.5, double b = 2.0, double eps = 0.001) {
  Graph g = Graph::directed(4, {{0, 1}, {0, 3}, {2, 3}, {0, 2}, {1, 3}});
  Instance I = make_instance(std::move(g),
                             std::make_shared<MaxWeightOracle>(std::vector<double>{a, a, b, eps, eps}),
                             0, 3, "convolution_example");
  I.graph_class = "convolution_example";
  I.params = {{"a", a}, {"b", b}, {"eps", eps}};
  return I;
}

// Small random (s,t) instance for exhaustive checks: s = 0, t = n - 1, t reachable
// from s, at most max_elements cost elements. The cost family is drawn from
// modular, max-weight, sqrt, labels, truncated and GF(2) rank.
inline Instance gen_random_small(std::uint64_t seed, int max_n = 6, int max_elements = 12) {
  Rng rng(derive_seed(seed, 0x534d));
  for (;;) {
    const int n = 3 + static_cast<int>(rng.below(max_n - 2));
    const bool und = rng.bernoulli(0.5);
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v || (und && v < u)) continue;
        if (rng.bernoulli(0.45)) e.push_back({u, v});
      }
    if (e.empty() || static_cast<int>(e.size()) > max_elements) continue;
    Graph g = und ? Graph::bidirect(n, e) : Graph::directed(n, e);
    if (!reachable(g, 0, std::vector<char>(g.m(), 0))[n - 1]) continue;
    const int m = g.num_elements();
    std::vector<double> w(m);
    for (auto& x : w) x = rng.uniform(0.5, 3.0);
    OraclePtr f;
    std::string fam;
    switch (rng.below(6)) {
      case 0: f = std::make_shared<ModularOracle>(w), fam = "modular"; break;
      case 1: f = std::make_shared<MaxWeightOracle>(w), fam = "max_weight"; break;
      case 2:
        f = std::make_shared<ConcaveModularOracle>(w, ConcaveModularOracle::Shape::sqrt);
        fam = "sqrt";
        break;
      case 3: f = gen_labels(Variant::I, g, rng.next()), fam = "labels"; break;
      case 4: {
        std::vector<char> in(m);
        for (auto& x : in) x = rng.bernoulli(0.5);
        f = std::make_shared<TruncatedOracle>(in, 1.5, 3.0), fam = "truncated";
        break;
      }
      default: f = gen_matrix_rank(Variant::I, g, rng.next()), fam = "matrix_rank"; break;
    }
    Instance I = make_instance(std::move(g), f, 0, n - 1, "random_" + fam);
    I.graph_class = und ? "random_undirected" : "random_directed";
    I.seed = seed;
    I.id = "random:" + fam + ":seed=" + std::to_string(seed);
    return I;
  }
}

// ---------------------------------------------------------------- benchmark registry

inline const std::vector<std::string>& cost_families() {
  static const std::vector<std::string> f{
      "matrix_rank_i", "matrix_rank_ii", "labels_i",   "labels_ii",     "unstructured_i",
      "unstructured_ii", "bestcut_i",    "bestcut_ii", "truncated_rank"};
  return f;
}

inline const std::vector<std::string>& special_families() {
  static const std::vector<std::string> f{"worstcase_a", "worstcase_b", "greedy_adversarial",
                                          "lowerbound_h", "lowerbound_f", "bisection",
                                          "convolution_example", "custom"};
  return f;
}

inline bool known_family(const std::string& name) {
  auto has = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), name) != v.end();
  };
  return has(cost_families()) || has(special_families()) || name.rfind("random_", 0) == 0;
}

inline Graph gen_graph_class(const std::string& cls, const json& p, std::uint64_t seed) {
  if (cls == "grid_i") return gen_grid(GridType::I, p.at("rows"), p.at("cols"));
  if (cls == "grid_ii") return gen_grid(GridType::II, p.at("rows"), p.at("cols"));
  if (cls == "grid_iii") return gen_grid(GridType::III, p.at("rows"), p.at("cols"));
  if (cls == "clustered") return gen_clustered(p.at("k"), p.at("size"), p.at("inter"), seed);
  throw std::invalid_argument("unknown graph class '" + cls + "'");
}

struct InstanceSpec {
  std::string graph_class;
  json params = json::object();
  std::string family;
  std::uint64_t seed = 0;
};

inline std::string instance_id(const InstanceSpec& s) {
  std::string id = s.graph_class + ":" + s.family;
  for (auto& [k, v] : s.params.items()) id += ":" + k + "=" + v.dump();
  return id + ":seed=" + std::to_string(s.seed);
}

// Global instance from a benchmark graph class and cost family.
inline Instance generate(const InstanceSpec& spec) {
  if (spec.family == "worstcase_a" || spec.family == "worstcase_b") {
    std::vector<int> label;
    if (spec.params.contains("label")) label = spec.params.at("label").get<std::vector<int>>();
    Instance I = gen_worstcase(spec.family == "worstcase_a" ? WorstCase::a : WorstCase::b,
                               spec.params.at("n"), spec.params.value("eps", 0.001), label);
    I.seed = spec.seed;
    I.id = instance_id(spec);
    return I;
  }
  if (spec.family == "greedy_adversarial") {
    Instance I = gen_greedy_adversarial(spec.params.at("n"), spec.params.value("gamma", 1.0),
                                        spec.params.value("eps", 0.01));
    I.seed = spec.seed;
    I.id = instance_id(spec);
    return I;
  }
  if (spec.family == "lowerbound_h" || spec.family == "lowerbound_f") {
    auto pr = gen_lowerbound_paths(spec.params.at("l"), spec.params.at("k"), spec.seed);
    Instance I = spec.family == "lowerbound_h" ? pr.h : pr.f;
    I.id = instance_id(spec);
    return I;
  }
  if (std::find(cost_families().begin(), cost_families().end(), spec.family) ==
      cost_families().end())
    throw std::invalid_argument("unknown family '" + spec.family + "'");
  Graph g = gen_graph_class(spec.graph_class, spec.params, derive_seed(spec.seed, 1));
  const std::uint64_t cs = derive_seed(spec.seed, 2);
  const std::string& f = spec.family;
  OraclePtr cost;
  std::optional<std::vector<char>> X;
  if (f == "matrix_rank_i") cost = gen_matrix_rank(Variant::I, g, cs);
  if (f == "matrix_rank_ii") cost = gen_matrix_rank(Variant::II, g, cs);
  if (f == "labels_i") cost = gen_labels(Variant::I, g, cs);
  if (f == "labels_ii") cost = gen_labels(Variant::II, g, cs);
  if (f == "unstructured_i") cost = gen_unstructured(Variant::I, g, cs);
  if (f == "unstructured_ii") cost = gen_unstructured(Variant::II, g, cs);
  if (f == "truncated_rank") cost = gen_truncated_rank(g, cs).cost;
  if (f == "bestcut_i" || f == "bestcut_ii") {
    auto r = gen_bestcut(f == "bestcut_i" ? Variant::I : Variant::II, g, cs);
    cost = r.cost;
    X = r.X;
  }
  Instance I = make_instance(std::move(g), cost, -1, -1, f);
  if (X) {
    auto opt = global_cut_arcs(I.graph, *X);
    I.known = KnownOptimum{opt, I.arc_cost->eval(opt)};
  }
  I.graph_class = spec.graph_class;
  I.params = spec.params;
  I.seed = spec.seed;
  I.id = instance_id(spec);
  return I;
}

// ---------------------------------------------------------------- files

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

inline std::string hex64(std::uint64_t x) {
  std::ostringstream o;
  o << std::hex;
  o.width(16);
  o.fill('0');
  o << x;
  return o.str();
}

inline json instance_body(const Instance& I) {
  json j;
  j["version"] = kInstanceFormatVersion;
  j["id"] = I.id;
  j["graph_class"] = I.graph_class;
  j["family"] = I.family;
  j["params"] = I.params;
  j["seed"] = I.seed;
  j["graph"] = graph_to_json(I.graph, I.s, I.t);
  j["cost"] = I.cost->to_json();
  if (I.known) j["known_optimum"] = {{"arcs", I.known->arcs}, {"value", I.known->value}};
  return j;
}

inline std::string content_hash(const Instance& I) { return hex64(fnv1a(instance_body(I).dump())); }

inline json instance_to_json(const Instance& I) {
  json j = instance_body(I);
  j["content_hash"] = hex64(fnv1a(j.dump()));
  return j;
}

inline Instance instance_from_json(const json& j) {
  if (j.at("version").get<int>() != kInstanceFormatVersion)
    throw std::invalid_argument("unsupported instance format version");
  const std::string family = j.at("family").get<std::string>();
  if (!known_family(family)) throw std::invalid_argument("unknown family '" + family + "'");
  auto gf = graph_from_json(j.at("graph"));
  Instance I = make_instance(std::move(gf.graph), oracle_from_json(j.at("cost")), gf.s, gf.t, family);
  I.id = j.at("id").get<std::string>();
  I.graph_class = j.at("graph_class").get<std::string>();
  I.params = j.at("params");
  I.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("known_optimum"))
    I.known = KnownOptimum{j["known_optimum"].at("arcs").get<std::vector<int>>(),
                           j["known_optimum"].at("value").get<double>()};
  if (j.contains("content_hash") && j.at("content_hash").get<std::string>() != content_hash(I))
    throw std::invalid_argument("instance content hash mismatch");
  return I;
}

// Regenerates a benchmark instance from its stored generation parameters and compares content.
inline bool matches_regeneration(const Instance& I) {
  InstanceSpec spec{I.graph_class, I.params, I.family, I.seed};
  return content_hash(generate(spec)) == content_hash(I);
}

inline void save_instance(const Instance& I, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << instance_to_json(I).dump(1) << "\n";
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return instance_from_json(json::parse(in));
}

}  // namespace coopcut
