#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace coopcut {

using json = nlohmann::json;
using EdgeVector = std::vector<double>;

namespace detail {
inline thread_local std::uint64_t tl_oracle_calls = 0;
}

// Oracle calls made by the current thread. Solvers are single threaded, so the
// difference of two readings around a solve attributes calls to that solve even
// when several solves share one oracle.
inline std::uint64_t thread_oracle_calls() { return detail::tl_oracle_calls; }

// Monotone, normalized set function on the ground set {0, ..., m-1}. Subsets are
// passed as index lists without duplicates, in any order.
class SubmodularOracle {
 public:
  explicit SubmodularOracle(int m) : m_(m) {
    if (m < 1) throw std::invalid_argument("ground set must be nonempty");
  }
  SubmodularOracle(const SubmodularOracle&) = delete;
  SubmodularOracle& operator=(const SubmodularOracle&) = delete;
  virtual ~SubmodularOracle() = default;

  int size() const { return m_; }

  double eval(std::span<const int> A) const {
    for (int e : A) check_index(e);
    count(1);
    return eval_impl(A);
  }
  double eval(std::initializer_list<int> A) const {
    return eval(std::span<const int>(A.begin(), A.size()));
  }
  double operator()(std::span<const int> A) const { return eval(A); }

  // out[j] = f(order[0..j]). Counts one call per prefix.
  void prefix(std::span<const int> order, std::span<double> out) const {
    if (out.size() < order.size()) throw std::invalid_argument("prefix: output too short");
    for (int e : order) check_index(e);
    count(order.size());
    prefix_impl(order, out);
  }

  // Uncounted, unchecked evaluation for oracles composed of other oracles. The
  // composite counts the call once at its own level.
  double eval_raw(std::span<const int> A) const { return eval_impl(A); }
  void prefix_raw(std::span<const int> order, std::span<double> out) const {
    prefix_impl(order, out);
  }

  std::uint64_t calls() const { return calls_.load(std::memory_order_relaxed); }
  void reset_calls() const { calls_.store(0, std::memory_order_relaxed); }

  virtual std::string kind() const = 0;
  // Explicit tables; see oracle_from_json for the inverse.
  virtual json to_json() const = 0;

 protected:
  virtual double eval_impl(std::span<const int> A) const = 0;

  virtual void prefix_impl(std::span<const int> order, std::span<double> out) const {
    for (std::size_t j = 0; j < order.size(); ++j) out[j] = eval_impl(order.subspan(0, j + 1));
  }

  void check_index(int e) const {
    if (e < 0 || e >= m_) throw std::out_of_range("element index outside ground set");
  }

 private:
  void count(std::uint64_t k) const {
    calls_.fetch_add(k, std::memory_order_relaxed);
    detail::tl_oracle_calls += k;
  }

  int m_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

using OraclePtr = std::shared_ptr<const SubmodularOracle>;

// f(A) = sum of w over A.
class ModularOracle final : public SubmodularOracle {
 public:
  explicit ModularOracle(std::vector<double> w)
      : SubmodularOracle(static_cast<int>(w.size())), w_(std::move(w)) {
    for (double x : w_)
      if (!(x >= 0)) throw std::invalid_argument("modular weights must be nonnegative");
  }
  const std::vector<double>& weights() const { return w_; }
  std::string kind() const override { return "modular"; }
  json to_json() const override { return {{"type", kind()}, {"w", w_}}; }

 protected:
  double eval_impl(std::span<const int> A) const override {
    double s = 0;
    for (int e : A) s += w_[e];
    return s;
  }
  void prefix_impl(std::span<const int> order, std::span<double> out) const override {
    double s = 0;
    for (std::size_t j = 0; j < order.size(); ++j) out[j] = (s += w_[order[j]]);
  }

 private:
  std::vector<double> w_;
};

// f(A) = max of w over A (0 on the empty set). With w = c on a group G and 0
// elsewhere this is c times the indicator that A hits G.
class MaxWeightOracle final : public SubmodularOracle {
 public:
  explicit MaxWeightOracle(std::vector<double> w)
      : SubmodularOracle(static_cast<int>(w.size())), w_(std::move(w)) {
    for (double x : w_)
      if (!(x >= 0)) throw std::invalid_argument("max-weight weights must be nonnegative");
  }
  const std::vector<double>& weights() const { return w_; }
  std::string kind() const override { return "max_weight"; }
  json to_json() const override { return {{"type", kind()}, {"w", w_}}; }

 protected:
  double eval_impl(std::span<const int> A) const override {
    double s = 0;
    for (int e : A) s = std::max(s, w_[e]);
    return s;
  }
  void prefix_impl(std::span<const int> order, std::span<double> out) const override {
    double s = 0;
    for (std::size_t j = 0; j < order.size(); ++j) out[j] = (s = std::max(s, w_[order[j]]));
  }

 private:
  std::vector<double> w_;
};

// Wraps an arbitrary callable. Used by tests and for ad hoc functions; it cannot
// be serialized.
class FunctionOracle final : public SubmodularOracle {
 public:
  using Fn = std::function<double(std::span<const int>)>;
  FunctionOracle(int m, Fn fn, std::string name = "function")
      : SubmodularOracle(m), fn_(std::move(fn)), name_(std::move(name)) {}
  std::string kind() const override { return name_; }
  json to_json() const override {
    throw std::logic_error("oracle '" + name_ + "' has no explicit table form");
  }

 protected:
  double eval_impl(std::span<const int> A) const override { return fn_(A); }

 private:
  Fn fn_;
  std::string name_;
};

inline std::vector<int> mask_to_set(std::uint64_t mask) {
  std::vector<int> s;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1) s.push_back(i);
  return s;
}

inline std::uint64_t set_to_mask(std::span<const int> A) {
  std::uint64_t m = 0;
  for (int e : A) m |= std::uint64_t{1} << e;
  return m;
}

// f(A + e) - f(A); zero when e is already in A.
inline double marginal(const SubmodularOracle& f, int e, std::span<const int> A) {
  if (e < 0 || e >= f.size()) throw std::out_of_range("marginal: element outside ground set");
  if (std::find(A.begin(), A.end(), e) != A.end()) return 0.0;
  std::vector<int> B(A.begin(), A.end());
  double base = f.eval(B);
  B.push_back(e);
  return f.eval(B) - base;
}
inline double marginal(const SubmodularOracle& f, int e, std::initializer_list<int> A) {
  return marginal(f, e, std::span<const int>(A.begin(), A.size()));
}

// Indices sorted by descending x, ties by ascending index.
inline std::vector<int> descending_order(const EdgeVector& x) {
  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] > x[b]; });
  return order;
}

inline void check_edge_vector(const SubmodularOracle& f, const EdgeVector& x) {
  if (static_cast<int>(x.size()) != f.size())
    throw std::invalid_argument("edge vector length differs from ground set size");
  for (double v : x)
    if (!(v >= 0) || !std::isfinite(v))
      throw std::invalid_argument("edge vector must be finite and nonnegative");
}

inline double lovasz_extension(const SubmodularOracle& f, const EdgeVector& x) {
  check_edge_vector(f, x);
  std::vector<int> order = descending_order(x);
  std::size_t k = 0;
  while (k < order.size() && x[order[k]] > 0) ++k;
  if (k == 0) return 0.0;
  std::vector<double> F(k);
  f.prefix(std::span<const int>(order.data(), k), F);
  double total = 0;
  for (std::size_t j = 0; j < k; ++j) {
    double next = j + 1 < k ? x[order[j + 1]] : 0.0;
    total += (x[order[j]] - next) * F[j];
  }
  return total;
}

// Vertex of P(f) maximizing z.x, built along the descending order of x.
inline EdgeVector greedy_vertex(const SubmodularOracle& f, const EdgeVector& x) {
  check_edge_vector(f, x);
  std::vector<int> order = descending_order(x);
  std::vector<double> F(order.size());
  f.prefix(order, F);
  EdgeVector z(x.size());
  double prev = 0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    z[order[j]] = F[j] - prev;
    prev = F[j];
  }
  return z;
}

// max_e 1 - f(e | E - e) / f(e), skipping elements with f(e) = 0.
inline double curvature(const SubmodularOracle& f) {
  const int m = f.size();
  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  const double fE = f.eval(all);
  double kappa = 0;
  std::vector<int> rest;
  for (int e = 0; e < m; ++e) {
    double fe = f.eval({e});
    if (!(fe > 0)) continue;
    rest.clear();
    for (int j = 0; j < m; ++j)
      if (j != e) rest.push_back(j);
    double tail = fE - f.eval(rest);
    kappa = std::max(kappa, 1.0 - tail / fe);
  }
  return std::clamp(kappa, 0.0, 1.0);
}

// f(e | E - e) for every e.
inline EdgeVector tail_marginals(const SubmodularOracle& f) {
  const int m = f.size();
  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  const double fE = f.eval(all);
  EdgeVector out(m);
  std::vector<int> rest;
  for (int e = 0; e < m; ++e) {
    rest.clear();
    for (int j = 0; j < m; ++j)
      if (j != e) rest.push_back(j);
    out[e] = std::max(0.0, fE - f.eval(rest));
  }
  return out;
}

// f on every subset, indexed by bit mask.
inline std::vector<double> subset_table(const SubmodularOracle& f, int cap = 20) {
  const int m = f.size();
  if (m > cap) throw std::invalid_argument("ground set too large for exhaustive enumeration");
  std::vector<double> t(std::size_t{1} << m);
  std::vector<int> s;
  for (std::uint64_t mask = 0; mask < t.size(); ++mask) {
    s = mask_to_set(mask);
    t[mask] = f.eval(s);
  }
  return t;
}

inline double table_tolerance(const std::vector<double>& t) {
  double mx = 1.0;
  for (double v : t) mx = std::max(mx, std::abs(v));
  return 1e-9 * mx;
}

struct SubmodularWitness {
  std::vector<int> A, B;
  int e = -1;
  double marginal_A = 0, marginal_B = 0;
};

// Exhaustive diminishing-returns check. The local form f(e|A) >= f(e|A + e') is
// equivalent to the global one, so the first violating (A, B = A + e', e) in
// mask order is returned.
inline std::optional<SubmodularWitness> check_submodular(const SubmodularOracle& f, int cap = 12,
                                                         double tol = -1) {
  if (f.size() > cap) throw std::invalid_argument("check_submodular: ground set too large");
  const int m = f.size();
  auto t = subset_table(f, cap);
  if (tol < 0) tol = table_tolerance(t);
  for (std::uint64_t A = 0; A < t.size(); ++A) {
    for (int e = 0; e < m; ++e) {
      if (A >> e & 1) continue;
      double ma = t[A | (1ULL << e)] - t[A];
      for (int e2 = 0; e2 < m; ++e2) {
        if (e2 == e || (A >> e2 & 1)) continue;
        std::uint64_t B = A | (1ULL << e2);
        double mb = t[B | (1ULL << e)] - t[B];
        if (mb > ma + tol) return SubmodularWitness{mask_to_set(A), mask_to_set(B), e, ma, mb};
      }
    }
  }
  return std::nullopt;
}

struct MonotoneWitness {
  std::vector<int> A;
  int e = -1;
  double f_A = 0, f_Ae = 0;
};

inline std::optional<MonotoneWitness> check_monotone(const SubmodularOracle& f, int cap = 12,
                                                     double tol = -1) {
  if (f.size() > cap) throw std::invalid_argument("check_monotone: ground set too large");
  const int m = f.size();
  auto t = subset_table(f, cap);
  if (tol < 0) tol = table_tolerance(t);
  for (std::uint64_t A = 0; A < t.size(); ++A)
    for (int e = 0; e < m; ++e) {
      if (A >> e & 1) continue;
      double fa = t[A], fae = t[A | (1ULL << e)];
      if (fae < fa - tol) return MonotoneWitness{mask_to_set(A), e, fa, fae};
    }
  return std::nullopt;
}

inline bool check_normalized(const SubmodularOracle& f, double tol = 1e-12) {
  return std::abs(f.eval(std::span<const int>{})) <= tol;
}

struct SfmResult {
  std::vector<int> set;
  double value = 0;
};

// Exact minimizer of g over subsets of {0..k-1}. Among minimizers the smallest
// cardinality wins, then the lexicographically smallest element list.
inline SfmResult sfm_bruteforce(int k, const std::function<double(std::span<const int>)>& g,
                                int cap = 22) {
  if (k < 0 || k > cap) throw std::invalid_argument("sfm_bruteforce: universe too large");
  SfmResult best{{}, g(std::span<const int>{})};
  std::vector<int> s;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    s = mask_to_set(mask);
    double v = g(s);
    const double tol = std::isfinite(best.value) ? 1e-12 * std::max(1.0, std::abs(best.value)) : 0.0;
    bool better = v < best.value - tol;
    if (!better && std::abs(v - best.value) <= tol) {
      better = s.size() < best.set.size() ||
               (s.size() == best.set.size() &&
                std::lexicographical_compare(s.begin(), s.end(), best.set.begin(), best.set.end()));
    }
    if (better) best = {s, v};
  }
  return best;
}

}  // namespace coopcut
