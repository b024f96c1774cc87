#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coopcut/submodular.hpp"

namespace coopcut {

// g(w(A)) for a concave g with g(0) = 0: log(1 + .) or sqrt(.).
class ConcaveModularOracle final : public SubmodularOracle {
 public:
  enum class Shape { log1p, sqrt };

  ConcaveModularOracle(std::vector<double> w, Shape shape)
      : SubmodularOracle(static_cast<int>(w.size())), w_(std::move(w)), shape_(shape) {
    for (double x : w_)
      if (!(x >= 0)) throw std::invalid_argument("concave-modular weights must be nonnegative");
  }
  const std::vector<double>& weights() const { return w_; }
  Shape shape() const { return shape_; }
  std::string kind() const override { return "concave_modular"; }
  json to_json() const override {
    return {{"type", kind()}, {"shape", shape_ == Shape::log1p ? "log1p" : "sqrt"}, {"w", w_}};
  }

 protected:
  double g(double s) const { return shape_ == Shape::log1p ? std::log1p(s) : std::sqrt(s); }
  double eval_impl(std::span<const int> A) const override {
    double s = 0;
    for (int e : A) s += w_[e];
    return g(s);
  }
  void prefix_impl(std::span<const int> order, std::span<double> out) const override {
    double s = 0;
    for (std::size_t j = 0; j < order.size(); ++j) out[j] = g(s += w_[order[j]]);
  }

 private:
  std::vector<double> w_;
  Shape shape_;
};

// Rank over GF(2) of a column subset of a binary matrix with `rows` rows.
class Gf2RankOracle final : public SubmodularOracle {
 public:
  // columns[e] is a bit string of length rows, row 0 first.
  Gf2RankOracle(int rows, const std::vector<std::string>& columns)
      : SubmodularOracle(static_cast<int>(columns.size())), rows_(rows), words_((rows + 63) / 64) {
    if (rows < 1) throw std::invalid_argument("matrix needs at least one row");
    bits_.assign(columns.size() * words_, 0);
    for (std::size_t e = 0; e < columns.size(); ++e) {
      if (static_cast<int>(columns[e].size()) != rows)
        throw std::invalid_argument("column length differs from row count");
      for (int r = 0; r < rows; ++r) {
        char c = columns[e][r];
        if (c != '0' && c != '1') throw std::invalid_argument("column entries must be 0 or 1");
        if (c == '1') bits_[e * words_ + r / 64] |= std::uint64_t{1} << (r % 64);
      }
    }
  }
  int rows() const { return rows_; }
  std::string column(int e) const {
    std::string s(rows_, '0');
    for (int r = 0; r < rows_; ++r)
      if (bits_[e * words_ + r / 64] >> (r % 64) & 1) s[r] = '1';
    return s;
  }
  std::string kind() const override { return "gf2_rank"; }
  json to_json() const override {
    std::vector<std::string> cols;
    for (int e = 0; e < size(); ++e) cols.push_back(column(e));
    return {{"type", kind()}, {"rows", rows_}, {"columns", cols}};
  }

 protected:
  double eval_impl(std::span<const int> A) const override {
    Basis b(*this);
    int r = 0;
    for (int e : A) r += b.insert(e);
    return r;
  }
  void prefix_impl(std::span<const int> order, std::span<double> out) const override {
    Basis b(*this);
    int r = 0;
    for (std::size_t j = 0; j < order.size(); ++j) out[j] = (r += b.insert(order[j]));
  }

 private:
  // XOR basis keyed by leading bit.
  struct Basis {
    const Gf2RankOracle& o;
    std::vector<std::uint64_t> rows;
    std::vector<char> used;
    std::vector<std::uint64_t> v;
    explicit Basis(const Gf2RankOracle& oracle)
        : o(oracle), rows(static_cast<std::size_t>(oracle.rows_) * oracle.words_, 0),
          used(oracle.rows_, 0), v(oracle.words_) {}
    int insert(int e) {
      const int W = o.words_;
      std::copy_n(o.bits_.begin() + static_cast<std::ptrdiff_t>(e) * W, W, v.begin());
      for (int bit = o.rows_ - 1; bit >= 0; --bit) {
        if (!(v[bit / 64] >> (bit % 64) & 1)) continue;
        if (!used[bit]) {
          used[bit] = 1;
          std::copy(v.begin(), v.end(), rows.begin() + static_cast<std::ptrdiff_t>(bit) * W);
          return 1;
        }
        for (int w = 0; w < W; ++w) v[w] ^= rows[static_cast<std::size_t>(bit) * W + w];
      }
      return 0;
    }
  };

  int rows_;
  int words_;
  std::vector<std::uint64_t> bits_;
};

// Number of distinct labels in A.
class LabelOracle final : public SubmodularOracle {
 public:
  LabelOracle(std::vector<int> labels, int num_labels)
      : SubmodularOracle(static_cast<int>(labels.size())), labels_(std::move(labels)),
        num_labels_(num_labels) {
    for (int l : labels_)
      if (l < 0 || l >= num_labels_) throw std::invalid_argument("label out of range");
  }
  const std::vector<int>& labels() const { return labels_; }
  int num_labels() const { return num_labels_; }
  std::string kind() const override { return "labels"; }
  json to_json() const override {
    return {{"type", kind()}, {"num_labels", num_labels_}, {"labels", labels_}};
  }

 protected:
  double eval_impl(std::span<const int> A) const override {
    std::vector<char> seen(num_labels_, 0);
    int c = 0;
    for (int e : A)
      if (!seen[labels_[e]]) seen[labels_[e]] = 1, ++c;
    return c;
  }
  void prefix_impl(std::span<const int> order, std::span<double> out) const override {
    std::vector<char> seen(num_labels_, 0);
    int c = 0;
    for (std::size_t j = 0; j < order.size(); ++j) {
      int l = labels_[order[j]];
      if (!seen[l]) seen[l] = 1, ++c;
      out[j] = c;
    }
  }

 private:
  std::vector<int> labels_;
  int num_labels_;
};

// min{ |A - R| + min{|A n R|, lambda1}, lambda2 }.
class TruncatedOracle final : public SubmodularOracle {
 public:
  TruncatedOracle(std::vector<char> in_r, double lambda1, double lambda2)
      : SubmodularOracle(static_cast<int>(in_r.size())), in_r_(std::move(in_r)), l1_(lambda1),
        l2_(lambda2) {
    if (!(l1_ >= 0) || !(l2_ >= 0)) throw std::invalid_argument("thresholds must be nonnegative");
  }
  const std::vector<char>& hidden() const { return in_r_; }
  double lambda1() const { return l1_; }
  double lambda2() const { return l2_; }
  std::string kind() const override { return "truncated"; }
  json to_json() const override {
    std::vector<int> r;
    for (int e = 0; e < size(); ++e)
      if (in_r_[e]) r.push_back(e);
    return {{"type", kind()}, {"m", size()}, {"hidden", r}, {"lambda1", l1_}, {"lambda2", l2_}};
  }

 protected:
  double value(int out, int in) const { return std::min(out + std::min<double>(in, l1_), l2_); }
  double eval_impl(std::span<const int> A) const override {
    int in = 0, out = 0;
    for (int e : A) (in_r_[e] ? in : out)++;
    return value(out, in);
  }
  void prefix_impl(std::span<const int> order, std::span<double> out_v) const override {
    int in = 0, out = 0;
    for (std::size_t j = 0; j < order.size(); ++j) {
      (in_r_[order[j]] ? in : out)++;
      out_v[j] = value(out, in);
    }
  }

 private:
  std::vector<char> in_r_;
  double l1_, l2_;
};

// Exact derangement counts. D(n) by inclusion-exclusion; D'(n) counts
// permutations of n items where one designated item may be fixed and no other.
struct DerangementTables {
  static long long factorial(int n) {
    long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }
  static long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }
  static long long D(int n) {
    if (n < 0 || n > 20) throw std::invalid_argument("derangement count out of range");
    long long s = 0;
    for (int k = 0; k <= n; ++k) s += (k % 2 ? -1 : 1) * (factorial(n) / factorial(k));
    return s;
  }
  static long long Dprime(int n) {
    if (n < 1 || n > 20) throw std::invalid_argument("relaxed derangement count out of range");
    long long s = 0;
    for (int k = 0; k <= n - 1; ++k) s += (k % 2 ? -1 : 1) * binom(n - 1, k) * factorial(n - k);
    return s;
  }
};

// Balance penalty of the bisection reduction.
inline double f_bal(int cs, int ct, int cst, int nB) {
  if (nB < 2) throw std::invalid_argument("f_bal needs at least two nodes");
  long long d = DerangementTables::D(nB);
  long long dp = DerangementTables::Dprime(nB - 1);
  long long num = static_cast<long long>(cs + ct) * d - (static_cast<long long>(cs) * ct - cst) * dp;
  return static_cast<double>(num) / static_cast<double>(d);
}

// f_bal lifted to a ground set: s_edge[i], t_edge[i] are the elements (s, v_i)
// and (v_i, t); other elements do not contribute.
class BalanceOracle final : public SubmodularOracle {
 public:
  BalanceOracle(int m, std::vector<int> s_edge, std::vector<int> t_edge)
      : SubmodularOracle(m), s_(std::move(s_edge)), t_(std::move(t_edge)), role_(m, 0),
        node_(m, -1) {
    if (s_.size() != t_.size() || s_.size() < 2)
      throw std::invalid_argument("balance oracle needs matching terminal stars of size >= 2");
    for (std::size_t i = 0; i < s_.size(); ++i) {
      check_index(s_[i]);
      check_index(t_[i]);
      role_[s_[i]] = 1, node_[s_[i]] = static_cast<int>(i);
      role_[t_[i]] = 2, node_[t_[i]] = static_cast<int>(i);
    }
  }
  int nodes() const { return static_cast<int>(s_.size()); }
  std::string kind() const override { return "balance"; }
  json to_json() const override {
    return {{"type", kind()}, {"m", size()}, {"s_edges", s_}, {"t_edges", t_}};
  }

 protected:
  double eval_impl(std::span<const int> A) const override {
    std::vector<char> mark(s_.size(), 0);
    int cs = 0, ct = 0, cst = 0;
    for (int e : A) {
      if (!role_[e]) continue;
      (role_[e] == 1 ? cs : ct)++;
      if ((mark[node_[e]] |= role_[e]) == 3) ++cst;
    }
    return f_bal(cs, ct, cst, nodes());
  }

 private:
  std::vector<int> s_, t_;
  std::vector<char> role_;
  std::vector<int> node_;
};

// sum_j c_j f_j over a common ground set.
class SumOracle final : public SubmodularOracle {
 public:
  SumOracle(std::vector<std::pair<double, OraclePtr>> terms)
      : SubmodularOracle(terms.empty() ? 0 : terms.front().second->size()),
        terms_(std::move(terms)) {
    for (auto& [c, f] : terms_) {
      if (!(c >= 0)) throw std::invalid_argument("sum coefficients must be nonnegative");
      if (f->size() != size()) throw std::invalid_argument("sum terms need one ground set");
    }
  }
  const std::vector<std::pair<double, OraclePtr>>& terms() const { return terms_; }
  std::string kind() const override { return "sum"; }
  json to_json() const override {
    json t = json::array();
    for (auto& [c, f] : terms_) t.push_back({{"coef", c}, {"oracle", f->to_json()}});
    return {{"type", kind()}, {"terms", t}};
  }

 protected:
  double eval_impl(std::span<const int> A) const override {
    double s = 0;
    for (auto& [c, f] : terms_) s += c * f->eval_raw(A);
    return s;
  }
  void prefix_impl(std::span<const int> order, std::span<double> out) const override {
    std::fill(out.begin(), out.begin() + order.size(), 0.0);
    std::vector<double> tmp(order.size());
    for (auto& [c, f] : terms_) {
      f->prefix_raw(order, tmp);
      for (std::size_t j = 0; j < order.size(); ++j) out[j] += c * tmp[j];
    }
  }

 private:
  std::vector<std::pair<double, OraclePtr>> terms_;
};

// Prices a set of arcs by the set of cost elements they map to, so an arc and
// its reverse count once.
class LiftedOracle final : public SubmodularOracle {
 public:
  LiftedOracle(OraclePtr base, std::vector<int> element_of)
      : SubmodularOracle(static_cast<int>(element_of.size())), base_(std::move(base)),
        elem_(std::move(element_of)) {
    for (int e : elem_)
      if (e < 0 || e >= base_->size()) throw std::invalid_argument("arc maps outside ground set");
  }
  const SubmodularOracle& base() const { return *base_; }
  std::string kind() const override { return "lifted"; }
  json to_json() const override {
    return {{"type", kind()}, {"element_of", elem_}, {"base", base_->to_json()}};
  }

 protected:
  double eval_impl(std::span<const int> A) const override {
    std::vector<int> els;
    unique_elements(A, els, nullptr);
    return base_->eval_raw(els);
  }
  void prefix_impl(std::span<const int> order, std::span<double> out) const override {
    std::vector<int> els, pos;
    unique_elements(order, els, &pos);
    std::vector<double> vals(els.size());
    if (!els.empty()) base_->prefix_raw(els, vals);
    for (std::size_t j = 0; j < order.size(); ++j) out[j] = pos[j] < 0 ? 0.0 : vals[pos[j]];
  }

 private:
  // pos[j] is the index in els of the last new element at or before j.
  void unique_elements(std::span<const int> A, std::vector<int>& els, std::vector<int>* pos) const {
    thread_local std::vector<char> mark;
    if (static_cast<int>(mark.size()) < base_->size()) mark.assign(base_->size(), 0);
    els.clear();
    if (pos) pos->assign(A.size(), -1);
    for (std::size_t j = 0; j < A.size(); ++j) {
      int e = elem_[A[j]];
      if (!mark[e]) mark[e] = 1, els.push_back(e);
      if (pos) (*pos)[j] = static_cast<int>(els.size()) - 1;
    }
    for (int e : els) mark[e] = 0;
  }

  OraclePtr base_;
  std::vector<int> elem_;
};

inline OraclePtr oracle_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "modular") return std::make_shared<ModularOracle>(j.at("w").get<std::vector<double>>());
  if (type == "max_weight")
    return std::make_shared<MaxWeightOracle>(j.at("w").get<std::vector<double>>());
  if (type == "concave_modular") {
    std::string shape = j.at("shape").get<std::string>();
    if (shape != "log1p" && shape != "sqrt") throw std::invalid_argument("unknown concave shape");
    return std::make_shared<ConcaveModularOracle>(
        j.at("w").get<std::vector<double>>(),
        shape == "log1p" ? ConcaveModularOracle::Shape::log1p : ConcaveModularOracle::Shape::sqrt);
  }
  if (type == "gf2_rank")
    return std::make_shared<Gf2RankOracle>(j.at("rows").get<int>(),
                                           j.at("columns").get<std::vector<std::string>>());
  if (type == "labels")
    return std::make_shared<LabelOracle>(j.at("labels").get<std::vector<int>>(),
                                         j.at("num_labels").get<int>());
  if (type == "truncated") {
    std::vector<char> in_r(j.at("m").get<int>(), 0);
    for (int e : j.at("hidden").get<std::vector<int>>()) in_r.at(e) = 1;
    return std::make_shared<TruncatedOracle>(std::move(in_r), j.at("lambda1").get<double>(),
                                             j.at("lambda2").get<double>());
  }
  if (type == "balance")
    return std::make_shared<BalanceOracle>(j.at("m").get<int>(),
                                           j.at("s_edges").get<std::vector<int>>(),
                                           j.at("t_edges").get<std::vector<int>>());
  if (type == "sum") {
    std::vector<std::pair<double, OraclePtr>> terms;
    for (auto& t : j.at("terms"))
      terms.emplace_back(t.at("coef").get<double>(), oracle_from_json(t.at("oracle")));
    return std::make_shared<SumOracle>(std::move(terms));
  }
  if (type == "lifted")
    return std::make_shared<LiftedOracle>(oracle_from_json(j.at("base")),
                                          j.at("element_of").get<std::vector<int>>());
  throw std::invalid_argument("unknown oracle type '" + type + "'");
}

}  // namespace coopcut
