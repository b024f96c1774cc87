#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace coopcut {

using Rational = boost::multiprecision::cpp_rational;

// Exact for every finite double.
inline Rational to_rational(double v) {
  if (v == 0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(v, &exp);
  auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(scaled);
  if (exp > 0) {
    r *= Rational(boost::multiprecision::cpp_int(1) << exp);
  } else if (exp < 0) {
    r /= Rational(boost::multiprecision::cpp_int(1) << -exp);
  }
  return r;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

enum class Sense { le, ge, eq };

struct LpRow {
  std::vector<std::pair<int, Rational>> coefs;
  Sense sense = Sense::le;
  Rational rhs = 0;
};

// maximize c^T x subject to rows, x >= 0.
struct LinearProgram {
  int num_vars = 0;
  std::vector<Rational> objective;
  std::vector<LpRow> rows;

  int add_row(LpRow r) {
    rows.push_back(std::move(r));
    return static_cast<int>(rows.size()) - 1;
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rational value = 0;
  std::vector<Rational> x;
  std::vector<Rational> duals;  // one per row, sign as for the given row sense
  int pivots = 0;
};

// Dense two-phase tableau simplex over the rationals with Bland's rule.
class RationalSimplex {
 public:
  explicit RationalSimplex(const LinearProgram& lp) : lp_(lp) {}

  LpResult solve(int max_pivots = 1000000) {
    build();
    LpResult res;
    max_pivots_ = max_pivots;

    std::vector<Rational> c1(cols_, 0);
    for (int j = art_begin_; j < cols_; ++j) c1[j] = -1;
    run(c1, true);
    Rational infeas = 0;
    for (int i = 0; i < rows_; ++i)
      if (basis_[i] >= art_begin_) infeas += T_[i][cols_];
    if (infeas != 0) {
      res.status = LpStatus::infeasible;
      res.pivots = pivots_;
      return res;
    }
    drive_out_artificials();

    std::vector<Rational> c2(cols_, 0);
    for (int j = 0; j < lp_.num_vars; ++j) c2[j] = lp_.objective[j];
    if (!run(c2, false)) {
      res.status = LpStatus::unbounded;
      res.pivots = pivots_;
      return res;
    }
    res.status = LpStatus::optimal;
    res.x.assign(lp_.num_vars, 0);
    for (int i = 0; i < rows_; ++i)
      if (basis_[i] < lp_.num_vars) res.x[basis_[i]] = T_[i][cols_];
    for (int j = 0; j < lp_.num_vars; ++j) res.value += lp_.objective[j] * res.x[j];
    auto d = reduced_costs(c2);
    res.duals.assign(rows_, 0);
    for (int i = 0; i < rows_; ++i) res.duals[i] = -d[unit_col_[i]] * flip_[i];
    res.pivots = pivots_;
    return res;
  }

 private:
  void build() {
    rows_ = static_cast<int>(lp_.rows.size());
    if (static_cast<int>(lp_.objective.size()) != lp_.num_vars)
      throw std::invalid_argument("objective size mismatch");
    int slacks = 0, arts = 0;
    std::vector<Sense> sense(rows_);
    flip_.assign(rows_, 1);
    for (int i = 0; i < rows_; ++i) {
      sense[i] = lp_.rows[i].sense;
      if (lp_.rows[i].rhs < 0) {
        flip_[i] = -1;
        if (sense[i] == Sense::le) sense[i] = Sense::ge;
        else if (sense[i] == Sense::ge) sense[i] = Sense::le;
      }
      if (sense[i] != Sense::eq) ++slacks;
      if (sense[i] != Sense::le) ++arts;
    }
    art_begin_ = lp_.num_vars + slacks;
    cols_ = art_begin_ + arts;
    T_.assign(rows_, std::vector<Rational>(cols_ + 1, 0));
    basis_.assign(rows_, -1);
    unit_col_.assign(rows_, -1);
    int sc = lp_.num_vars, ac = art_begin_;
    for (int i = 0; i < rows_; ++i) {
      for (auto& [j, v] : lp_.rows[i].coefs) {
        if (j < 0 || j >= lp_.num_vars) throw std::out_of_range("LP variable index");
        T_[i][j] += v * flip_[i];
      }
      T_[i][cols_] = lp_.rows[i].rhs * flip_[i];
      if (sense[i] == Sense::le) {
        T_[i][sc] = 1;
        basis_[i] = unit_col_[i] = sc++;
      } else {
        if (sense[i] == Sense::ge) T_[i][sc++] = -1;
        T_[i][ac] = 1;
        basis_[i] = unit_col_[i] = ac++;
      }
    }
  }

  std::vector<Rational> reduced_costs(const std::vector<Rational>& c) const {
    std::vector<Rational> d = c;
    for (int i = 0; i < rows_; ++i) {
      const Rational& cb = c[basis_[i]];
      if (cb == 0) continue;
      for (int j = 0; j < cols_; ++j)
        if (T_[i][j] != 0) d[j] -= cb * T_[i][j];
    }
    return d;
  }

  void pivot(int r, int col) {
    Rational p = T_[r][col];
    std::vector<int> nz;
    for (int j = 0; j <= cols_; ++j) {
      if (T_[r][j] == 0) continue;
      T_[r][j] /= p;
      nz.push_back(j);
    }
    for (int i = 0; i < rows_; ++i) {
      if (i == r || T_[i][col] == 0) continue;
      Rational factor = T_[i][col];
      for (int j : nz) T_[i][j] -= factor * T_[r][j];
    }
    basis_[r] = col;
    if (++pivots_ > max_pivots_) throw std::runtime_error("simplex pivot limit exceeded");
  }

  // Returns false if unbounded.
  bool run(const std::vector<Rational>& c, bool phase1) {
    const int allowed = phase1 ? cols_ : art_begin_;
    for (;;) {
      auto d = reduced_costs(c);
      int enter = -1;
      for (int j = 0; j < allowed; ++j)
        if (d[j] > 0) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int i = 0; i < rows_; ++i) {
        if (T_[i][enter] <= 0) continue;
        Rational ratio = T_[i][cols_] / T_[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void drive_out_artificials() {
    for (int i = 0; i < rows_; ++i) {
      if (basis_[i] < art_begin_) continue;
      for (int j = 0; j < art_begin_; ++j) {
        if (T_[i][j] != 0) {
          pivot(i, j);
          break;
        }
      }
      // A row with no structural entry is redundant; its artificial stays at zero.
    }
  }

  const LinearProgram& lp_;
  int rows_ = 0, cols_ = 0, art_begin_ = 0;
  int pivots_ = 0, max_pivots_ = 0;
  std::vector<std::vector<Rational>> T_;
  std::vector<int> basis_, unit_col_, flip_;
};

inline LpResult solve_lp(const LinearProgram& lp, int max_pivots = 1000000) {
  return RationalSimplex(lp).solve(max_pivots);
}

}  // namespace coopcut
