#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "boxlab/errors.hpp"
#include "boxlab/numeric.hpp"

namespace boxlab::lp {

enum class Status { optimal, infeasible, unbounded };

template <Scalar T>
struct Result {
  Status status;
  T objective;
  std::vector<T> x;
};

/// Dense two-phase tableau simplex for
///   minimize c.x  subject to  A x = b,  x >= 0.
///
/// Bland's rule guarantees termination. In exact mode every pivot is exact;
/// in floating mode comparisons use the scalar tolerance. Each call owns its
/// workspace.
template <Scalar T>
class Simplex {
 public:
  Simplex(std::vector<std::vector<T>> a, std::vector<T> b, std::vector<T> c)
      : m_(a.size()), n_(c.size()), c_(std::move(c)) {
    if (b.size() != m_) throw InvalidArgument("lp: row count mismatch between A and b");
    for (const auto& row : a) {
      if (row.size() != n_) throw InvalidArgument("lp: column count mismatch between A and c");
    }
    // Columns: n_ structural, m_ artificial, then the right-hand side.
    tab_.assign(m_, std::vector<T>(n_ + m_ + 1, T(0)));
    for (std::size_t i = 0; i < m_; ++i) {
      bool flip = b[i] < T(0);
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = flip ? T(-a[i][j]) : a[i][j];
      tab_[i][n_ + i] = T(1);
      tab_[i][rhs()] = flip ? T(-b[i]) : b[i];
    }
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) basis_[i] = n_ + i;
  }

  Result<T> solve() {
    // Phase 1: minimize the sum of artificials.
    std::vector<T> phase1(n_ + m_, T(0));
    for (std::size_t i = 0; i < m_; ++i) phase1[n_ + i] = T(1);
    active_cols_ = n_ + m_;
    run(phase1);
    T infeas(0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) infeas += tab_[i][rhs()];
    }
    if (!approx_zero(infeas)) return {Status::infeasible, T(0), {}};
    drive_out_artificials();

    // Phase 2 over structural columns only.
    active_cols_ = n_;
    std::vector<T> cost(c_);
    if (!run(cost)) return {Status::unbounded, T(0), {}};

    std::vector<T> x(n_, T(0));
    for (std::size_t i = 0; i < basis_.size(); ++i) x[basis_[i]] = tab_[i][rhs()];
    T obj(0);
    for (std::size_t j = 0; j < n_; ++j) obj += c_[j] * x[j];
    return {Status::optimal, obj, std::move(x)};
  }

 private:
  std::size_t rhs() const { return n_ + m_; }

  bool negative(const T& v) const { return definitely_greater(T(0), v); }
  bool positive(const T& v) const { return definitely_greater(v, T(0)); }

  T reduced_cost(const std::vector<T>& cost, std::size_t j) const {
    T r = cost[j];
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (basis_[i] < cost.size()) r -= cost[basis_[i]] * tab_[i][j];
    }
    return r;
  }

  void pivot(std::size_t row, std::size_t col) {
    T piv = tab_[row][col];
    for (auto& v : tab_[row]) v /= piv;
    for (std::size_t i = 0; i < tab_.size(); ++i) {
      if (i == row || tab_[i][col] == T(0)) continue;
      T f = tab_[i][col];
      for (std::size_t j = 0; j < tab_[i].size(); ++j) tab_[i][j] -= f * tab_[row][j];
    }
    basis_[row] = col;
  }

  /// Returns false when the objective is unbounded below.
  bool run(const std::vector<T>& cost) {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < active_cols_; ++j) {
        if (negative(reduced_cost(cost, j))) {
          enter = j;
          break;
        }
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      T best_ratio(0);
      for (std::size_t i = 0; i < tab_.size(); ++i) {
        if (!positive(tab_[i][*enter])) continue;
        T ratio = tab_[i][rhs()] / tab_[i][*enter];
        if (!leave || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[*leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
    }
  }

  /// Pivots basic artificials onto structural columns; rows with no
  /// structural support are redundant and removed.
  void drive_out_artificials() {
    for (std::size_t i = 0; i < tab_.size();) {
      if (basis_[i] < n_) {
        ++i;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!approx_zero(tab_[i][j])) {
          col = j;
          break;
        }
      }
      if (col) {
        pivot(i, *col);
        ++i;
      } else {
        tab_.erase(tab_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
  }

  std::size_t m_;
  std::size_t n_;
  std::vector<T> c_;
  std::vector<std::vector<T>> tab_;
  std::vector<std::size_t> basis_;
  std::size_t active_cols_ = 0;
};

template <Scalar T>
Result<T> minimize(std::vector<std::vector<T>> a, std::vector<T> b, std::vector<T> c) {
  return Simplex<T>(std::move(a), std::move(b), std::move(c)).solve();
}

}  // namespace boxlab::lp
