#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "hetcompat/errors.hpp"
#include "hetcompat/rational.hpp"

namespace hetcompat {

// Dense equality system A x = b over nonnegative variables.
template <class T>
struct DenseLinearSystem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> a;  // row-major, rows x cols
  std::vector<T> b;

  DenseLinearSystem() = default;
  DenseLinearSystem(std::size_t m, std::size_t n)
      : rows(m), cols(n), a(m * n, T(0)), b(m, T(0)) {}

  T& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  const T& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

template <class T>
struct LpOutcome {
  bool feasible = false;
  std::vector<T> x;       // a basic feasible point when feasible
  std::vector<T> farkas;  // y with y^T A <= 0 and y^T b > 0 when infeasible
  T phase1_value = T(0);  // optimal artificial mass (0 iff feasible, exact mode)
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <class T>
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<T> x;
  T value = T(0);
  std::vector<T> farkas;
};

namespace detail {

template <class T>
constexpr T lp_pivot_eps() {
  if constexpr (scalar_traits<T>::is_exact)
    return T(0);
  else
    return T(1e-11);
}

// Two-phase dense simplex with Bland's rule. The tableau keeps the artificial
// columns so phase-1 multipliers (the Farkas vector) can be read off the cost
// row at termination.
template <class T>
class SimplexTableau {
 public:
  SimplexTableau(const DenseLinearSystem<T>& sys) : m_(sys.rows), n_(sys.cols) {
    width_ = n_ + m_ + 1;
    tab_.assign((m_ + 1) * width_, T(0));
    flip_.assign(m_, false);
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      bool flip = sys.b[i] < T(0);
      flip_[i] = flip;
      for (std::size_t j = 0; j < n_; ++j)
        at(i, j) = flip ? T(-sys.at(i, j)) : sys.at(i, j);
      at(i, n_ + i) = T(1);
      rhs(i) = flip ? T(-sys.b[i]) : sys.b[i];
      basis_[i] = n_ + i;
    }
    // phase-1 reduced costs: c_j - sum of rows (artificial costs are all 1)
    for (std::size_t j = 0; j < n_; ++j) {
      T s(0);
      for (std::size_t i = 0; i < m_; ++i) s += at(i, j);
      cost(j) = -s;
    }
    for (std::size_t j = n_; j < n_ + m_; ++j) cost(j) = T(0);
    T bs(0);
    for (std::size_t i = 0; i < m_; ++i) bs += rhs(i);
    cost_rhs() = -bs;
  }

  // Runs Bland pivots until no reduced cost is negative. `allowed_cols` caps
  // the candidate columns (phase 1 uses all, phase 2 excludes artificials).
  void optimize(std::size_t allowed_cols) {
    const T eps = lp_pivot_eps<T>();
    const std::size_t max_iter = 20000 + 200 * (m_ + n_);
    for (std::size_t iter = 0;; ++iter) {
      if (iter > max_iter) throw NumericFailure("simplex cycling guard exceeded");
      std::size_t enter = width_;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (cost(j) < -eps) {
          enter = j;
          break;  // Bland: smallest index
        }
      }
      if (enter == width_) return;
      std::size_t leave = m_;
      T best_ratio(0);
      for (std::size_t i = 0; i < m_; ++i) {
        if (!(at(i, enter) > eps)) continue;
        T ratio = rhs(i) / at(i, enter);
        if (leave == m_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) throw UnboundedSignal{};
      pivot(leave, enter);
    }
  }

  struct UnboundedSignal {};

  void pivot(std::size_t row, std::size_t col) {
    T p = at(row, col);
    for (std::size_t j = 0; j < width_; ++j) tabref(row, j) /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == row) continue;
      T f = tabref(i, col);
      if (f == T(0)) continue;
      for (std::size_t j = 0; j < width_; ++j) tabref(i, j) -= f * tabref(row, j);
      tabref(i, col) = T(0);
    }
    basis_[row] = col;
  }

  T phase1_value() const { return -cost_rhs(); }

  // Farkas vector for the original (unflipped) system, read from the final
  // phase-1 cost row under the artificial columns: y_i = 1 - r_{art_i}.
  std::vector<T> farkas() const {
    std::vector<T> y(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      T yi = T(1) - cost(n_ + i);
      y[i] = flip_[i] ? T(-yi) : yi;
    }
    return y;
  }

  std::vector<T> extract_x() const {
    std::vector<T> x(n_, T(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = rhs(i);
    return x;
  }

  // Prepares phase 2: pivots basic artificials out where possible and loads
  // the phase-2 cost row. Rows whose artificial cannot leave are redundant
  // constraints; they stay pinned at zero and never pivot again.
  void load_costs(const std::vector<T>& c) {
    const T eps = lp_pivot_eps<T>();
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      std::size_t col = n_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (abs_value(at(i, j)) > eps) {
          col = j;
          break;
        }
      }
      if (col < n_) pivot(i, col);
    }
    for (std::size_t j = 0; j < width_; ++j) cost(j) = T(0);
    for (std::size_t j = 0; j < n_; ++j) cost(j) = c[j];
    cost_rhs() = T(0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) continue;
      T cb = c[basis_[i]];
      if (cb == T(0)) continue;
      for (std::size_t j = 0; j < width_; ++j) tabref(m_, j) -= cb * tabref(i, j);
    }
  }

  T objective_value() const { return -cost_rhs(); }

 private:
  T& tabref(std::size_t i, std::size_t j) { return tab_[i * width_ + j]; }
  const T& tabref(std::size_t i, std::size_t j) const { return tab_[i * width_ + j]; }
  T& at(std::size_t i, std::size_t j) { return tab_[i * width_ + j]; }
  const T& at(std::size_t i, std::size_t j) const { return tab_[i * width_ + j]; }
  T& rhs(std::size_t i) { return tab_[i * width_ + width_ - 1]; }
  const T& rhs(std::size_t i) const { return tab_[i * width_ + width_ - 1]; }
  T& cost(std::size_t j) { return tab_[m_ * width_ + j]; }
  const T& cost(std::size_t j) const { return tab_[m_ * width_ + j]; }
  T& cost_rhs() { return tab_[m_ * width_ + width_ - 1]; }
  const T& cost_rhs() const { return tab_[m_ * width_ + width_ - 1]; }

  std::size_t m_, n_, width_;
  std::vector<T> tab_;
  std::vector<bool> flip_;
  std::vector<std::size_t> basis_;
};

template <class T>
T lp_feasibility_threshold() {
  if constexpr (scalar_traits<T>::is_exact)
    return T(0);
  else
    return T(1e-9);
}

}  // namespace detail

// Feasibility of {x >= 0 : A x = b} by phase-1 simplex. Returns a point when
// feasible and a Farkas certificate (y^T A <= 0, y^T b > 0) when not.
template <class T>
LpOutcome<T> lp_feasible(const DenseLinearSystem<T>& sys) {
  detail::SimplexTableau<T> tab(sys);
  try {
    tab.optimize(sys.cols + sys.rows);
  } catch (const typename detail::SimplexTableau<T>::UnboundedSignal&) {
    throw NumericFailure("phase-1 objective unbounded; system is malformed");
  }
  LpOutcome<T> out;
  out.phase1_value = tab.phase1_value();
  if (out.phase1_value <= detail::lp_feasibility_threshold<T>()) {
    out.feasible = true;
    out.x = tab.extract_x();
  } else {
    out.feasible = false;
    out.farkas = tab.farkas();
  }
  return out;
}

// min c^T x over {x >= 0 : A x = b}.
template <class T>
LpSolution<T> lp_minimize(const DenseLinearSystem<T>& sys, const std::vector<T>& c) {
  if (c.size() != sys.cols) throw DimMismatch("objective length != variable count");
  detail::SimplexTableau<T> tab(sys);
  LpSolution<T> out;
  try {
    tab.optimize(sys.cols + sys.rows);
    if (tab.phase1_value() > detail::lp_feasibility_threshold<T>()) {
      out.status = LpStatus::Infeasible;
      out.farkas = tab.farkas();
      return out;
    }
    tab.load_costs(c);
    tab.optimize(sys.cols);  // artificials excluded from entering
    out.status = LpStatus::Optimal;
    out.x = tab.extract_x();
    out.value = tab.objective_value();
  } catch (const typename detail::SimplexTableau<T>::UnboundedSignal&) {
    out.status = LpStatus::Unbounded;
  }
  return out;
}

}  // namespace hetcompat
