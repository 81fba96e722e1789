#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "hetcompat/errors.hpp"
#include "hetcompat/lp.hpp"
#include "hetcompat/measure.hpp"

namespace hetcompat {

// Joint matrix witnessing convex order: row marginals are the A-weights,
// column marginals the B-weights, and each row's conditional barycenter over
// the B-points equals its own A-point.
template <class T>
struct MartingaleCoupling {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> pi;  // row-major

  const T& at(std::size_t i, std::size_t j) const { return pi[i * cols + j]; }
};

template <class T>
struct AffinePiece {
  std::vector<T> slope;
  T offset;

  T eval(const std::vector<T>& x) const {
    T v = offset;
    for (std::size_t d = 0; d < slope.size(); ++d) v += slope[d] * x[d];
    return v;
  }
};

// A convex function f(x) = max_k (offset_k + <slope_k, x>) together with the
// expectation gap E_A[f] - E_B[f] > 0 it certifies.
template <class T>
struct ConvexViolation {
  std::vector<AffinePiece<T>> pieces;
  T expectation_a = T(0);
  T expectation_b = T(0);

  T eval(const std::vector<T>& x) const {
    T best = pieces.front().eval(x);
    for (std::size_t k = 1; k < pieces.size(); ++k) {
      T v = pieces[k].eval(x);
      if (v > best) best = v;
    }
    return best;
  }
  T gap() const { return expectation_a - expectation_b; }
};

template <class T>
struct OrderVerdict {
  bool holds = false;
  std::optional<MartingaleCoupling<T>> witness;
  std::optional<ConvexViolation<T>> violation;
  bool escalated = false;  // float run that was re-decided in rational mode
};

namespace detail {

// Feasibility system for a martingale coupling A -> B: row sums, column sums,
// and per-row barycenter equations.
template <class T>
DenseLinearSystem<T> coupling_system(const WeightedCloud<T>& a, const WeightedCloud<T>& b) {
  const std::size_t r = a.size(), c = b.size(), n = a.dim;
  DenseLinearSystem<T> sys(r + c + r * n, r * c);
  auto var = [c](std::size_t i, std::size_t j) { return i * c + j; };
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) sys.at(i, var(i, j)) = T(1);
    sys.b[i] = a.weights[i];
  }
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t i = 0; i < r; ++i) sys.at(r + j, var(i, j)) = T(1);
    sys.b[r + j] = b.weights[j];
  }
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t d = 0; d < n; ++d) {
      std::size_t row = r + c + i * n + d;
      for (std::size_t j = 0; j < c; ++j) sys.at(row, var(i, j)) = b.points[j][d];
      sys.b[row] = a.weights[i] * a.points[i][d];
    }
  }
  return sys;
}

// Builds the separating convex function from the Farkas multipliers: one
// affine piece per A-point, max_i (u_i + <w_i, x>).
template <class T>
ConvexViolation<T> violation_from_farkas(const WeightedCloud<T>& a, const WeightedCloud<T>& b,
                                         const std::vector<T>& y) {
  const std::size_t r = a.size(), c = b.size(), n = a.dim;
  ConvexViolation<T> v;
  v.pieces.reserve(r);
  for (std::size_t i = 0; i < r; ++i) {
    AffinePiece<T> piece;
    piece.offset = y[i];
    piece.slope.resize(n);
    for (std::size_t d = 0; d < n; ++d) piece.slope[d] = y[r + c + i * n + d];
    v.pieces.push_back(std::move(piece));
  }
  for (std::size_t i = 0; i < r; ++i) v.expectation_a += a.weights[i] * v.eval(a.points[i]);
  for (std::size_t j = 0; j < c; ++j) v.expectation_b += b.weights[j] * v.eval(b.points[j]);
  return v;
}

template <class T>
OrderVerdict<T> convex_order_lp(const WeightedCloud<T>& a, const WeightedCloud<T>& b) {
  auto sys = coupling_system(a, b);
  auto lp = lp_feasible(sys);
  OrderVerdict<T> verdict;
  verdict.holds = lp.feasible;
  if (lp.feasible) {
    MartingaleCoupling<T> w;
    w.rows = a.size();
    w.cols = b.size();
    w.pi = std::move(lp.x);
    verdict.witness = std::move(w);
  } else {
    verdict.violation = violation_from_farkas(a, b, lp.farkas);
  }
  return verdict;
}

inline WeightedCloud<Rat> snap_cloud(const WeightedCloud<double>& c, std::int64_t max_den) {
  WeightedCloud<Rat> out;
  out.dim = c.dim;
  out.points.resize(c.size());
  out.weights.resize(c.size());
  Rat total(0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    out.points[k].resize(c.dim);
    for (std::size_t d = 0; d < c.dim; ++d)
      out.points[k][d] = snap_to_rational(c.points[k][d], max_den);
    Rat w = snap_to_rational(c.weights[k], max_den);
    if (w < 0) w = 0;
    out.weights[k] = w;
    total += w;
  }
  if (total == 0) throw ModeError("cannot snap a zero-weight cloud");
  for (auto& w : out.weights) w /= total;
  return out;
}

inline MartingaleCoupling<double> coupling_to_double(const MartingaleCoupling<Rat>& c) {
  MartingaleCoupling<double> out;
  out.rows = c.rows;
  out.cols = c.cols;
  out.pi.resize(c.pi.size());
  for (std::size_t k = 0; k < c.pi.size(); ++k) out.pi[k] = to_double(c.pi[k]);
  return out;
}

inline ConvexViolation<double> violation_to_double(const ConvexViolation<Rat>& v) {
  ConvexViolation<double> out;
  out.expectation_a = to_double(v.expectation_a);
  out.expectation_b = to_double(v.expectation_b);
  for (const auto& p : v.pieces) {
    AffinePiece<double> q;
    q.offset = to_double(p.offset);
    for (const auto& s : p.slope) q.slope.push_back(to_double(s));
    out.pieces.push_back(std::move(q));
  }
  return out;
}

}  // namespace detail

// Decides X|A prec_cx Y|B by LP feasibility of the martingale-coupling
// constraints (the Strassen reduction). Float runs whose phase-1 value lands
// inside the escalation band are re-decided exactly on snapped inputs.
template <class T>
OrderVerdict<T> convex_order(const WeightedCloud<T>& a, const WeightedCloud<T>& b);

template <>
inline OrderVerdict<Rat> convex_order<Rat>(const WeightedCloud<Rat>& a,
                                           const WeightedCloud<Rat>& b) {
  if (a.dim != b.dim) throw DimMismatch("clouds have different dimensions");
  return detail::convex_order_lp(a, b);
}

template <>
inline OrderVerdict<double> convex_order<double>(const WeightedCloud<double>& a,
                                                 const WeightedCloud<double>& b) {
  if (a.dim != b.dim) throw DimMismatch("clouds have different dimensions");
  auto sys = detail::coupling_system(a, b);
  auto lp = lp_feasible(sys);
  constexpr double kEscalationBand = 1e-7;
  if (!(lp.phase1_value <= 1e-9) && lp.phase1_value < kEscalationBand) {
    // boundary instance: decide exactly on snapped inputs
    auto exact =
        detail::convex_order_lp(detail::snap_cloud(a, 1000000), detail::snap_cloud(b, 1000000));
    OrderVerdict<double> verdict;
    verdict.holds = exact.holds;
    verdict.escalated = true;
    if (exact.witness) verdict.witness = detail::coupling_to_double(*exact.witness);
    if (exact.violation) verdict.violation = detail::violation_to_double(*exact.violation);
    return verdict;
  }
  OrderVerdict<double> verdict;
  verdict.holds = lp.feasible;
  if (lp.feasible) {
    MartingaleCoupling<double> w;
    w.rows = a.size();
    w.cols = b.size();
    w.pi = std::move(lp.x);
    verdict.witness = std::move(w);
  } else {
    verdict.violation = detail::violation_from_farkas(a, b, lp.farkas);
  }
  return verdict;
}

// Heterogeneity order between measure tuples: builds both derivative clouds
// under equal-weight average references and delegates to convex_order. The
// tuples may live on different spaces; only the arity must match.
template <class T>
OrderVerdict<T> het_order(const MeasureTuple<T>& p_tuple, const MeasureTuple<T>& q_tuple) {
  if (p_tuple.arity() != q_tuple.arity())
    throw ArityMismatch("tuples have different arity");
  auto p_cloud = density_profile(p_tuple).second;
  auto q_cloud = density_profile(q_tuple).second;
  return convex_order(p_cloud, q_cloud);
}

}  // namespace hetcompat
