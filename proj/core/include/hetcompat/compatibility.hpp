#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hetcompat/convex_order.hpp"
#include "hetcompat/errors.hpp"
#include "hetcompat/lp.hpp"
#include "hetcompat/measure.hpp"

namespace hetcompat {

// Total map from source atoms to target points.
struct PointMap {
  SpacePtr source;
  SpacePtr target;
  std::vector<std::size_t> to;  // one target index per source atom

  PointMap(SpacePtr src, SpacePtr tgt, std::vector<std::size_t> assignment)
      : source(std::move(src)), target(std::move(tgt)), to(std::move(assignment)) {
    if (!source || !target || to.size() != source->size())
      throw CodomainMismatch("point map must be total on the source space");
    for (std::size_t t : to)
      if (t >= target->size()) throw CodomainMismatch("target index out of range");
  }
};

// Row-stochastic transition matrix from source atoms to target points.
template <class T>
struct MarkovKernel {
  SpacePtr source;
  SpacePtr target;
  std::vector<T> k;  // row-major, source x target

  const T& at(std::size_t w, std::size_t x) const { return k[w * target->size() + x]; }
};

// Parent space split into equal-mass children: atom w gets split[w] children,
// each carrying 1/split[w] of every parent measure's mass at w. The finite
// stand-in for adjoining an independent uniform variable.
struct RefinedSpace {
  SpacePtr parent;
  std::vector<std::size_t> split;
  SpacePtr refined;
  std::vector<std::size_t> parent_of;    // refined atom -> parent atom
  std::vector<std::size_t> child_start;  // parent atom -> first refined index
};

template <class T>
FiniteMeasure<T> pushforward(const FiniteMeasure<T>& q, const PointMap& x) {
  if (!same_space(q.space(), x.source)) throw SpaceMismatch("map source != measure space");
  std::vector<T> w(x.target->size(), T(0));
  for (std::size_t a = 0; a < q.size(); ++a) w[x.to[a]] += q[a];
  return FiniteMeasure<T>(x.target, std::move(w));
}

template <class T>
MeasureTuple<T> pushforward(const MeasureTuple<T>& tuple, const PointMap& x) {
  std::vector<FiniteMeasure<T>> out;
  out.reserve(tuple.arity());
  for (std::size_t i = 0; i < tuple.arity(); ++i) out.push_back(pushforward(tuple[i], x));
  return MeasureTuple<T>(std::move(out));
}

namespace detail {

template <class T>
bool measures_equal(const FiniteMeasure<T>& a, const FiniteMeasure<T>& b) {
  if constexpr (scalar_traits<T>::is_exact) {
    return a.weights() == b.weights();
  } else {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(to_double(a[i]) - to_double(b[i])) > 1e-10) return false;
    return true;
  }
}

}  // namespace detail

// True iff the pushforward of every Q_i under X equals F_i (exactly in
// rational mode, within 1e-10 in float mode).
template <class T>
bool verify_map(const PointMap& x, const MeasureTuple<T>& q_tuple,
                const MeasureTuple<T>& f_tuple) {
  if (!same_space(x.target, f_tuple.space()))
    throw CodomainMismatch("targets live on a different space than the map codomain");
  if (q_tuple.arity() != f_tuple.arity()) throw ArityMismatch("tuple arity mismatch");
  if (!same_space(x.source, q_tuple.space()))
    throw SpaceMismatch("map source != tuple space");
  for (std::size_t i = 0; i < q_tuple.arity(); ++i)
    if (!detail::measures_equal(pushforward(q_tuple[i], x), f_tuple[i])) return false;
  return true;
}

// Residuals of the conditional-expectation identity
//   (dF_i/dF)(x) = E^Q[dQ_i/dQ | X = x],  Q = average reference, F = Q o X^-1,
// one residual per target point (sup over i). Zero residuals at every point
// (with domination intact) is equivalent to "X has distribution F_i under
// Q_i". When no targets are passed, the pushforwards themselves are used and
// all residuals vanish identically.
template <class T>
struct ConditionalCheck {
  bool dominated = true;  // F dominates every given F_i
  std::vector<T> residuals;
  T max_residual = T(0);
};

template <class T>
ConditionalCheck<T> conditional_identity_check(
    const PointMap& x, const MeasureTuple<T>& q_tuple,
    const std::optional<MeasureTuple<T>>& f_tuple = std::nullopt) {
  const MeasureTuple<T> targets = f_tuple ? *f_tuple : pushforward(q_tuple, x);
  if (!same_space(x.target, targets.space()))
    throw CodomainMismatch("targets live on a different space than the map codomain");
  if (targets.arity() != q_tuple.arity()) throw ArityMismatch("tuple arity mismatch");
  auto reference = average_reference(q_tuple);
  auto f_ref = pushforward(reference, x);
  const std::size_t n = q_tuple.arity();
  const std::size_t nt = x.target->size();

  ConditionalCheck<T> out;
  out.residuals.assign(nt, T(0));
  std::vector<std::vector<T>> q_push(n);
  for (std::size_t i = 0; i < n; ++i) q_push[i] = pushforward(q_tuple[i], x).weights();
  for (std::size_t t = 0; t < nt; ++t) {
    if (f_ref[t] > T(0)) {
      T res(0);
      for (std::size_t i = 0; i < n; ++i) {
        T diff = abs_value(T(targets[i][t] - q_push[i][t])) / f_ref[t];
        if (diff > res) res = diff;
      }
      out.residuals[t] = res;
    } else {
      for (std::size_t i = 0; i < n; ++i)
        if (targets[i][t] > T(0)) out.dominated = false;
    }
    if (out.residuals[t] > out.max_residual) out.max_residual = out.residuals[t];
  }
  return out;
}

// Kernel compatibility: a row-stochastic K with Q_i K = F_i for every i,
// found by LP feasibility, or nothing.
template <class T>
std::optional<MarkovKernel<T>> kernel_compat(const MeasureTuple<T>& q_tuple,
                                             const MeasureTuple<T>& f_tuple) {
  if (q_tuple.arity() != f_tuple.arity()) throw ArityMismatch("tuple arity mismatch");
  const std::size_t s = q_tuple.space()->size();
  const std::size_t t = f_tuple.space()->size();
  const std::size_t n = q_tuple.arity();
  DenseLinearSystem<T> sys(s + n * t, s * t);
  auto var = [t](std::size_t w, std::size_t x) { return w * t + x; };
  for (std::size_t w = 0; w < s; ++w) {
    for (std::size_t x = 0; x < t; ++x) sys.at(w, var(w, x)) = T(1);
    sys.b[w] = T(1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t x = 0; x < t; ++x) {
      std::size_t row = s + i * t + x;
      for (std::size_t w = 0; w < s; ++w) sys.at(row, var(w, x)) = q_tuple[i][w];
      sys.b[row] = f_tuple[i][x];
    }
  }
  auto lp = lp_feasible(sys);
  if (!lp.feasible) return std::nullopt;
  MarkovKernel<T> kernel;
  kernel.source = q_tuple.space();
  kernel.target = f_tuple.space();
  kernel.k = std::move(lp.x);
  return kernel;
}

// Cross-module oracle: kernel feasibility must agree with the heterogeneity
// order verdict on every instance. Returns true, or throws OracleViolation.
template <class T>
bool het_equiv_kernel_test(const MeasureTuple<T>& q_tuple, const MeasureTuple<T>& f_tuple) {
  bool kernel = kernel_compat(q_tuple, f_tuple).has_value();
  bool het = het_order(f_tuple, q_tuple).holds;
  if (kernel != het)
    throw OracleViolation(std::string("kernel_compat=") + (kernel ? "yes" : "no") +
                          " but het_order=" + (het ? "yes" : "no"));
  return true;
}

namespace detail {

inline SpacePtr refined_space_of(const FiniteSpace& parent, const std::vector<std::size_t>& split,
                                 std::vector<std::size_t>* parent_of,
                                 std::vector<std::size_t>* child_start) {
  std::vector<std::string> atoms;
  for (std::size_t a = 0; a < parent.size(); ++a) {
    child_start->push_back(atoms.size());
    if (split[a] == 1) {
      atoms.push_back(parent.atom(a));
      parent_of->push_back(a);
    } else {
      for (std::size_t k = 0; k < split[a]; ++k) {
        atoms.push_back(parent.atom(a) + "#" + std::to_string(k));
        parent_of->push_back(a);
      }
    }
  }
  return make_space(std::move(atoms));
}

}  // namespace detail

// Equal-mass atom splitting. Density profiles are unchanged pointwise; the
// derivative vector is constant across the children of one parent atom.
template <class T>
std::pair<RefinedSpace, MeasureTuple<T>> refine(const MeasureTuple<T>& tuple,
                                                const std::vector<std::size_t>& split) {
  if (split.size() != tuple.space()->size())
    throw InvalidRefinement("split vector length != space size");
  for (std::size_t m : split)
    if (m == 0) throw InvalidRefinement("split factor must be >= 1");
  RefinedSpace rs;
  rs.parent = tuple.space();
  rs.split = split;
  rs.refined = detail::refined_space_of(*tuple.space(), split, &rs.parent_of, &rs.child_start);
  std::vector<FiniteMeasure<T>> lifted;
  lifted.reserve(tuple.arity());
  for (std::size_t i = 0; i < tuple.arity(); ++i) {
    std::vector<T> w(rs.refined->size());
    for (std::size_t c = 0; c < w.size(); ++c) {
      std::size_t a = rs.parent_of[c];
      w[c] = tuple[i][a] / T(static_cast<int>(rs.split[a]));
    }
    lifted.emplace_back(rs.refined, std::move(w));
  }
  return {std::move(rs), MeasureTuple<T>(std::move(lifted))};
}

template <class T>
std::pair<RefinedSpace, MeasureTuple<T>> refine(const MeasureTuple<T>& tuple, std::size_t m) {
  return refine(tuple, std::vector<std::size_t>(tuple.space()->size(), m));
}

// Exhaustive search for an unrefined point map with the prescribed
// pushforwards; the brute-force oracle for small instances. Assignments are
// scanned in lexicographic order over (X(w_0), X(w_1), ...), so the first hit
// is deterministic.
template <class T>
std::optional<PointMap> point_compat_exhaustive(const MeasureTuple<T>& q_tuple,
                                                const MeasureTuple<T>& f_tuple,
                                                std::uint64_t cap = 10000000) {
  if (q_tuple.arity() != f_tuple.arity()) throw ArityMismatch("tuple arity mismatch");
  const std::size_t s = q_tuple.space()->size();
  const std::size_t t = f_tuple.space()->size();
  double combos = std::pow(static_cast<double>(t), static_cast<double>(s));
  if (combos > static_cast<double>(cap)) throw TooLarge("search space exceeds cap");
  std::vector<std::size_t> digits(s, 0);
  while (true) {
    PointMap candidate(q_tuple.space(), f_tuple.space(), digits);
    if (verify_map(candidate, q_tuple, f_tuple)) return candidate;
    // increment the rightmost digit first
    std::size_t pos = s;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < t) break;
      digits[pos] = 0;
      if (pos == 0) return std::nullopt;
    }
  }
}

// Successful outcome of construct_map: a refinement and a point map on it
// whose pushforwards are exactly the targets.
struct MapConstruction {
  RefinedSpace refined;
  MeasureTuple<Rat> lifted;
  PointMap map;
  std::uint64_t refinement_m = 1;  // lcm of the per-atom splits

  MapConstruction(RefinedSpace rs, MeasureTuple<Rat> lift, PointMap pm, std::uint64_t m)
      : refined(std::move(rs)), lifted(std::move(lift)), map(std::move(pm)), refinement_m(m) {}
};

using ConstructOutcome = std::variant<MapConstruction, ConvexViolation<Rat>>;

// Realizes a feasible kernel as a deterministic map on split atoms: atom w is
// split into the common denominator of its kernel row, and its children are
// assigned to targets in target order with multiplicities m_w * K(w, x).
// Requires rational inputs; per-atom splits are capped at 10^4.
inline ConstructOutcome construct_map(const MeasureTuple<Rat>& q_tuple,
                                      const MeasureTuple<Rat>& f_tuple) {
  auto het = het_order(f_tuple, q_tuple);
  if (!het.holds) return *het.violation;
  auto kernel = kernel_compat(q_tuple, f_tuple);
  if (!kernel) throw OracleViolation("heterogeneity order holds but the kernel LP is infeasible");
  const std::size_t s = q_tuple.space()->size();
  const std::size_t t = f_tuple.space()->size();
  std::vector<std::size_t> split(s, 1);
  std::uint64_t overall = 1;
  for (std::size_t w = 0; w < s; ++w) {
    BigInt m(1);
    for (std::size_t x = 0; x < t; ++x) m = lcm_bigint(m, denominator(kernel->at(w, x)));
    if (m > 10000) throw TooLarge("kernel denominators need more than 10^4 children per atom");
    split[w] = m.template convert_to<std::size_t>();
    overall = static_cast<std::uint64_t>(
        lcm_bigint(BigInt(overall), m).template convert_to<std::uint64_t>());
  }
  auto [rs, lifted] = refine(q_tuple, split);
  std::vector<std::size_t> assignment(rs.refined->size(), 0);
  for (std::size_t w = 0; w < s; ++w) {
    std::size_t child = rs.child_start[w];
    for (std::size_t x = 0; x < t; ++x) {
      Rat count = kernel->at(w, x) * Rat(static_cast<int>(split[w]));
      auto c = numerator(count).template convert_to<std::size_t>();
      for (std::size_t k = 0; k < c; ++k) assignment[child++] = x;
    }
  }
  PointMap map(rs.refined, f_tuple.space(), std::move(assignment));
  return MapConstruction(std::move(rs), std::move(lifted), std::move(map), overall);
}

// One step of the almost-compatibility sequence: the map on the m-refined
// space realizing the kernel rounded to resolution 1/m, with the per-target
// KL divergences of its pushforwards from the targets.
struct AlmostStep {
  std::size_t m;
  RefinedSpace refined;
  MeasureTuple<Rat> lifted;
  PointMap map;
  std::vector<double> kl;  // per i
  bool exact;              // pushforwards equal the targets exactly
};

namespace detail {

// Largest-remainder rounding of a kernel row to multiples of 1/m. Entries at
// zero stay zero, so absolute continuity of the rounded pushforwards w.r.t.
// the targets is preserved.
inline std::vector<std::size_t> round_row_to_resolution(const std::vector<Rat>& row,
                                                        std::size_t m) {
  const std::size_t t = row.size();
  std::vector<std::size_t> counts(t, 0);
  std::vector<Rat> frac(t, Rat(0));
  BigInt assigned(0);
  for (std::size_t x = 0; x < t; ++x) {
    Rat scaled = row[x] * Rat(static_cast<int>(m));
    BigInt fl = numerator(scaled) / denominator(scaled);  // floor (entries >= 0)
    counts[x] = fl.template convert_to<std::size_t>();
    frac[x] = scaled - Rat(fl);
    assigned += fl;
  }
  auto remainder = (BigInt(m) - assigned).template convert_to<std::size_t>();
  std::vector<std::size_t> order(t);
  for (std::size_t x = 0; x < t; ++x) order[x] = x;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t r = 0; r < remainder; ++r) counts[order[r]] += 1;
  return counts;
}

inline double kl_divergence_exactable(const FiniteMeasure<Rat>& p, const FiniteMeasure<Rat>& q) {
  if (p.weights() == q.weights()) return 0.0;
  double acc = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0) continue;
    if (q[x] == 0) return std::numeric_limits<double>::infinity();
    acc += to_double(p[x]) * std::log(to_double(p[x]) / to_double(q[x]));
  }
  return std::max(acc, 0.0);
}

}  // namespace detail

// For each split m, a map X_m on the m-refined space whose pushforwards
// F_{i,m} satisfy F_{i,m} << F_i, built by rounding the feasible kernel to
// resolution-1/m rows. KL(F_{i,m} || F_i) reaches exactly 0 once m is a
// multiple of every kernel-entry denominator.
inline std::vector<AlmostStep> almost_compat_sequence(const MeasureTuple<Rat>& q_tuple,
                                                      const MeasureTuple<Rat>& f_tuple,
                                                      const std::vector<std::size_t>& splits) {
  if (splits.empty()) throw InvalidRefinement("need at least one split");
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == 0) throw InvalidRefinement("split factor must be >= 1");
    if (i > 0 && splits[i] <= splits[i - 1])
      throw InvalidRefinement("splits must be strictly increasing");
  }
  auto het = het_order(f_tuple, q_tuple);
  if (!het.holds) throw IncompatibleError("targets are not dominated in heterogeneity order");
  auto kernel = kernel_compat(q_tuple, f_tuple);
  if (!kernel) throw OracleViolation("heterogeneity order holds but the kernel LP is infeasible");
  const std::size_t s = q_tuple.space()->size();
  const std::size_t t = f_tuple.space()->size();
  const std::size_t n = q_tuple.arity();

  std::vector<AlmostStep> steps;
  steps.reserve(splits.size());
  for (std::size_t m : splits) {
    auto [rs, lifted] = refine(q_tuple, m);
    std::vector<std::size_t> assignment(rs.refined->size(), 0);
    for (std::size_t w = 0; w < s; ++w) {
      std::vector<Rat> row(t);
      for (std::size_t x = 0; x < t; ++x) row[x] = kernel->at(w, x);
      auto counts = detail::round_row_to_resolution(row, m);
      std::size_t child = rs.child_start[w];
      for (std::size_t x = 0; x < t; ++x)
        for (std::size_t k = 0; k < counts[x]; ++k) assignment[child++] = x;
    }
    PointMap map(rs.refined, f_tuple.space(), std::move(assignment));
    auto push = pushforward(lifted, map);
    bool exact = true;
    std::vector<double> kl(n);
    for (std::size_t i = 0; i < n; ++i) {
      kl[i] = detail::kl_divergence_exactable(push[i], f_tuple[i]);
      if (kl[i] != 0.0) exact = false;
    }
    steps.push_back(AlmostStep{m, std::move(rs), std::move(lifted), std::move(map),
                               std::move(kl), exact});
  }
  return steps;
}

}  // namespace hetcompat
