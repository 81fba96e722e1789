#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hetcompat/errors.hpp"
#include "hetcompat/rational.hpp"

namespace hetcompat {

// Finite sample space: an ordered list of unique atom identifiers. Spaces are
// immutable and shared by reference between measures.
class FiniteSpace {
 public:
  explicit FiniteSpace(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw InvalidMeasure("a space needs at least one atom");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (!index_.emplace(atoms_[i], i).second)
        throw InvalidMeasure("duplicate atom '" + atoms_[i] + "'");
    }
  }

  std::size_t size() const { return atoms_.size(); }
  const std::vector<std::string>& atoms() const { return atoms_; }
  const std::string& atom(std::size_t i) const { return atoms_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> atoms_;
  std::unordered_map<std::string, std::size_t> index_;
};

using SpacePtr = std::shared_ptr<const FiniteSpace>;

inline SpacePtr make_space(std::vector<std::string> atoms) {
  return std::make_shared<const FiniteSpace>(std::move(atoms));
}

// Convenience: atoms named "w0", "w1", ...
inline SpacePtr make_space(std::size_t n, const std::string& prefix = "w") {
  std::vector<std::string> atoms;
  atoms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) atoms.push_back(prefix + std::to_string(i));
  return make_space(std::move(atoms));
}

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->atoms() == b->atoms();
}

namespace detail {
inline constexpr double kWeightSumTol = 1e-12;
}

// Probability mass on a FiniteSpace. Weights are validated at construction:
// nonnegative, summing to one (exactly in rational mode, within 1e-12 in
// float mode, after which float weights are renormalized).
template <class T>
class FiniteMeasure {
 public:
  FiniteMeasure(SpacePtr space, std::vector<T> weights)
      : space_(std::move(space)), w_(std::move(weights)) {
    if (!space_) throw InvalidMeasure("null space");
    if (w_.size() != space_->size())
      throw InvalidMeasure("weight count does not match space size");
    T sum(0);
    for (const T& x : w_) {
      if (x < T(0)) throw InvalidMeasure("negative weight");
      sum += x;
    }
    if constexpr (scalar_traits<T>::is_exact) {
      if (sum != T(1)) throw NotNormalized("rational weights must sum to exactly 1");
    } else {
      if (std::abs(to_double(sum) - 1.0) > detail::kWeightSumTol)
        throw NotNormalized("weights sum to " + std::to_string(to_double(sum)));
      for (T& x : w_) x /= sum;
    }
  }

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return w_.size(); }
  const T& operator[](std::size_t i) const { return w_[i]; }
  const std::vector<T>& weights() const { return w_; }

  // atoms carrying positive mass
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] > T(0)) s.push_back(i);
    return s;
  }

  bool operator==(const FiniteMeasure& o) const {
    return same_space(space_, o.space_) && w_ == o.w_;
  }

 private:
  SpacePtr space_;
  std::vector<T> w_;
};

template <class T>
FiniteMeasure<T> build_measure(SpacePtr space, std::vector<T> weights) {
  return FiniteMeasure<T>(std::move(space), std::move(weights));
}

// n measures sharing one FiniteSpace.
template <class T>
class MeasureTuple {
 public:
  explicit MeasureTuple(std::vector<FiniteMeasure<T>> measures) : ms_(std::move(measures)) {
    if (ms_.empty()) throw ArityMismatch("a measure tuple needs n >= 1");
    for (const auto& m : ms_)
      if (!same_space(m.space(), ms_.front().space()))
        throw SpaceMismatch("tuple members live on different spaces");
  }

  std::size_t arity() const { return ms_.size(); }
  const SpacePtr& space() const { return ms_.front().space(); }
  const FiniteMeasure<T>& operator[](std::size_t i) const { return ms_[i]; }
  const std::vector<FiniteMeasure<T>>& measures() const { return ms_; }

 private:
  std::vector<FiniteMeasure<T>> ms_;
};

// Equal-weight mixture (1/n) * sum Q_i; it dominates every tuple member.
template <class T>
FiniteMeasure<T> average_reference(const MeasureTuple<T>& tuple) {
  const std::size_t n = tuple.arity();
  const std::size_t sz = tuple.space()->size();
  std::vector<T> w(sz, T(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < sz; ++a) w[a] += tuple[i][a];
  T inv_n = T(1) / T(static_cast<int>(n));
  for (auto& x : w) x *= inv_n;
  return FiniteMeasure<T>(tuple.space(), std::move(w));
}

template <class T>
bool dominates(const FiniteMeasure<T>& reference, const MeasureTuple<T>& tuple) {
  if (!same_space(reference.space(), tuple.space()))
    throw SpaceMismatch("reference lives on a different space than the tuple");
  for (std::size_t a = 0; a < reference.size(); ++a) {
    if (reference[a] > T(0)) continue;
    for (std::size_t i = 0; i < tuple.arity(); ++i)
      if (tuple[i][a] > T(0)) return false;
  }
  return true;
}

template <class T>
bool dominates(const FiniteMeasure<T>& reference, const FiniteMeasure<T>& m) {
  return dominates(reference, MeasureTuple<T>({m}));
}

// Per-atom Radon-Nikodym derivative vector (dQ_1/dQ, ..., dQ_n/dQ). Rows for
// atoms outside the reference support are zero; they carry no mass and never
// enter an expectation.
template <class T>
struct DensityVector {
  SpacePtr space;
  std::vector<std::vector<T>> rows;  // one row per atom, length n
};

// Finite set of points in R^n with probability weights: the law of the
// derivative vector under the reference measure.
template <class T>
struct WeightedCloud {
  std::size_t dim = 0;
  std::vector<std::vector<T>> points;
  std::vector<T> weights;

  std::size_t size() const { return points.size(); }

  std::vector<T> barycenter() const {
    std::vector<T> b(dim, T(0));
    for (std::size_t k = 0; k < points.size(); ++k)
      for (std::size_t d = 0; d < dim; ++d) b[d] += weights[k] * points[k][d];
    return b;
  }
};

namespace detail {

template <class T>
bool close_points(const std::vector<T>& a, const std::vector<T>& b) {
  if constexpr (scalar_traits<T>::is_exact) {
    return a == b;
  } else {
    for (std::size_t d = 0; d < a.size(); ++d)
      if (std::abs(to_double(a[d]) - to_double(b[d])) > 1e-12) return false;
    return true;
  }
}

}  // namespace detail

// Sorts points lexicographically and merges equal ones (exact equality in
// rational mode, 1e-12 per coordinate in float mode). Sorting makes clouds,
// and everything downstream of them, independent of atom labeling.
template <class T>
WeightedCloud<T> merge_cloud(WeightedCloud<T> cloud) {
  std::vector<std::size_t> order(cloud.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return cloud.points[i] < cloud.points[j];
  });
  WeightedCloud<T> out;
  out.dim = cloud.dim;
  for (std::size_t idx : order) {
    if (!out.points.empty() && detail::close_points(out.points.back(), cloud.points[idx])) {
      out.weights.back() += cloud.weights[idx];
    } else {
      out.points.push_back(cloud.points[idx]);
      out.weights.push_back(cloud.weights[idx]);
    }
  }
  return out;
}

// Derivative vectors of the tuple w.r.t. `reference`, plus their law under the
// reference as a WeightedCloud (zero-mass atoms dropped, equal points merged).
template <class T>
std::pair<DensityVector<T>, WeightedCloud<T>> density_profile(const MeasureTuple<T>& tuple,
                                                              const FiniteMeasure<T>& reference) {
  if (!dominates(reference, tuple)) throw NotDominated("reference does not dominate the tuple");
  const std::size_t n = tuple.arity();
  const std::size_t sz = tuple.space()->size();
  DensityVector<T> dv;
  dv.space = tuple.space();
  dv.rows.assign(sz, std::vector<T>(n, T(0)));
  WeightedCloud<T> cloud;
  cloud.dim = n;
  for (std::size_t a = 0; a < sz; ++a) {
    if (!(reference[a] > T(0))) continue;
    for (std::size_t i = 0; i < n; ++i) dv.rows[a][i] = tuple[i][a] / reference[a];
    cloud.points.push_back(dv.rows[a]);
    cloud.weights.push_back(reference[a]);
  }
  return {std::move(dv), merge_cloud(std::move(cloud))};
}

template <class T>
std::pair<DensityVector<T>, WeightedCloud<T>> density_profile(const MeasureTuple<T>& tuple) {
  return density_profile(tuple, average_reference(tuple));
}

// Conversions between arithmetic modes.
inline FiniteMeasure<double> to_double_measure(const FiniteMeasure<Rat>& m) {
  std::vector<double> w(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) w[i] = to_double(m[i]);
  return FiniteMeasure<double>(m.space(), std::move(w));
}

inline MeasureTuple<double> to_double_tuple(const MeasureTuple<Rat>& t) {
  std::vector<FiniteMeasure<double>> ms;
  ms.reserve(t.arity());
  for (std::size_t i = 0; i < t.arity(); ++i) ms.push_back(to_double_measure(t[i]));
  return MeasureTuple<double>(std::move(ms));
}

// Float measures snapped to rationals with bounded denominator; returns the
// snapped tuple and the largest per-weight snap distance.
inline std::pair<MeasureTuple<Rat>, double> snap_tuple(const MeasureTuple<double>& t,
                                                       std::int64_t max_den = 1000000) {
  std::vector<FiniteMeasure<Rat>> ms;
  double dist = 0.0;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    std::vector<Rat> w(t[i].size());
    Rat sum(0);
    for (std::size_t a = 0; a < t[i].size(); ++a) {
      w[a] = snap_to_rational(t[i][a], max_den);
      if (w[a] < 0) w[a] = 0;
      dist = std::max(dist, std::abs(to_double(w[a]) - t[i][a]));
      sum += w[a];
    }
    if (sum == 0) throw ModeError("cannot snap a zero measure");
    // renormalize exactly so the snapped weights form a probability measure
    for (auto& x : w) x /= sum;
    ms.emplace_back(t[i].space(), std::move(w));
  }
  return {MeasureTuple<Rat>(std::move(ms)), dist};
}

}  // namespace hetcompat
