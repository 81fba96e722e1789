#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hetcompat/errors.hpp"
#include "hetcompat/measure.hpp"

namespace hetcompat {

// Convex generator of an f-divergence, stored centered (f <- f - f(1)) so
// every divergence is nonnegative. The value at 0 and the slope at infinity
// are explicit so singular parts are priced correctly.
class FGenerator {
 public:
  enum class Kind { KL, TotalVariation, Hellinger, ChiSquare, Custom };

  static FGenerator kl() {
    return FGenerator(Kind::KL, "kl", [](double x) { return x <= 0.0 ? 0.0 : x * std::log(x); },
                      0.0, std::numeric_limits<double>::infinity());
  }
  static FGenerator total_variation() {
    return FGenerator(Kind::TotalVariation, "tv",
                      [](double x) { return std::max(x - 1.0, 0.0); }, 0.0, 1.0);
  }
  static FGenerator hellinger() {
    return FGenerator(Kind::Hellinger, "hellinger",
                      [](double x) {
                        double s = std::sqrt(std::max(x, 0.0)) - 1.0;
                        return s * s;
                      },
                      1.0, 1.0);
  }
  static FGenerator chi_square() {
    return FGenerator(Kind::ChiSquare, "chi2", [](double x) { return x * x - 1.0; }, -1.0,
                      std::numeric_limits<double>::infinity());
  }
  // eval convex on [0,inf) with finite eval(1); centered on construction
  static FGenerator custom(std::string name, std::function<double(double)> eval,
                           double value_at_zero, double slope_at_inf) {
    FGenerator g(Kind::Custom, std::move(name), std::move(eval), value_at_zero, slope_at_inf);
    g.spot_check_convexity();
    return g;
  }
  static FGenerator by_name(const std::string& name) {
    if (name == "kl") return kl();
    if (name == "tv") return total_variation();
    if (name == "hellinger") return hellinger();
    if (name == "chi2") return chi_square();
    throw SchemaError("unknown divergence generator '" + name + "'");
  }
  static std::vector<FGenerator> standard_family() {
    return {kl(), total_variation(), hellinger(), chi_square()};
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  // centered evaluation
  double operator()(double x) const { return x == 0.0 ? at_zero_ : eval_(x) - at_one_; }
  double value_at_zero() const { return at_zero_; }
  double slope_at_inf() const { return slope_inf_; }

 private:
  FGenerator(Kind kind, std::string name, std::function<double(double)> eval,
             double value_at_zero, double slope_at_inf)
      : kind_(kind), name_(std::move(name)), eval_(std::move(eval)), slope_inf_(slope_at_inf) {
    at_one_ = eval_(1.0);
    if (!std::isfinite(at_one_)) throw DomainError("generator must be finite at 1");
    at_zero_ = value_at_zero - at_one_;
  }

  void spot_check_convexity() const {
    // midpoint inequality on a grid, 1e-12 slack
    for (int i = 0; i < 64; ++i) {
      double a = 0.0625 * i;
      double b = a + 2.0;
      double mid = (*this)(0.5 * (a + b));
      double avg = 0.5 * ((*this)(a) + (*this)(b));
      if (mid > avg + 1e-12) throw DomainError("generator fails midpoint convexity check");
    }
  }

  Kind kind_;
  std::string name_;
  std::function<double(double)> eval_;
  double slope_inf_;
  double at_one_ = 0.0;
  double at_zero_ = 0.0;
};

// d_f(P1, P2) = sum_w P2(w) f(P1(w)/P2(w)), with 0*f(0/0) = 0 and P1-mass
// outside supp(P2) priced at f's slope at infinity.
template <class T>
double f_divergence(const FiniteMeasure<T>& p1, const FiniteMeasure<T>& p2,
                    const FGenerator& f) {
  if (!same_space(p1.space(), p2.space()))
    throw SpaceMismatch("divergence needs measures on one space");
  double acc = 0.0;
  double singular_mass = 0.0;
  for (std::size_t w = 0; w < p1.size(); ++w) {
    double a = to_double(p1[w]), b = to_double(p2[w]);
    if (b > 0.0)
      acc += b * f(a / b);
    else
      singular_mass += a;
  }
  if (singular_mass > 0.0) {
    if (std::isinf(f.slope_at_inf())) return std::numeric_limits<double>::infinity();
    acc += f.slope_at_inf() * singular_mass;
  }
  return acc;
}

// Necessary compatibility screen: d_f(F, G) <= d_f(P, Q) + 1e-10 for every
// generator in the family, with the absolute-continuity clauses checked
// first. A finite family can refute compatibility, never certify it.
template <class T>
bool divergence_necessary(const FiniteMeasure<T>& f, const FiniteMeasure<T>& g,
                          const FiniteMeasure<T>& p, const FiniteMeasure<T>& q,
                          const std::vector<FGenerator>& family) {
  if (!dominates(g, f) || !dominates(q, p)) return false;
  for (const auto& gen : family) {
    double lhs = f_divergence(f, g, gen);
    double rhs = f_divergence(p, q, gen);
    if (std::isinf(lhs) && std::isinf(rhs)) continue;
    if (!(lhs <= rhs + 1e-10)) return false;
  }
  return true;
}

inline FiniteMeasure<double> to_double_measure_generic(const FiniteMeasure<double>& m) {
  return m;
}
inline FiniteMeasure<double> to_double_measure_generic(const FiniteMeasure<Rat>& m) {
  return to_double_measure(m);
}

// Convexity of the compatible set: if F1 and F2 each pass the screen against
// (P, Q) with common G, every mixture on the lambda grid must pass too.
template <class T>
bool mixture_screen(const FiniteMeasure<T>& f1, const FiniteMeasure<T>& f2,
                    const FiniteMeasure<T>& g, const FiniteMeasure<T>& p,
                    const FiniteMeasure<T>& q, const std::vector<FGenerator>& family,
                    const std::vector<double>& lambdas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6,
                                                          0.7, 0.8, 0.9, 1.0}) {
  if (!same_space(f1.space(), f2.space()))
    throw SpaceMismatch("mixture needs measures on one space");
  auto fd = to_double_measure_generic(f1);
  auto fd2 = to_double_measure_generic(f2);
  auto gd = to_double_measure_generic(g);
  auto pd = to_double_measure_generic(p);
  auto qd = to_double_measure_generic(q);
  for (double lam : lambdas) {
    std::vector<double> w(fd.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = lam * fd[i] + (1.0 - lam) * fd2[i];
    FiniteMeasure<double> mix(fd.space(), std::move(w));
    if (!divergence_necessary(mix, gd, pd, qd, family)) return false;
  }
  return true;
}

}  // namespace hetcompat
