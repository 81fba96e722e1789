#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hetcompat/compatibility.hpp"
#include "hetcompat/measure.hpp"
#include "hetcompat/quantile.hpp"

namespace hetcompat {

// Step quantile of the likelihood ratio dP/dQ under Q.
QuantileFunction quantile_of_density(const FiniteMeasure<double>& p,
                                     const FiniteMeasure<double>& q);

// integral over (0,1) of H^{-1}(t) * K^{-1}(t)  (antitone: K^{-1}(1-t)).
// Exact stepwise summation whenever a tabulated side is present; dyadic-shell
// Gauss-Legendre otherwise, with a depth-doubling instability check that
// raises Divergent.
double quantile_product_integral(const QuantileFunction& h, const QuantileFunction& k,
                                 bool antitone);

// max E^P[Y] over L_G(Q): the comonotone (Frechet-Hoeffding) bound
// integral of H^{-1}(u) G^{-1}(u) du.
double frechet_hoeffding(const QuantileFunction& h, const QuantileFunction& g);

struct NeymanPearson {
  double value;        // k(q) = integral_{1-q}^1 H^{-1}
  double u_threshold;  // optimal test is I{U >= 1-q}
};
NeymanPearson neyman_pearson(const QuantileFunction& h, double q);

// min E^P[u(Y)] over L_G(Q) for nondecreasing u, attained by the antitone
// coupling X_* = G^{-1}(1-U).
double robust_utility(const QuantileFunction& h, const QuantileFunction& g,
                      const std::function<double(double)>& u);

enum class Sense { Max, Min };

// Extreme of E^P[v(Y)] over L_G(Q) for measurable v: reduces to the
// (anti)comonotone integral against the law of v(Y). Tabulated G transforms
// exactly; closed forms go through a sorted fine-grid pushforward with a
// doubling stability check.
double transform_objective(const QuantileFunction& h, const QuantileFunction& g,
                           const std::function<double(double)>& v, Sense sense,
                           std::size_t grid = 1000000);

struct RobustVariance {
  double max_value;
  double min_value;
  double arg_x_max;    // minimizer of x -> max E[(Y-x)^2]
  double arg_x_min;    // minimizer of x -> min E[(Y-x)^2]
  double saddle_gap;   // (E[Y*] - arg_x_max)^2 at the solved saddle
};

// max/min of Var^P(Y) over L_G(Q). The max goes through the minimax identity
// max Var = min_x max E[(Y-x)^2] (the inner max is the comonotone integral,
// the outer min is ternary search on a convex function); the min uses a
// coarse x-grid plus local refinement, no convexity assumed.
RobustVariance robust_variance(const QuantileFunction& h, const QuantileFunction& g);

// Both stochastic-order extremes for mutually singular Q_i with disjoint
// supports: X^* = sum_i F_i^{-1}(U_i) 1_{Omega_i} and its antitone
// counterpart, realized as point maps on a refinement that splits atoms at
// the Frechet cell boundaries (ties in the likelihood ratio broken by atom
// order).
struct ComonotoneWitness {
  RefinedSpace refined;
  MeasureTuple<Rat> lifted_q;
  FiniteMeasure<Rat> lifted_p;
  PointMap upper;  // X^*
  PointMap lower;  // X_*
  std::string description;
};

ComonotoneWitness singular_extremes(const MeasureTuple<Rat>& q_tuple,
                                    const FiniteMeasure<Rat>& p,
                                    const MeasureTuple<Rat>& f_tuple,
                                    const std::vector<double>& target_values);

}  // namespace hetcompat
