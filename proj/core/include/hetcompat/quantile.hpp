#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hetcompat/errors.hpp"

namespace hetcompat {

double normal_cdf(double x);
double normal_pdf(double x);

// Standard normal inverse CDF, absolute error <= 1e-10 (rational initial
// approximation polished by one Halley step against the erfc-based CDF).
// Exactly antisymmetric: q(u) == -q(1-u).
double normal_quantile(double u);

// Monotone representation of a 1-D distribution: closed-form tags, a
// tabulated step function, or a numeric CDF inverted by bisection. The
// generalized-inverse convention is F^{-1}(t) = inf{x : F(x) >= t}.
class QuantileFunction {
 public:
  enum class Kind { StandardNormal, LogNormal, ChiSquare1, Tabulated, NumericCdf };

  static QuantileFunction standard_normal();
  static QuantileFunction log_normal(double mu, double sigma);
  static QuantileFunction chi_square_1();
  static QuantileFunction tabulated(std::vector<double> values, std::vector<double> weights);
  // cdf must be nondecreasing on [lo, hi] with cdf(lo) ~ 0, cdf(hi) ~ 1
  static QuantileFunction numeric_cdf(std::function<double(double)> cdf, double lo, double hi,
                                      std::string label);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }

  double operator()(double u) const;  // u in (0,1)
  bool has_cdf() const { return kind_ != Kind::Tabulated || true; }
  double cdf(double x) const;

  // Exact integral of the quantile over [a, b] subset [0, 1] for the closed
  // forms and tabulated steps; Gauss-Legendre fallback for numeric CDFs.
  double partial_integral(double a, double b) const;
  double mean() const { return partial_integral(0.0, 1.0); }

  bool is_tabulated() const { return kind_ == Kind::Tabulated; }
  const std::vector<double>& step_values() const { return values_; }
  const std::vector<double>& step_cum() const { return cum_; }

  // essential range, used to bracket numeric inversions
  double support_lo() const;
  double support_hi() const;

 private:
  QuantileFunction() = default;
  void check_monotone() const;

  Kind kind_ = Kind::StandardNormal;
  std::string label_;
  double mu_ = 0.0, sigma_ = 1.0;             // LogNormal
  std::vector<double> values_, cum_;          // Tabulated
  std::function<double(double)> cdf_;         // NumericCdf
  double lo_ = 0.0, hi_ = 0.0;                // NumericCdf bracket
};

}  // namespace hetcompat
