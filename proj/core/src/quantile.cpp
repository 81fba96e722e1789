#include "hetcompat/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "hetcompat/integrate.hpp"

namespace hetcompat {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

// Acklam's rational approximation to the normal inverse CDF (relative error
// below 1.15e-9), for u in (0, 1/2].
double acklam_lower_half(double u) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (u < p_low) {
    double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = u - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("normal_quantile needs u in (0,1)");
  if (u == 0.5) return 0.0;
  // reflect the upper half; 1-u is exact for u >= 1/2
  if (u > 0.5) return -normal_quantile(1.0 - u);
  double x = acklam_lower_half(u);
  // one Halley step on Phi(x) - u = 0
  double e = normal_cdf(x) - u;
  double w = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= w / (1.0 + 0.5 * x * w);
  return x;
}

QuantileFunction QuantileFunction::standard_normal() {
  QuantileFunction q;
  q.kind_ = Kind::StandardNormal;
  q.label_ = "standard-normal";
  q.check_monotone();
  return q;
}

QuantileFunction QuantileFunction::log_normal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("lognormal needs sigma > 0");
  QuantileFunction q;
  q.kind_ = Kind::LogNormal;
  q.mu_ = mu;
  q.sigma_ = sigma;
  q.label_ = "lognormal(" + std::to_string(mu) + "," + std::to_string(sigma) + ")";
  q.check_monotone();
  return q;
}

QuantileFunction QuantileFunction::chi_square_1() {
  QuantileFunction q;
  q.kind_ = Kind::ChiSquare1;
  q.label_ = "chi-square-1";
  q.check_monotone();
  return q;
}

QuantileFunction QuantileFunction::tabulated(std::vector<double> values,
                                             std::vector<double> weights) {
  if (values.size() != weights.size() || values.empty())
    throw DomainError("tabulated quantile needs matching nonempty values/weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("negative weight in tabulated quantile");
    total += w;
  }
  if (!(std::abs(total - 1.0) <= 1e-9)) throw DomainError("tabulated weights must sum to 1");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  QuantileFunction q;
  q.kind_ = Kind::Tabulated;
  q.label_ = "tabulated(" + std::to_string(values.size()) + " steps)";
  for (std::size_t idx : order) {
    if (weights[idx] <= 0.0) continue;
    if (!q.values_.empty() && values[idx] == q.values_.back()) {
      q.cum_.back() += weights[idx] / total;
    } else {
      q.values_.push_back(values[idx]);
      q.cum_.push_back((q.cum_.empty() ? 0.0 : q.cum_.back()) + weights[idx] / total);
    }
  }
  if (q.values_.empty()) throw DomainError("tabulated quantile has no mass");
  q.cum_.back() = 1.0;
  return q;
}

QuantileFunction QuantileFunction::numeric_cdf(std::function<double(double)> cdf, double lo,
                                               double hi, std::string label) {
  if (!(lo < hi)) throw DomainError("numeric cdf needs lo < hi");
  QuantileFunction q;
  q.kind_ = Kind::NumericCdf;
  q.cdf_ = std::move(cdf);
  q.lo_ = lo;
  q.hi_ = hi;
  q.label_ = std::move(label);
  return q;
}

void QuantileFunction::check_monotone() const {
  // nondecreasing on a 10^3-point grid with 1e-12 slack
  constexpr int kGrid = 1000;
  double prev = -std::numeric_limits<double>::infinity();
  for (int k = 1; k < kGrid; ++k) {
    double v = (*this)(static_cast<double>(k) / kGrid);
    if (v < prev - 1e-12) throw DomainError("quantile function is not nondecreasing");
    prev = v;
  }
}

double QuantileFunction::operator()(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile eval needs u in (0,1)");
  switch (kind_) {
    case Kind::StandardNormal:
      return normal_quantile(u);
    case Kind::LogNormal:
      return std::exp(mu_ + sigma_ * normal_quantile(u));
    case Kind::ChiSquare1: {
      double s = normal_quantile(0.5 * (1.0 + u));
      return s * s;
    }
    case Kind::Tabulated: {
      auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
      std::size_t idx = static_cast<std::size_t>(it - cum_.begin());
      if (idx >= values_.size()) idx = values_.size() - 1;
      return values_[idx];
    }
    case Kind::NumericCdf: {
      double lo = lo_, hi = hi_;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (cdf_(mid) >= u)
          hi = mid;
        else
          lo = mid;
      }
      return hi;
    }
  }
  return 0.0;
}

double QuantileFunction::cdf(double x) const {
  switch (kind_) {
    case Kind::StandardNormal:
      return normal_cdf(x);
    case Kind::LogNormal:
      return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - mu_) / sigma_);
    case Kind::ChiSquare1:
      return x <= 0.0 ? 0.0 : 2.0 * normal_cdf(std::sqrt(x)) - 1.0;
    case Kind::Tabulated: {
      double acc = 0.0;
      for (std::size_t k = 0; k < values_.size(); ++k) {
        if (values_[k] > x) break;
        acc = cum_[k];
      }
      return acc;
    }
    case Kind::NumericCdf:
      return cdf_(std::clamp(x, lo_, hi_));
  }
  return 0.0;
}

double QuantileFunction::partial_integral(double a, double b) const {
  a = std::clamp(a, 0.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  if (!(b > a)) return 0.0;
  auto q_at = [](double u) { return normal_quantile(std::clamp(u, 1e-300, 1.0 - 1e-16)); };
  switch (kind_) {
    case Kind::StandardNormal: {
      double qa = a <= 0.0 ? -std::numeric_limits<double>::infinity() : q_at(a);
      double qb = b >= 1.0 ? std::numeric_limits<double>::infinity() : q_at(b);
      double pa = std::isinf(qa) ? 0.0 : normal_pdf(qa);
      double pb = std::isinf(qb) ? 0.0 : normal_pdf(qb);
      return pa - pb;
    }
    case Kind::LogNormal: {
      double qa = a <= 0.0 ? -std::numeric_limits<double>::infinity() : q_at(a);
      double qb = b >= 1.0 ? std::numeric_limits<double>::infinity() : q_at(b);
      double ca = std::isinf(qa) ? 0.0 : normal_cdf(qa - sigma_);
      double cb = std::isinf(qb) ? 1.0 : normal_cdf(qb - sigma_);
      return std::exp(mu_ + 0.5 * sigma_ * sigma_) * (cb - ca);
    }
    case Kind::ChiSquare1: {
      auto indef = [&](double u) {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 0.5;
        double s = q_at(0.5 * (1.0 + u));
        return normal_cdf(s) - s * normal_pdf(s);
      };
      return 2.0 * (indef(b) - indef(a));
    }
    case Kind::Tabulated: {
      double acc = 0.0;
      double prev = 0.0;
      for (std::size_t k = 0; k < values_.size(); ++k) {
        double seg = std::min(b, cum_[k]) - std::max(a, prev);
        if (seg > 0.0) acc += seg * values_[k];
        prev = cum_[k];
        if (prev >= b) break;
      }
      return acc;
    }
    case Kind::NumericCdf: {
      // 31-point Gauss-Legendre on [a,b] split into 8 panels
      static const int kPanels = 8;
      double acc = 0.0;
      for (int p = 0; p < kPanels; ++p) {
        double x0 = a + (b - a) * p / kPanels;
        double x1 = a + (b - a) * (p + 1) / kPanels;
        acc += gauss_legendre_31([&](double u) { return (*this)(u); }, x0, x1);
      }
      return acc;
    }
  }
  return 0.0;
}

double QuantileFunction::support_lo() const {
  switch (kind_) {
    case Kind::Tabulated:
      return values_.front();
    case Kind::NumericCdf:
      return lo_;
    default:
      return (*this)(1e-16);
  }
}

double QuantileFunction::support_hi() const {
  switch (kind_) {
    case Kind::Tabulated:
      return values_.back();
    case Kind::NumericCdf:
      return hi_;
    default:
      return (*this)(1.0 - 1e-16);
  }
}

}  // namespace hetcompat
