#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace hetcompat {

// Gauss-Legendre nodes/weights on [-1,1], computed once by Newton iteration
// on the Legendre recurrence (accurate to ~1e-15, deterministic).
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_rule(int n) {
  static std::vector<std::pair<std::vector<double>, std::vector<double>>> cache(64);
  auto& slot = cache.at(static_cast<std::size_t>(n));
  if (slot.first.empty()) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        double dz = p0 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
    slot = {std::move(x), std::move(w)};
  }
  return slot;
}

template <class F>
double gauss_legendre(F&& f, double a, double b, int n) {
  const auto& [x, w] = gauss_legendre_rule(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += w[i] * f(mid + half * x[i]);
  return acc * half;
}

template <class F>
double gauss_legendre_15(F&& f, double a, double b) {
  return gauss_legendre(std::forward<F>(f), a, b, 15);
}

template <class F>
double gauss_legendre_31(F&& f, double a, double b) {
  return gauss_legendre(std::forward<F>(f), a, b, 31);
}

// Integrates f over (0,1) with geometric refinement toward both endpoints:
// dyadic shells from 2^-1 down to 2^-`depth` on each side, one panel each,
// plus per-shell Gauss-Legendre. Suited to integrands that blow up slowly
// (slower than any power) at 0 or 1, like products of normal/lognormal
// quantiles. Returns the GL-31 value; *instability is the |GL31-GL15| sum,
// and *tail_bound reports the last-shell magnitude on each side.
template <class F>
double integrate_unit_shells(F&& f, int depth, double* instability = nullptr,
                             double* tail_bound = nullptr) {
  double acc = 0.0, err = 0.0;
  double last_lo = 0.0, last_hi = 0.0;
  auto panel = [&](double a, double b) {
    double v31 = gauss_legendre_31(f, a, b);
    double v15 = gauss_legendre_15(f, a, b);
    acc += v31;
    err += std::abs(v31 - v15);
    return std::abs(v31);
  };
  panel(0.25, 0.75);
  for (int k = 2; k <= depth; ++k) {
    double w = std::ldexp(1.0, -k - 1);  // shell [2^-k-1, 2^-k] and its mirror
    last_lo = panel(w, 2.0 * w);
    last_hi = panel(1.0 - 2.0 * w, 1.0 - w);
  }
  if (instability) *instability = err;
  if (tail_bound) *tail_bound = last_lo + last_hi;
  return acc;
}

}  // namespace hetcompat
