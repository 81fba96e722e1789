#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "hetcompat/errors.hpp"

namespace hetcompat {

// Exact arithmetic mode. All order/compatibility decisions can be run either
// on double ("float mode", the default) or on Rat ("rational mode", used by
// the LP certificates and the kernel-to-map realization).
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(double x) { return x; }
inline double to_double(const Rat& x) { return x.template convert_to<double>(); }

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool is_exact = false;
  static const char* mode_name() { return "float"; }
  static double from_rational(const Rat& r) { return to_double(r); }
};

template <>
struct scalar_traits<Rat> {
  static constexpr bool is_exact = true;
  static const char* mode_name() { return "rational"; }
  static Rat from_rational(const Rat& r) { return r; }
};

template <class T>
T abs_value(const T& x) {
  return x < T(0) ? T(-x) : x;
}

// Parses "p/q", "p", or a plain decimal like "0.25" into an exact rational.
inline Rat rat_from_string(std::string_view s) {
  auto bad = [&] { throw SchemaError("cannot parse rational '" + std::string(s) + "'"); };
  if (s.empty()) bad();
  auto slash = s.find('/');
  try {
    if (slash != std::string_view::npos) {
      BigInt num(std::string(s.substr(0, slash)));
      BigInt den(std::string(s.substr(slash + 1)));
      if (den == 0) bad();
      return Rat(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string_view::npos) return Rat(BigInt(std::string(s)), 1);
    std::string digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
    std::size_t frac_len = s.size() - dot - 1;
    BigInt den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rat(BigInt(digits), den);
  } catch (const std::exception&) {
    bad();
  }
  return Rat(0);  // unreachable
}

inline std::string rat_to_string(const Rat& r) {
  std::string num = numerator(r).str();
  if (denominator(r) == 1) return num;
  return num + "/" + denominator(r).str();
}

// Best rational approximation with denominator <= max_den, by continued
// fractions (Stern-Brocot walk). Used when float inputs must be promoted to
// rational mode; callers report |x - snap| as the snap distance.
inline Rat snap_to_rational(double x, std::int64_t max_den = 1000000) {
  if (!std::isfinite(x)) throw DomainError("cannot snap non-finite value");
  if (max_den < 1) throw DomainError("max_den must be >= 1");
  bool neg = x < 0;
  double v = neg ? -x : x;
  // continued fraction convergents p/q
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = v;
  Rat best;
  for (int iter = 0; iter < 64; ++iter) {
    double fl = std::floor(frac);
    if (fl > 9e17) break;
    auto a = static_cast<std::int64_t>(fl);
    std::int64_t p2 = a * p1 + p0;
    std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den || q2 < 0 || p2 < 0) {
      // take the best semiconvergent still within the bound
      if (q1 > 0) {
        std::int64_t k = (max_den - q0) / q1;
        std::int64_t ps = k * p1 + p0, qs = k * q1 + q0;
        Rat semi(ps, qs), conv(p1, q1 == 0 ? 1 : q1);
        double ds = std::abs(to_double(semi) - v);
        double dc = q1 == 0 ? 1e300 : std::abs(to_double(conv) - v);
        best = (qs >= 1 && ds < dc) ? semi : conv;
      } else {
        best = Rat(p1, 1);
      }
      return neg ? Rat(-best) : best;
    }
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double rem = frac - fl;
    if (rem < 1e-18) break;
    frac = 1.0 / rem;
  }
  best = Rat(p1, q1 == 0 ? 1 : q1);
  return neg ? Rat(-best) : best;
}

inline BigInt lcm_bigint(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::lcm(a, b);
}

}  // namespace hetcompat
