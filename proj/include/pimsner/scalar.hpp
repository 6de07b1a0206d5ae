#pragma once

// Scalar layer: exact rationals (arbitrary precision) and IEEE doubles behind
// one small trait interface, so the algebraic machinery can run either exactly
// or with a single global tolerance.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace pimsner {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Default global tolerance for float-mode comparisons.
inline constexpr double kDefaultTol = 1e-9;

inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline Rational rational_from(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

// Fixed, locale-independent text form. Integers print without denominator.
inline std::string scalar_str(const Rational& x) {
  const BigInt num = boost::multiprecision::numerator(x);
  const BigInt den = boost::multiprecision::denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline std::string scalar_str(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational& x, double /*tol*/ = 0.0) { return x == 0; }
  static Rational conj(const Rational& x) { return x; }
  static Rational from_int(long long n) { return Rational(n); }
  static double abs_double(const Rational& x) { return std::fabs(to_double(x)); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static bool is_zero(double x, double tol = kDefaultTol) { return std::fabs(x) <= tol; }
  static double conj(double x) { return x; }
  static double from_int(long long n) { return static_cast<double>(n); }
  static double abs_double(double x) { return std::fabs(x); }
};

// |x - y| within tolerance (exact equality for rationals).
template <class S>
bool scalar_close(const S& x, const S& y, double tol = kDefaultTol) {
  return ScalarTraits<S>::is_zero(x - y, tol);
}

}  // namespace pimsner
