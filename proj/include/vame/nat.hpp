#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace vame {

/// Index arithmetic for rate certificates. Values saturate at kNatCeiling
/// instead of wrapping; a value at the ceiling reads "at least this large"
/// and is reported as saturated wherever it surfaces.
using Nat = std::uint64_t;

inline constexpr Nat kNatCeiling = (Nat{1} << 63) - 1;

inline constexpr bool is_saturated(Nat v) { return v >= kNatCeiling; }

inline constexpr Nat sat_add(Nat a, Nat b) {
  if (is_saturated(a) || is_saturated(b)) return kNatCeiling;
  const Nat s = a + b;  // both < 2^63, cannot wrap
  return s >= kNatCeiling ? kNatCeiling : s;
}

inline constexpr Nat sat_mul(Nat a, Nat b) {
  if (a == 0 || b == 0) return 0;
  if (is_saturated(a) || is_saturated(b)) return kNatCeiling;
  if (a > kNatCeiling / b) return kNatCeiling;
  return a * b;
}

/// Truncated subtraction: the naturals have no negatives.
inline constexpr Nat sat_sub(Nat a, Nat b) { return a > b ? a - b : 0; }

class DomainError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An oracle or table was indexed beyond the range it is defined on.
class HorizonError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least natural >= x, saturating at the ceiling. Negative x maps to 0.
inline Nat nat_ceil(double x) {
  if (std::isnan(x)) throw DomainError("nat_ceil: NaN");
  if (x <= 0.0) return 0;
  const double c = std::ceil(x);
  if (c >= static_cast<double>(kNatCeiling)) return kNatCeiling;
  return static_cast<Nat>(c);
}

/// ceil(ln x) with the float logarithm nudged one ulp up before the
/// ceiling, so the result never under-approximates the exact value.
inline Nat ceil_log_conservative(double x) {
  if (!(x >= 1.0)) throw DomainError("ceil_log_conservative: argument must be >= 1");
  double l = std::log(x);
  l = std::nextafter(l, std::numeric_limits<double>::infinity());
  return nat_ceil(l);
}

/// ceil(a * factor) for natural a and nonnegative real factor, evaluated in
/// extended precision so the natural operand stays exact.
inline Nat nat_ceil_mul(Nat a, double factor) {
  if (std::isnan(factor) || factor < 0.0) {
    throw DomainError("nat_ceil_mul: factor must be nonnegative");
  }
  if (factor == 0.0 || a == 0) return 0;
  if (is_saturated(a)) return kNatCeiling;
  const long double p = static_cast<long double>(a) * static_cast<long double>(factor);
  const long double c = std::ceil(p);
  if (c >= static_cast<long double>(kNatCeiling)) return kNatCeiling;
  if (c <= 0.0L) return 0;
  return static_cast<Nat>(c);
}

/// ceil(a / denom) for natural a and positive real denom, evaluated in
/// extended precision.
inline Nat nat_ceil_div(Nat a, double denom) {
  if (!(denom > 0.0)) throw DomainError("nat_ceil_div: denominator must be positive");
  if (is_saturated(a)) return kNatCeiling;
  const long double q = static_cast<long double>(a) / static_cast<long double>(denom);
  const long double c = std::ceil(q);
  if (c >= static_cast<long double>(kNatCeiling)) return kNatCeiling;
  if (c <= 0.0L) return 0;
  return static_cast<Nat>(c);
}

}  // namespace vame
