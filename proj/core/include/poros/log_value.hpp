#pragma once

// Exact log-domain representation of strictly positive reals.
//
// A LogValue stores log2 of the value as an exact rational, so magnitudes such
// as 2^(-40!) compare and multiply exactly. Only sums and differences of the
// represented reals are inexact; those round the log2 correction term to a
// fixed number of fractional bits (64 by default).

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace poros {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr unsigned kDefaultPrecisionBits = 64;

/// Parses "p/q", "p" or "-p/q". Throws SchemaError on malformed input or q = 0.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when q = 1).
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// 2^value for a rational exponent; +inf / 0 on overflow / underflow.
double exp2_approx(const Rational& exponent);

/// True when the positive rational is an integer power of two; sets `log2`.
bool is_power_of_two(const Rational& value, Integer* log2 = nullptr);

class LogValue {
 public:
  /// The value 1.
  LogValue() = default;

  static LogValue from_log2(Rational log2) { return LogValue(std::move(log2)); }
  static LogValue pow2(std::int64_t exponent) { return LogValue(Rational(exponent)); }

  /// Exact when `value` is a power of two, otherwise log2 rounded to `bits`
  /// fractional bits. Throws PreconditionError for value <= 0.
  static LogValue from_rational(const Rational& value, unsigned bits = kDefaultPrecisionBits);

  /// Same contract as from_rational. Rejects NaN, infinities and value <= 0.
  static LogValue from_double(double value, unsigned bits = kDefaultPrecisionBits);

  const Rational& log2() const { return log2_; }
  double log2_approx() const { return poros::to_double(log2_); }
  double to_double() const { return exp2_approx(log2_); }

  LogValue operator*(const LogValue& other) const { return LogValue(log2_ + other.log2_); }
  LogValue operator/(const LogValue& other) const { return LogValue(log2_ - other.log2_); }

  friend bool operator==(const LogValue& a, const LogValue& b) { return a.log2_ == b.log2_; }
  friend std::strong_ordering operator<=>(const LogValue& a, const LogValue& b) {
    if (a.log2_ < b.log2_) return std::strong_ordering::less;
    if (b.log2_ < a.log2_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  explicit LogValue(Rational log2) : log2_(std::move(log2)) {}

  Rational log2_{0};
};

/// A nonnegative magnitude: nullopt encodes 0.
using Magnitude = std::optional<LogValue>;

/// log2(1 - 2^d) for d < 0, rounded to `bits` fractional bits; exact for d = -1.
Rational log2_one_minus_pow2(const Rational& d, unsigned bits = kDefaultPrecisionBits);

/// log2(1 + 2^d) for d <= 0, rounded to `bits` fractional bits; exact for d = 0.
Rational log2_one_plus_pow2(const Rational& d, unsigned bits = kDefaultPrecisionBits);

/// x - y for x > y. Throws PreconditionError("nonpositive difference") otherwise.
LogValue linear_difference(const LogValue& x, const LogValue& y,
                           unsigned bits = kDefaultPrecisionBits);

/// x + y.
LogValue linear_sum(const LogValue& x, const LogValue& y, unsigned bits = kDefaultPrecisionBits);

/// |x - y| for magnitudes (either may be zero).
Magnitude abs_difference(const Magnitude& x, const Magnitude& y,
                         unsigned bits = kDefaultPrecisionBits);

/// Exact sign of num/den - k for a positive rational k.
int compare_ratio(const LogValue& num, const LogValue& den, const Rational& k);

/// Exact sign of 2^exponent - k for a positive rational k.
int compare_pow2(const Rational& exponent, const Rational& k);

/// Dyadic rational within 2^-bits (relative) of the value, rounded down / up.
Rational dyadic_below(const LogValue& value, unsigned bits = kDefaultPrecisionBits);
Rational dyadic_above(const LogValue& value, unsigned bits = kDefaultPrecisionBits);

}  // namespace poros
