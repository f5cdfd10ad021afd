#include "poros/log_value.hpp"

#include "poros/error.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <charconv>
#include <cmath>
#include <limits>

namespace poros {
namespace {

namespace mp = boost::multiprecision;

// Working precision for the transcendental parts; far beyond the 64-bit output.
using Float = mp::number<mp::cpp_bin_float<192, mp::digit_base_2>, mp::et_off>;

Integer parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw SchemaError("invalid rational \"" + std::string(whole) + "\"");
  bool negative = false;
  if (digits.front() == '-' || digits.front() == '+') {
    negative = digits.front() == '-';
    digits.remove_prefix(1);
  }
  if (digits.empty()) throw SchemaError("invalid rational \"" + std::string(whole) + "\"");
  Integer value = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') throw SchemaError("invalid rational \"" + std::string(whole) + "\"");
    value = value * 10 + (c - '0');
  }
  return negative ? Integer(-value) : value;
}

Float log2_integer(const Integer& n) {
  // n > 0. Keep the top ~180 bits; the rest only moves the result below 2^-170.
  const unsigned top = mp::msb(n);
  constexpr unsigned kKeep = 180;
  if (top <= kKeep) return mp::log2(Float(n));
  Integer head = n >> (top - kKeep);
  return mp::log2(Float(head)) + Float(top - kKeep);
}

Float log2_rational(const Rational& x) {
  return log2_integer(mp::numerator(x)) - log2_integer(mp::denominator(x));
}

Rational round_to_bits(const Float& value, unsigned bits) {
  Float scaled = mp::ldexp(value, static_cast<int>(bits));
  Integer n = static_cast<Integer>(mp::round(scaled));
  return Rational(n, Integer(1) << bits);
}

Integer floor_rational(const Rational& x) {
  Integer q = mp::numerator(x) / mp::denominator(x);
  if (x < 0 && Rational(q) != x) q -= 1;
  return q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
  Integer num = parse_integer(text.substr(0, slash), text);
  Integer den = parse_integer(text.substr(slash + 1), text);
  if (den == 0) throw SchemaError("zero denominator in \"" + std::string(text) + "\"");
  return Rational(num, den);
}

std::string to_string(const Rational& value) {
  if (mp::denominator(value) == 1) return mp::numerator(value).str();
  return mp::numerator(value).str() + "/" + mp::denominator(value).str();
}

double to_double(const Rational& value) {
  const Integer& num = mp::numerator(value);
  const Integer& den = mp::denominator(value);
  if (num == 0) return 0.0;
  const long nbits = static_cast<long>(mp::msb(num < 0 ? Integer(-num) : num));
  const long dbits = static_cast<long>(mp::msb(den));
  if (nbits - dbits > 1100) return num < 0 ? -std::numeric_limits<double>::infinity()
                                           : std::numeric_limits<double>::infinity();
  if (dbits - nbits > 1100) return 0.0;
  return static_cast<double>(Float(value));
}

double exp2_approx(const Rational& exponent) {
  if (exponent > 1100) return std::numeric_limits<double>::infinity();
  if (exponent < -1100) return 0.0;
  return std::exp2(to_double(exponent));
}

bool is_power_of_two(const Rational& value, Integer* log2) {
  if (value <= 0) return false;
  const Integer& num = mp::numerator(value);
  const Integer& den = mp::denominator(value);
  const bool num_pow = (num & (num - 1)) == 0;
  const bool den_pow = (den & (den - 1)) == 0;
  if (!num_pow || !den_pow) return false;
  if (log2) *log2 = Integer(mp::msb(num)) - Integer(mp::msb(den));
  return true;
}

LogValue LogValue::from_rational(const Rational& value, unsigned bits) {
  if (value <= 0) throw PreconditionError("LogValue requires a strictly positive value");
  Integer exponent;
  if (is_power_of_two(value, &exponent)) return LogValue(Rational(exponent));
  return LogValue(round_to_bits(log2_rational(value), bits));
}

LogValue LogValue::from_double(double value, unsigned bits) {
  if (!std::isfinite(value)) throw PreconditionError("LogValue requires a finite value");
  if (value <= 0) throw PreconditionError("LogValue requires a strictly positive value");
  // Every finite double is an exact dyadic rational.
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  Rational exact(scaled);
  exponent -= 53;
  if (exponent >= 0) exact *= Rational(Integer(1) << exponent);
  else exact /= Rational(Integer(1) << -exponent);
  return from_rational(exact, bits);
}

Rational log2_one_minus_pow2(const Rational& d, unsigned bits) {
  if (d >= 0) throw PreconditionError("log2(1 - 2^d) needs d < 0");
  if (d == -1) return Rational(-1);
  // |log2(1 - 2^d)| < 2^(d+1) once d <= -2, so it rounds to zero past the precision.
  if (d < -static_cast<long>(bits + 4)) return Rational(0);
  Float v = mp::log2(Float(1) - mp::exp2(Float(d)));
  return round_to_bits(v, bits);
}

Rational log2_one_plus_pow2(const Rational& d, unsigned bits) {
  if (d > 0) throw PreconditionError("log2(1 + 2^d) needs d <= 0");
  if (d == 0) return Rational(1);
  if (d < -static_cast<long>(bits + 4)) return Rational(0);
  Float v = mp::log2(Float(1) + mp::exp2(Float(d)));
  return round_to_bits(v, bits);
}

LogValue linear_difference(const LogValue& x, const LogValue& y, unsigned bits) {
  if (!(y < x)) throw PreconditionError("nonpositive difference");
  return LogValue::from_log2(x.log2() + log2_one_minus_pow2(y.log2() - x.log2(), bits));
}

LogValue linear_sum(const LogValue& x, const LogValue& y, unsigned bits) {
  const LogValue& hi = x < y ? y : x;
  const LogValue& lo = x < y ? x : y;
  return LogValue::from_log2(hi.log2() + log2_one_plus_pow2(lo.log2() - hi.log2(), bits));
}

Magnitude abs_difference(const Magnitude& x, const Magnitude& y, unsigned bits) {
  if (!x) return y;
  if (!y) return x;
  if (*x == *y) return std::nullopt;
  return *y < *x ? linear_difference(*x, *y, bits) : linear_difference(*y, *x, bits);
}

int compare_pow2(const Rational& exponent, const Rational& k) {
  if (k <= 0) throw PreconditionError("compare_pow2 needs k > 0");
  Integer k_log2;
  if (is_power_of_two(k, &k_log2)) {
    const Rational lk(k_log2);
    return exponent < lk ? -1 : (lk < exponent ? 1 : 0);
  }
  // log2 k is irrational here, so equality is impossible.
  const Float lk = log2_rational(k);
  const Float gap = Float(exponent) - lk;
  const Float margin = mp::ldexp(Float(1), -150) * (1 + mp::abs(lk));
  if (gap > margin) return 1;
  if (gap < -margin) return -1;
  // Extremely close: decide 2^(a/b) vs k exactly as 2^a vs k^b.
  const Integer& a = mp::numerator(exponent);
  const Integer& b = mp::denominator(exponent);
  if (b > 4096) throw PreconditionError("compare_pow2: exponent denominator too large");
  const auto bb = static_cast<unsigned>(b);
  Integer lhs_num = mp::pow(mp::numerator(k), bb);
  Integer lhs_den = mp::pow(mp::denominator(k), bb);
  // sign(2^a - lhs_num / lhs_den)
  Integer left = a >= 0 ? (Integer(1) << static_cast<unsigned>(a)) * lhs_den : lhs_den;
  Integer right = a >= 0 ? lhs_num : lhs_num << static_cast<unsigned>(-a);
  return left < right ? -1 : (right < left ? 1 : 0);
}

int compare_ratio(const LogValue& num, const LogValue& den, const Rational& k) {
  return compare_pow2(num.log2() - den.log2(), k);
}

Rational dyadic_below(const LogValue& value, unsigned bits) {
  const Integer whole = floor_rational(value.log2());
  if (mp::abs(whole) > (1 << 20)) throw PreconditionError("dyadic_below: magnitude too large");
  const Rational frac = value.log2() - Rational(whole);
  Float mantissa = mp::exp2(Float(frac));
  Float scaled = mp::ldexp(mantissa, static_cast<int>(bits));
  Rational m(static_cast<Integer>(mp::floor(scaled)), Integer(1) << bits);
  if (whole >= 0) return m * Rational(Integer(1) << static_cast<unsigned>(whole));
  return m / Rational(Integer(1) << static_cast<unsigned>(-whole));
}

Rational dyadic_above(const LogValue& value, unsigned bits) {
  const Integer whole = floor_rational(value.log2());
  if (mp::abs(whole) > (1 << 20)) throw PreconditionError("dyadic_above: magnitude too large");
  const Rational frac = value.log2() - Rational(whole);
  Float mantissa = mp::exp2(Float(frac));
  Float scaled = mp::ldexp(mantissa, static_cast<int>(bits));
  Rational m(static_cast<Integer>(mp::ceil(scaled)), Integer(1) << bits);
  if (whole >= 0) return m * Rational(Integer(1) << static_cast<unsigned>(whole));
  return m / Rational(Integer(1) << static_cast<unsigned>(-whole));
}

}  // namespace poros
