#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ctaudit {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Correctly rounded (round-half-even) conversion, including subnormals.
/// Overflow yields +/-infinity.
double to_double(const Rational& q);
double to_double(const BigInt& n);

/// Scientific decimal with `digits` significant digits, e.g. "1.10572e-7".
/// The last digit is rounded half-even from the exact value.
std::string to_decimal(const Rational& q, int digits);

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_fraction_string(const Rational& q);

/// Six-significant-figure rendering ("%.6g").
std::string format_sig(double value, int digits = 6);

/// Parses "7", "-3", "13/1533", "0.05", "2.5e-3" into an exact rational.
/// Throws InputError on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// Parses a non-negative or negative decimal integer. Throws InputError.
BigInt parse_integer(std::string_view text);

/// Narrowing with a range check; throws DomainError when `n` does not fit.
std::uint64_t to_u64(const BigInt& n, std::string_view what);

/// C(n, k) for non-negative n; 0 when k < 0 or k > n.
BigInt binomial_coefficient(const BigInt& n, const BigInt& k);

/// Floor of log2 of a positive rational.
long floor_log2(const Rational& q);

}  // namespace ctaudit
