#include "ctaudit/rational.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <regex>

#include "ctaudit/error.hpp"

namespace ctaudit {

namespace mp = boost::multiprecision;

namespace {

BigInt pow10(unsigned exponent) { return mp::pow(BigInt(10), exponent); }

// cpp_int's string constructor reads a leading 0 as an octal prefix.
BigInt from_decimal_digits(std::string digits) {
  const auto first = digits.find_first_not_of('0');
  digits = first == std::string::npos ? "0" : digits.substr(first);
  return BigInt(digits);
}

// q * 2^shift as a rational, shift of either sign.
Rational scale_pow2(const Rational& q, long shift) {
  BigInt num = mp::numerator(q);
  BigInt den = mp::denominator(q);
  if (shift >= 0) {
    num <<= shift;
  } else {
    den <<= -shift;
  }
  return Rational(num, den);
}

}  // namespace

long floor_log2(const Rational& q) {
  const BigInt num = mp::numerator(q);
  const BigInt den = mp::denominator(q);
  if (num <= 0) throw DomainError("floor_log2 of a non-positive value");
  long e = static_cast<long>(mp::msb(num)) - static_cast<long>(mp::msb(den));
  // 2^e <= q unless the leading bits of num fall below den's.
  const bool below = e >= 0 ? num < (den << e) : (num << -e) < den;
  return below ? e - 1 : e;
}

double to_double(const Rational& q) {
  if (q == 0) return 0.0;
  const bool negative = q < 0;
  const Rational mag = negative ? Rational(-q) : q;

  const long exponent = floor_log2(mag);
  if (exponent >= std::numeric_limits<double>::max_exponent) {
    return negative ? -HUGE_VAL : HUGE_VAL;
  }
  constexpr long kMinNormal = std::numeric_limits<double>::min_exponent - 1;  // -1022
  constexpr long kDigits = std::numeric_limits<double>::digits;               // 53
  if (exponent < kMinNormal - kDigits - 1) return negative ? -0.0 : 0.0;

  // Available mantissa bits shrink below the normal range.
  const long precision = exponent >= kMinNormal ? kDigits : kDigits - (kMinNormal - exponent);

  // Two extra bits: guard and round; the division remainder is sticky.
  const Rational scaled = scale_pow2(mag, precision + 1 - exponent);
  BigInt quotient;
  BigInt remainder;
  mp::divide_qr(mp::numerator(scaled), mp::denominator(scaled), quotient, remainder);

  BigInt mantissa = quotient >> 2;
  const bool guard = mp::bit_test(quotient, 1);
  const bool sticky = mp::bit_test(quotient, 0) || remainder != 0;
  if (guard && (sticky || mp::bit_test(mantissa, 0))) ++mantissa;

  const double result = std::ldexp(mantissa.convert_to<double>(), static_cast<int>(exponent - precision + 1));
  return negative ? -result : result;
}

double to_double(const BigInt& n) { return to_double(Rational(n)); }

std::string to_decimal(const Rational& q, int digits) {
  if (digits < 1) digits = 1;
  if (q == 0) return "0";
  const bool negative = q < 0;
  const Rational mag = negative ? Rational(-q) : q;

  // Decimal exponent estimate from the binary one, then corrected.
  long e10 = static_cast<long>(std::floor(static_cast<double>(floor_log2(mag)) * 0.30102999566398120));
  auto power = [](long e) {
    return e >= 0 ? Rational(pow10(static_cast<unsigned>(e))) : Rational(BigInt(1), pow10(static_cast<unsigned>(-e)));
  };
  while (power(e10) > mag) --e10;
  while (power(e10 + 1) <= mag) ++e10;

  const Rational scaled = mag * power(digits - 1 - e10);
  BigInt whole;
  BigInt remainder;
  mp::divide_qr(mp::numerator(scaled), mp::denominator(scaled), whole, remainder);
  const BigInt twice = remainder * 2;
  const BigInt& den = mp::denominator(scaled);
  if (twice > den || (twice == den && mp::bit_test(whole, 0))) ++whole;
  if (whole == pow10(static_cast<unsigned>(digits))) {
    whole /= 10;
    ++e10;
  }

  const std::string body = whole.str();
  std::string out = negative ? "-" : "";
  out += body.front();
  if (body.size() > 1) {
    out += '.';
    out.append(body, 1, std::string::npos);
  }
  if (e10 != 0) out += "e" + std::to_string(e10);
  return out;
}

std::string to_fraction_string(const Rational& q) {
  if (mp::denominator(q) == 1) return mp::numerator(q).str();
  return mp::numerator(q).str() + "/" + mp::denominator(q).str();
}

std::string format_sig(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
  return buffer;
}

BigInt parse_integer(std::string_view text) {
  static const std::regex kInteger(R"(^\s*([+-]?[0-9]+)\s*$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(text.begin(), text.end(), m, kInteger)) {
    throw InputError("not an integer: '" + std::string(text) + "'");
  }
  std::string digits = m[1].str();
  const bool negative = digits.front() == '-';
  if (digits.front() == '+' || negative) digits.erase(0, 1);
  const BigInt value = from_decimal_digits(digits);
  return negative ? BigInt(-value) : value;
}

Rational parse_rational(std::string_view text) {
  static const std::regex kFraction(R"(^\s*([+-]?[0-9]+)\s*/\s*([0-9]+)\s*$)");
  static const std::regex kDecimal(R"(^\s*([+-]?)([0-9]*)(?:\.([0-9]*))?(?:[eE]([+-]?[0-9]+))?\s*$)");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_match(text.begin(), text.end(), m, kFraction)) {
    const BigInt num = parse_integer(m[1].str());
    const BigInt den = from_decimal_digits(m[2].str());
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (std::regex_match(text.begin(), text.end(), m, kDecimal) && (m[2].length() + m[3].length()) > 0) {
    const std::string int_part = m[2].str();
    const std::string frac_part = m[3].str();
    const BigInt mantissa = from_decimal_digits(int_part + frac_part);
    long exponent = -static_cast<long>(frac_part.size());
    if (m[4].matched) {
      const std::string e = m[4].str();
      if (e.size() > 6) throw InputError("exponent out of range in '" + std::string(text) + "'");
      exponent += std::stol(e);
    }
    Rational value = exponent >= 0 ? Rational(mantissa * pow10(static_cast<unsigned>(exponent)))
                                   : Rational(mantissa, pow10(static_cast<unsigned>(-exponent)));
    return m[1].str() == "-" ? Rational(-value) : value;
  }
  throw InputError("not a number: '" + std::string(text) + "'");
}

std::uint64_t to_u64(const BigInt& n, std::string_view what) {
  if (n < 0 || n > std::numeric_limits<std::uint64_t>::max()) {
    throw DomainError(std::string(what) + " out of 64-bit range: " + n.str());
  }
  return n.convert_to<std::uint64_t>();
}

BigInt binomial_coefficient(const BigInt& n, const BigInt& k) {
  if (n < 0) throw DomainError("binomial coefficient with negative n");
  if (k < 0 || k > n) return 0;
  const BigInt steps = k < n - k ? k : BigInt(n - k);
  BigInt result = 1;
  for (BigInt i = 1; i <= steps; ++i) {
    // Product of i consecutive integers is divisible by i!.
    result *= n - steps + i;
    result /= i;
  }
  return result;
}

}  // namespace ctaudit
