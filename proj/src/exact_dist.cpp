#include "ctaudit/exact_dist.hpp"

#include <algorithm>

#include "ctaudit/error.hpp"

namespace ctaudit {

namespace mp = boost::multiprecision;

namespace {

void check_binomial(const BinomialParams& params) {
  if (params.n < 0) throw DomainError("binomial: negative number of draws " + params.n.str());
  if (params.p < 0 || params.p > 1) throw DomainError("binomial: p = " + to_fraction_string(params.p) + " outside [0,1]");
}

// Numerators of the binomial pmf over the common denominator den^n, for
// x = 0 .. last. With p = num/den, term(x) = C(n,x) num^x (den-num)^(n-x).
std::vector<BigInt> binomial_numerators(const BinomialParams& params, std::uint64_t last) {
  const std::uint64_t n = to_u64(params.n, "binomial n");
  const BigInt& num = mp::numerator(params.p);
  const BigInt miss = mp::denominator(params.p) - num;
  last = std::min(last, n);

  std::vector<BigInt> terms;
  terms.reserve(last + 1);
  BigInt choose = 1;
  BigInt hit_power = 1;
  for (std::uint64_t x = 0; x <= last; ++x) {
    terms.push_back(choose * hit_power * mp::pow(miss, static_cast<unsigned>(n - x)));
    choose *= n - x;
    choose /= x + 1;
    hit_power *= num;
  }
  return terms;
}

BigInt binomial_denominator(const BinomialParams& params) {
  return mp::pow(mp::denominator(params.p), static_cast<unsigned>(to_u64(params.n, "binomial n")));
}

}  // namespace

Support hypergeom_support(const Count& n, const Count& r, const Count& k) {
  if (n < 0 || r < 0 || k < 0 || r > n || k > n) {
    throw DomainError("hypergeometric: need 0 <= r <= n and 0 <= k <= n (n=" + n.str() + ", r=" + r.str() +
                      ", k=" + k.str() + ")");
  }
  const Count lo = r + k - n;
  return Support{lo > 0 ? lo : Count(0), std::min(r, k)};
}

Rational hypergeom_pmf(const HypergeomParams& p) {
  const Support s = hypergeom_support(p.n, p.r, p.k);
  if (p.x < s.lo || p.x > s.hi) {
    throw DomainError("hypergeometric: x = " + p.x.str() + " outside support [" + s.lo.str() + ", " + s.hi.str() + "]");
  }
  return Rational(binomial_coefficient(p.k, p.x) * binomial_coefficient(p.n - p.k, p.r - p.x),
                  binomial_coefficient(p.n, p.r));
}

Rational hypergeom_upper_tail(const HypergeomParams& p) {
  const Support s = hypergeom_support(p.n, p.r, p.k);
  if (p.x <= s.lo) return 1;
  if (p.x > s.hi) return 0;

  // term(x) = C(k,x) C(n-k,r-x); the step to x+1 divides exactly.
  Count x = p.x;
  BigInt term = binomial_coefficient(p.k, x) * binomial_coefficient(p.n - p.k, p.r - x);
  BigInt sum = 0;
  for (; x <= s.hi; ++x) {
    sum += term;
    term *= (p.k - x) * (p.r - x);
    term /= (x + 1) * (p.n - p.k - p.r + x + 1);
  }
  return Rational(sum, binomial_coefficient(p.n, p.r));
}

Rational fisher_upper_tail(const Table2x2& t) {
  const Margins m = t.margins();
  return hypergeom_upper_tail(HypergeomParams{m.total, m.row1, m.col1, t.a()});
}

Rational binomial_pmf(const BinomialParams& params, const Count& x) {
  check_binomial(params);
  if (x < 0 || x > params.n) {
    throw DomainError("binomial: x = " + x.str() + " outside support [0, " + params.n.str() + "]");
  }
  const unsigned hits = static_cast<unsigned>(to_u64(x, "binomial x"));
  const unsigned misses = static_cast<unsigned>(to_u64(params.n - x, "binomial n - x"));
  const BigInt num = mp::numerator(params.p);
  const BigInt den = mp::denominator(params.p);
  return Rational(binomial_coefficient(params.n, x) * mp::pow(num, hits) * mp::pow(BigInt(den - num), misses),
                  mp::pow(den, hits + misses));
}

Rational binomial_upper_tail(const BinomialParams& params, const Count& k) {
  check_binomial(params);
  if (k < 0 || k > params.n + 1) {
    throw DomainError("binomial: threshold " + k.str() + " outside [0, " + Count(params.n + 1).str() + "]");
  }
  if (k == 0) return 1;
  const auto terms = binomial_numerators(params, to_u64(k - 1, "binomial threshold"));
  BigInt lower = 0;
  for (const auto& term : terms) lower += term;
  const BigInt den = binomial_denominator(params);
  return Rational(den - lower, den);
}

const TailRow& TailTable::at(const Count& threshold) const {
  const auto it = std::find_if(rows.begin(), rows.end(), [&](const TailRow& r) { return r.threshold == threshold; });
  if (it == rows.end()) throw DomainError("tail table has no row for threshold " + threshold.str());
  return *it;
}

TailTable tail_table(const BinomialParams& params, const Count& k_min, const Count& k_max) {
  check_binomial(params);
  if (k_min < 0 || k_min > k_max || k_max > params.n + 1) {
    throw DomainError("tail table: need 0 <= k_min <= k_max <= n + 1 (k_min=" + k_min.str() + ", k_max=" +
                      k_max.str() + ", n=" + params.n.str() + ")");
  }
  const std::uint64_t lo = to_u64(k_min, "k_min");
  const std::uint64_t hi = to_u64(k_max, "k_max");
  const auto terms = hi == 0 ? std::vector<BigInt>{} : binomial_numerators(params, hi - 1);
  const BigInt den = binomial_denominator(params);

  TailTable table;
  BigInt lower = 0;  // sum of terms below the current threshold
  for (std::uint64_t k = 0; k <= hi; ++k) {
    if (k >= lo) {
      Rational tail(den - lower, den);
      const double value = to_double(tail);
      table.rows.push_back(TailRow{Count(k), std::move(tail), value});
    }
    if (k < terms.size()) lower += terms[k];
  }
  return table;
}

}  // namespace ctaudit
