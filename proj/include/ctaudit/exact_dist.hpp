#pragma once

#include <vector>

#include "ctaudit/rational.hpp"
#include "ctaudit/table.hpp"

namespace ctaudit {

/// Drawing `r` items without replacement from a population of `n` that
/// holds `k` successes; `x` is the observed number of successes.
struct HypergeomParams {
  Count n;
  Count r;
  Count k;
  Count x;
};

/// `n` independent draws, each a success with exact probability `p`.
struct BinomialParams {
  Count n;
  Rational p;
};

struct Support {
  Count lo;
  Count hi;
};

/// max(0, r + k - n) .. min(r, k). Throws DomainError on invalid n, r, k.
Support hypergeom_support(const Count& n, const Count& r, const Count& k);

/// C(k,x) C(n-k,r-x) / C(n,r). Throws DomainError when x is outside the
/// support, which is not the same as a probability of zero.
Rational hypergeom_pmf(const HypergeomParams& params);

/// P(X >= x). Thresholds below the support give 1, above it 0.
Rational hypergeom_upper_tail(const HypergeomParams& params);

/// One-sided Fisher exact probability of at least `a` in cell (1,1) with
/// all margins fixed: n = total, r = row1, k = col1.
Rational fisher_upper_tail(const Table2x2& t);

/// Throws DomainError unless 0 <= x <= n (and 0 <= p <= 1).
Rational binomial_pmf(const BinomialParams& params, const Count& x);

/// P(X >= k) = 1 - sum_{x<k} pmf(x), for 0 <= k <= n + 1.
Rational binomial_upper_tail(const BinomialParams& params, const Count& k);

struct TailRow {
  Count threshold;
  Rational probability;  // P(X >= threshold)
  double value;          // rendering of `probability`
};

/// Exact upper tails for consecutive thresholds.
struct TailTable {
  std::vector<TailRow> rows;

  /// Throws DomainError when `threshold` has no row.
  const TailRow& at(const Count& threshold) const;
};

/// Rows for thresholds k_min..k_max inclusive; k_min <= k_max <= n + 1.
TailTable tail_table(const BinomialParams& params, const Count& k_min, const Count& k_max);

}  // namespace ctaudit
