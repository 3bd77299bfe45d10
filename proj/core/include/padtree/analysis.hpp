#pragma once

#include <optional>
#include <vector>

#include "padtree/polynomial.hpp"

namespace padtree {

using PVec = std::vector<PAdicNumber>;
using PMat = std::vector<std::vector<PAdicNumber>>;

struct SqrtRoots {
  PAdicNumber principal;  // odd p: first digit in [1, (p-1)/2]
  PAdicNumber negated;
};

// Both square roots of a, when they exist:
//  - valuation must be even;
//  - odd p: leading digit a quadratic residue mod p;
//  - p = 2: unit congruent to 1 mod 8.
// Throws NoSolution with the failing clause, DomainError on (precision-)zero.
SqrtRoots sqrt(const PAdicNumber& a);

struct SqrtCheck {
  bool exists;
  std::optional<NoSolution::Reason> reason;  // set when exists is false
};

// Non-throwing existence probe with the same clauses as sqrt.
SqrtCheck sqrt_exists(const PAdicNumber& a);

struct HenselInput {
  Polynomial F;
  PAdicNumber a0;  // valuation >= 0
  long gamma = 0;
};

// Newton lifting of the approximate root a0. The congruence preconditions
//   F(a0) = 0 mod p^(2*gamma+1),  valuation(F'(a0)) = gamma exactly
// are checked (CertificateViolation on failure); returns a with
// F(a) = 0 mod p^N and a = a0 mod p^(gamma+1).
PAdicNumber hensel_lift(const HenselInput& input);

// Truncated p-adic exponential; domain valuation(x) >= 1 (>= 2 for p = 2).
PAdicNumber exp_p(const PAdicNumber& x);

// Truncated p-adic logarithm of x near 1; domain |x-1|_p <= 1/p
// (<= 1/4 for p = 2).
PAdicNumber log_p(const PAdicNumber& x);

// Gaussian elimination with maximal-norm pivoting; the solution is verified
// to residual valuation >= N - kVerifySlack.
PVec linear_solve(const PMat& m, const PVec& b);

}  // namespace padtree
