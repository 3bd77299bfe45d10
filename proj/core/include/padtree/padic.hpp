#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "padtree/errors.hpp"

namespace padtree {

// Shared arithmetic context: the prime p and the working precision N
// (count of significant base-p digits carried by every unit part).
class PAdicContext {
 public:
  PAdicContext(unsigned long p, int precision_n);

  unsigned long p() const { return p_; }
  int precision() const { return n_; }

  // p^e for 0 <= e <= precision (cached; larger exponents never arise).
  const mpz_class& pow(int e) const;

  static std::shared_ptr<const PAdicContext> make(unsigned long p,
                                                  int precision_n = 64);

 private:
  unsigned long p_;
  int n_;
  std::vector<mpz_class> powers_;  // powers_[e] = p^e, e = 0..n_
};

using ContextPtr = std::shared_ptr<const PAdicContext>;

// Deterministic primality test for 64-bit integers.
bool is_prime_u64(unsigned long n);

// Three-valued outcome of a norm comparison at finite precision.
enum class Decision { Yes, No, Unknown };

// Digits of slack granted by every "equal at working precision" check:
// congruences are verified modulo p^(N - kVerifySlack).
inline constexpr int kVerifySlack = 2;

// An element of Q_p at bounded precision. Three states:
//  - exact zero (image of the rational 0);
//  - ball: indistinguishable from 0, valuation known only as a lower bound
//    (produced by full additive cancellation);
//  - nonzero: exact valuation v, unit part u in [1, p^known) with u mod p != 0,
//    trusted to `known` significant digits (<= N, reduced by cancellation).
class PAdicNumber {
 public:
  PAdicNumber() = default;  // empty; using it in arithmetic throws DomainError

  static PAdicNumber zero(ContextPtr ctx);
  static PAdicNumber zero_at(ContextPtr ctx, long valuation_lower_bound);
  static PAdicNumber one(const ContextPtr& ctx);
  static PAdicNumber from_integer(long value, const ContextPtr& ctx);
  static PAdicNumber from_mpz(const mpz_class& value, const ContextPtr& ctx);
  static PAdicNumber from_rational(const mpq_class& value,
                                   const ContextPtr& ctx);
  static PAdicNumber from_rational(long num, long den, const ContextPtr& ctx);
  // Assembles a nonzero value from parts; validates unit and digit count.
  static PAdicNumber from_parts(ContextPtr ctx, long valuation, mpz_class unit,
                                int known_digits);

  const ContextPtr& context() const { return ctx_; }
  bool valid() const { return ctx_ != nullptr; }

  // True when the value is indistinguishable from 0 (exact zero or ball).
  bool is_zero() const { return kind_ != Kind::Nonzero; }
  bool is_exact_zero() const { return kind_ == Kind::Zero; }
  bool is_ball() const { return kind_ == Kind::Ball; }

  // Exact valuation of a nonzero value; throws PrecisionExhausted otherwise.
  long valuation() const;
  // Lower bound on the valuation, defined for every state; exact zero maps
  // to kInfiniteValuation.
  long valuation_lower_bound() const;
  static constexpr long kInfiniteValuation =
      std::numeric_limits<long>::max() / 4;

  // -valuation, so |x|_p = p^(result); nullopt marks |x|_p = 0 or
  // "no decidable norm" (both zero states).
  std::optional<long> norm_exponent() const;

  int known_digits() const { return known_; }
  const mpz_class& unit() const;  // nonzero only

  // First n canonical digits (x_0, x_1, ...), x_0 in [1, p-1].
  // Throws PrecisionExhausted when n > known_digits or the value has no
  // canonical digits (exact zero and balls).
  std::vector<unsigned long> digits(int n) const;

  PAdicNumber operator-() const;
  PAdicNumber operator+(const PAdicNumber& rhs) const;
  PAdicNumber operator-(const PAdicNumber& rhs) const;
  PAdicNumber operator*(const PAdicNumber& rhs) const;
  PAdicNumber operator/(const PAdicNumber& rhs) const;

  PAdicNumber inverse() const;         // throws DivisionByZero on zero states
  PAdicNumber pow(long exponent) const;
  // Multiplies by p^shift (exact rescaling).
  PAdicNumber shifted(long shift) const;

  // Debug rendering: "p^v*(d0 + d1*p + ...)", "O(p^B)", or "0".
  std::string describe() const;

 private:
  enum class Kind { Zero, Ball, Nonzero };

  ContextPtr ctx_;
  Kind kind_ = Kind::Zero;
  long val_ = 0;      // nonzero: exact valuation; ball: lower bound
  mpz_class unit_;    // nonzero only; in [1, p^known_), coprime to p
  int known_ = 0;     // nonzero: 1..N; other states: 0

  static void require_same_context(const PAdicNumber& a, const PAdicNumber& b);
  void require_valid() const;
};

// Inverse of u modulo p^k, 1 <= k <= precision, computed by Newton doubling
// from the inverse modulo p; u must be coprime to p.
mpz_class invert_unit(const mpz_class& u, const PAdicContext& ctx, int k);

// Contract-named aliases for the field operations.
PAdicNumber add(const PAdicNumber& x, const PAdicNumber& y);
PAdicNumber sub(const PAdicNumber& x, const PAdicNumber& y);
PAdicNumber mul(const PAdicNumber& x, const PAdicNumber& y);
PAdicNumber div(const PAdicNumber& x, const PAdicNumber& y);
std::optional<long> norm_exponent(const PAdicNumber& x);

// Decides |x|_p <= p^(-e), i.e. valuation(x) >= e. Unknown when x is a ball
// whose bound cannot settle the comparison.
Decision decide_norm_le(const PAdicNumber& x, long e);

// True iff |x - 1|_p <= 1/p; PrecisionExhausted when undecidable.
bool in_Ep(const PAdicNumber& x);

// True iff x == y modulo p^m; PrecisionExhausted when undecidable.
bool eq_mod(const PAdicNumber& x, const PAdicNumber& y, long m);

}  // namespace padtree
