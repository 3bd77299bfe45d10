#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "padtree/analysis.hpp"
#include "padtree/padic.hpp"

using namespace padtree;

namespace {

ContextPtr ctx3() {
  static ContextPtr c = PAdicContext::make(3, 64);
  return c;
}

// Random rational with numerator/denominator in a small box, denominator
// coprime to p so valuations stay non-negative unless forced.
mpq_class random_rational(std::mt19937_64& rng, unsigned long p) {
  std::uniform_int_distribution<long> num(-200, 200);
  std::uniform_int_distribution<long> den(1, 60);
  for (;;) {
    long n = num(rng);
    long d = den(rng);
    if (n == 0 || d % static_cast<long>(p) == 0) continue;
    mpq_class q(n, d);
    q.canonicalize();
    return q;
  }
}

}  // namespace

TEST_CASE("context rejects composite and undersized parameters") {
  CHECK_THROWS_AS(PAdicContext::make(4), DomainError);
  CHECK_THROWS_AS(PAdicContext::make(1), DomainError);
  CHECK_THROWS_AS(PAdicContext::make(3, 0), DomainError);
  ContextPtr c = PAdicContext::make(2, 16);
  CHECK(c->p() == 2);
  CHECK(c->precision() == 16);
}

TEST_CASE("embedding a rational reproduces its base-p expansion") {
  std::mt19937_64 rng(7101);
  for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 13ul}) {
    ContextPtr ctx = PAdicContext::make(p, 48);
    for (int trial = 0; trial < 40; ++trial) {
      mpq_class q = random_rational(rng, p);
      long v_expect = 0;
      auto want = oracle::rational_digits(q, p, 48, &v_expect);
      PAdicNumber x = PAdicNumber::from_rational(q, ctx);
      CHECK(x.valuation() == v_expect);
      auto got = x.digits(48);
      for (int i = 0; i < 48; ++i) {
        INFO("p=", p, " q=", q.get_str(), " digit ", i);
        CHECK(got[i] == want[i]);
      }
    }
  }
}

TEST_CASE("negative-valuation rationals carry the p in the valuation") {
  PAdicNumber x = PAdicNumber::from_rational(mpq_class(7, 9), ctx3());
  CHECK(x.valuation() == -2);
  CHECK(x.norm_exponent() == 2);
  PAdicNumber y = PAdicNumber::from_rational(mpq_class(18, 5), ctx3());
  CHECK(y.valuation() == 2);
  CHECK(y.norm_exponent() == -2);
}

TEST_CASE("field operations agree with exact rational arithmetic") {
  std::mt19937_64 rng(7102);
  const long n = 64;
  for (unsigned long p : {3ul, 5ul, 7ul}) {
    ContextPtr ctx = PAdicContext::make(p, n);
    for (int trial = 0; trial < 50; ++trial) {
      mpq_class qa = random_rational(rng, p);
      mpq_class qb = random_rational(rng, p);
      PAdicNumber a = PAdicNumber::from_rational(qa, ctx);
      PAdicNumber b = PAdicNumber::from_rational(qb, ctx);
      const long va = oracle::valuation_q(qa, p);
      const long vb = oracle::valuation_q(qb, p);

      CHECK(eq_mod(a * b, PAdicNumber::from_rational(qa * qb, ctx),
                   va + vb + n - kVerifySlack));
      CHECK(eq_mod(a / b, PAdicNumber::from_rational(qa / qb, ctx),
                   va - vb + n - kVerifySlack));
      const long floor = std::min(va, vb);
      CHECK(eq_mod(a + b, PAdicNumber::from_rational(qa + qb, ctx),
                   floor + n - kVerifySlack));
      if (qa != qb) {
        CHECK(eq_mod(a - b, PAdicNumber::from_rational(qa - qb, ctx),
                     floor + n - kVerifySlack));
      }
      // Valuations are exact, not just bounded, away from cancellation.
      if (va != vb) CHECK((a + b).valuation() == std::min(va, vb));
      CHECK((a * b).valuation() == va + vb);
    }
  }
}

TEST_CASE("subtracting a value from itself yields a precision ball") {
  PAdicNumber a = PAdicNumber::from_rational(mpq_class(22, 7), ctx3());
  PAdicNumber d = a - a;
  CHECK(d.is_zero());
  CHECK(d.valuation_lower_bound() >= 64 - kVerifySlack);
  CHECK_THROWS_AS(d.digits(1), PrecisionExhausted);
  CHECK_THROWS_AS(d.valuation(), PrecisionExhausted);
  CHECK(!d.norm_exponent().has_value());
}

TEST_CASE("exact zero behaves as the additive identity") {
  PAdicNumber z = PAdicNumber::zero(ctx3());
  PAdicNumber a = PAdicNumber::from_integer(14, ctx3());
  CHECK(z.is_exact_zero());
  CHECK(z.valuation_lower_bound() == PAdicNumber::kInfiniteValuation);
  CHECK((a + z).valuation() == a.valuation());
  CHECK((z * a).is_exact_zero());
  CHECK_THROWS_AS(a / z, DivisionByZero);
  CHECK_THROWS_AS(z.inverse(), DivisionByZero);
}

TEST_CASE("from_parts validates the unit and round-trips") {
  PAdicNumber x = PAdicNumber::from_parts(ctx3(), -2, mpz_class(14), 5);
  CHECK(x.valuation() == -2);
  CHECK(x.known_digits() == 5);
  CHECK(x.digits(2) == std::vector<unsigned long>{2, 1});
  CHECK_THROWS_AS(PAdicNumber::from_parts(ctx3(), 0, mpz_class(9), 4),
                  DomainError);  // unit divisible by p
  CHECK_THROWS_AS(PAdicNumber::from_parts(ctx3(), 0, mpz_class(2), 0),
                  DomainError);
}

TEST_CASE("decide_norm_le answers yes, no, and unknown") {
  PAdicNumber nine = PAdicNumber::from_integer(9, ctx3());
  CHECK(decide_norm_le(nine, 2) == Decision::Yes);
  CHECK(decide_norm_le(nine, 3) == Decision::No);
  PAdicNumber ball = nine - nine;  // O(3^(64+2))
  const long b = ball.valuation_lower_bound();
  CHECK(decide_norm_le(ball, b) == Decision::Yes);
  CHECK(decide_norm_le(ball, b + 1) == Decision::Unknown);
  CHECK(decide_norm_le(PAdicNumber::zero(ctx3()), 1000000) == Decision::Yes);
}

TEST_CASE("eq_mod and in_Ep match hand values") {
  PAdicNumber four = PAdicNumber::from_integer(4, ctx3());
  PAdicNumber one = PAdicNumber::one(ctx3());
  CHECK(eq_mod(four, one, 1));
  CHECK(!eq_mod(four, one, 2));
  CHECK(in_Ep(four));
  CHECK(!in_Ep(PAdicNumber::from_integer(2, ctx3())));
  CHECK(in_Ep(one));
}

TEST_CASE("invert_unit matches the extended-euclid inverse") {
  std::mt19937_64 rng(7103);
  std::uniform_int_distribution<long> pick(2, 1000000);
  for (unsigned long p : {3ul, 7ul}) {
    PAdicContext ctx(p, 64);
    for (int trial = 0; trial < 30; ++trial) {
      mpz_class u = pick(rng);
      if (u % p == 0) continue;
      for (int k : {1, 7, 64}) {
        mpz_class got = invert_unit(u, ctx, k);
        mpz_class m = oracle::zpow(p, k);
        mpz_class want;
        mpz_invert(want.get_mpz_t(), u.get_mpz_t(), m.get_mpz_t());
        CHECK(got % m == want % m);
      }
    }
  }
}

TEST_CASE("shifted rescales by powers of p exactly") {
  PAdicNumber x = PAdicNumber::from_rational(mpq_class(5, 7), ctx3());
  CHECK(x.shifted(3).valuation() == x.valuation() + 3);
  CHECK(eq_mod(x.shifted(3), x * PAdicNumber::from_integer(27, ctx3()),
               3 + 64 - kVerifySlack));
  CHECK(x.shifted(-2).valuation() == x.valuation() - 2);
}

TEST_CASE("integer powers agree with repeated multiplication") {
  PAdicNumber x = PAdicNumber::from_rational(mpq_class(4, 5), ctx3());
  PAdicNumber m = PAdicNumber::one(ctx3());
  for (int e = 0; e <= 6; ++e) {
    CHECK(eq_mod(x.pow(e), m, 64 - kVerifySlack));
    m = m * x;
  }
  CHECK(eq_mod(x.pow(-2), (x * x).inverse(), 64 - kVerifySlack));
}

TEST_CASE("square root of 13 in Q_3 starts 1,2,1,0,0,1,2") {
  PAdicNumber thirteen = PAdicNumber::from_integer(13, ctx3());
  SqrtRoots r = sqrt(thirteen);
  auto digits = r.principal.digits(7);
  CHECK(digits == std::vector<unsigned long>{1, 2, 1, 0, 0, 1, 2});

  // Full-precision agreement with the naive digit-by-digit oracle.
  auto full = r.principal.digits(64);
  auto want = oracle::sqrt_mod(mpz_class(13), 3, 64, 1);
  REQUIRE(want.has_value());
  auto want_digits = oracle::digits_of(*want, 3, 64);
  CHECK(full == want_digits);

  CHECK(eq_mod(r.principal * r.principal, thirteen, 64 - kVerifySlack));
  CHECK(eq_mod(r.negated, -r.principal, 64 - kVerifySlack));
}

TEST_CASE("square roots of random squares recover the argument") {
  std::mt19937_64 rng(7104);
  for (unsigned long p : {3ul, 5ul, 7ul}) {
    ContextPtr ctx = PAdicContext::make(p, 64);
    for (int trial = 0; trial < 25; ++trial) {
      mpq_class r = random_rational(rng, p);
      mpq_class sq = r * r;
      PAdicNumber x = PAdicNumber::from_rational(sq, ctx);
      SqrtRoots roots = sqrt(x);
      const long m = x.valuation() + 64 - kVerifySlack;
      CHECK(eq_mod(roots.principal * roots.principal, x, m));
      // Principal branch pins the leading digit to the lower half-range.
      auto d = roots.principal.digits(1);
      CHECK(d[0] >= 1);
      CHECK(d[0] <= (p - 1) / 2);
    }
  }
}

TEST_CASE("square-root failures carry the failing clause") {
  ContextPtr c3 = ctx3();
  CHECK_THROWS_AS(sqrt(PAdicNumber::from_integer(3, c3)), NoSolution);
  CHECK_THROWS_AS(sqrt(PAdicNumber::from_integer(2, c3)), NoSolution);
  CHECK(sqrt_exists(PAdicNumber::from_integer(3, c3)).reason ==
        NoSolution::Reason::OddValuation);
  CHECK(sqrt_exists(PAdicNumber::from_integer(2, c3)).reason ==
        NoSolution::Reason::NonResidue);
  CHECK(sqrt_exists(PAdicNumber::from_integer(13, c3)).exists);

  ContextPtr c2 = PAdicContext::make(2, 64);
  CHECK(sqrt_exists(PAdicNumber::from_integer(17, c2)).exists);  // 1 mod 8
  CHECK(sqrt_exists(PAdicNumber::from_integer(3, c2)).reason ==
        NoSolution::Reason::TwoAdicDigits);
  CHECK_THROWS_AS(sqrt(PAdicNumber::zero(c3)), DomainError);
}

TEST_CASE("exp and log respect their convergence domains") {
  PAdicNumber unit = PAdicNumber::from_integer(2, ctx3());
  CHECK_THROWS_AS(exp_p(unit), DomainError);
  CHECK_THROWS_AS(log_p(unit), DomainError);  // |2-1| = 1, outside the ball

  ContextPtr c2 = PAdicContext::make(2, 32);
  PAdicNumber two = PAdicNumber::from_integer(2, c2);
  CHECK_THROWS_AS(exp_p(two), DomainError);  // p = 2 needs valuation >= 2
  CHECK(exp_p(PAdicNumber::from_integer(4, c2)).norm_exponent() == 0);
}

TEST_CASE("exp_3(3) matches its truncated series") {
  // Partial sums of sum 3^n / n! are exact rationals; by n = 30 the tail
  // is far below 3^12.
  mpq_class sum = 0;
  mpq_class term = 1;
  for (int k = 1; k <= 30; ++k) {
    sum += term;
    term *= mpq_class(3, k);
  }
  PAdicNumber want = PAdicNumber::from_rational(sum, ctx3());
  PAdicNumber got = exp_p(PAdicNumber::from_integer(3, ctx3()));
  CHECK(eq_mod(got, want, 12));
}

TEST_CASE("log_3(4) matches its truncated series") {
  mpq_class sum = 0;
  for (int k = 1; k <= 24; ++k) {
    mpq_class t(oracle::zpow(3, k));
    t /= k;
    if (k % 2 == 0) t = -t;
    sum += t;
  }
  PAdicNumber want = PAdicNumber::from_rational(sum, ctx3());
  PAdicNumber got = log_p(PAdicNumber::from_integer(4, ctx3()));
  CHECK(eq_mod(got, want, 12));
}

TEST_CASE("digit requests beyond the trusted range are refused") {
  PAdicNumber x = PAdicNumber::from_integer(7, ctx3());
  CHECK(x.known_digits() == 64);
  CHECK_THROWS_AS(x.digits(65), PrecisionExhausted);
  CHECK_NOTHROW(x.digits(64));
}

TEST_CASE("mixed contexts are rejected") {
  PAdicNumber a = PAdicNumber::from_integer(2, ctx3());
  PAdicNumber b = PAdicNumber::from_integer(2, PAdicContext::make(5, 64));
  CHECK_THROWS_AS(a + b, DomainError);
  CHECK_THROWS_AS(PAdicNumber{} + a, DomainError);
}
