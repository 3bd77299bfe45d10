#include "padtree/analysis.hpp"

#include <algorithm>

namespace padtree {

namespace {

unsigned long mulmod_u64(unsigned long a, unsigned long b, unsigned long m) {
  return static_cast<unsigned long>(static_cast<__uint128_t>(a) * b % m);
}

unsigned long powmod_u64(unsigned long a, unsigned long e, unsigned long m) {
  unsigned long r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_qr_mod_p(unsigned long a, unsigned long p) {
  return powmod_u64(a, (p - 1) / 2, p) == 1;  // Euler criterion, p odd
}

// Square root of the residue a modulo the odd prime p (a assumed a QR).
unsigned long sqrt_mod_p(unsigned long a, unsigned long p) {
  if (p % 4 == 3) return powmod_u64(a, (p + 1) / 4, p);
  unsigned long q = p - 1;
  unsigned long s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  unsigned long z = 2;
  while (is_qr_mod_p(z, p)) ++z;  // smallest non-residue, deterministic
  unsigned long m = s;
  unsigned long c = powmod_u64(z, q, p);
  unsigned long t = powmod_u64(a, q, p);
  unsigned long r = powmod_u64(a, (q + 1) / 2, p);
  while (t != 1) {
    unsigned long i = 0;
    unsigned long tt = t;
    while (tt != 1) {
      tt = mulmod_u64(tt, tt, p);
      ++i;
    }
    unsigned long b = c;
    for (unsigned long j = 0; j + i + 1 < m; ++j) b = mulmod_u64(b, b, p);
    m = i;
    c = mulmod_u64(b, b, p);
    t = mulmod_u64(t, c, p);
    r = mulmod_u64(r, b, p);
  }
  return r;
}

// Lifts r0 (a root of u modulo p) to a root of u modulo p^k, p odd.
mpz_class lift_sqrt_odd(const mpz_class& u, unsigned long r0,
                        const PAdicContext& ctx, int k) {
  mpz_class r(r0);
  int j = 1;
  while (j < k) {
    j = std::min(2 * j, k);
    const mpz_class& pj = ctx.pow(j);
    mpz_class rinv = invert_unit(r, ctx, j);
    r = (r + u * rinv) % pj;
    r = r * invert_unit(mpz_class(2), ctx, j) % pj;
    if (r < 0) r += pj;
  }
  return r;
}

// Bitwise lift at p = 2: root of u modulo 2^k with r = 1 mod 4.
mpz_class lift_sqrt_two(const mpz_class& u, const PAdicContext& ctx, int k) {
  mpz_class r(1);
  for (int j = 3; j < k; ++j) {
    mpz_class t = (r * r - u) % ctx.pow(j + 1);
    if (t < 0) t += ctx.pow(j + 1);
    t /= ctx.pow(j);
    if (mpz_odd_p(t.get_mpz_t())) r += ctx.pow(j - 1);
  }
  return r % ctx.pow(k);
}

std::optional<NoSolution::Reason> sqrt_obstruction(const PAdicNumber& a) {
  if (a.valuation() % 2 != 0) return NoSolution::Reason::OddValuation;
  const ContextPtr& ctx = a.context();
  if (ctx->p() == 2) {
    if (a.known_digits() < 3) {
      throw PrecisionExhausted(
          "square root at p=2 needs at least 3 trusted digits");
    }
    mpz_class m8 = a.unit() % 8;
    if (m8 != 1) return NoSolution::Reason::TwoAdicDigits;
    return std::nullopt;
  }
  const unsigned long d0 =
      mpz_fdiv_ui(a.unit().get_mpz_t(), ctx->p());
  if (!is_qr_mod_p(d0, ctx->p())) return NoSolution::Reason::NonResidue;
  return std::nullopt;
}

long floor_log_p(unsigned long p, long n) {
  long t = 0;
  while (n >= static_cast<long>(p)) {
    n /= static_cast<long>(p);
    ++t;
  }
  return t;
}

}  // namespace

SqrtCheck sqrt_exists(const PAdicNumber& a) {
  if (a.is_zero()) {
    throw DomainError("square root requires a value nonzero at precision");
  }
  auto reason = sqrt_obstruction(a);
  return SqrtCheck{!reason.has_value(), reason};
}

SqrtRoots sqrt(const PAdicNumber& a) {
  if (a.is_zero()) {
    throw DomainError("square root requires a value nonzero at precision");
  }
  if (auto reason = sqrt_obstruction(a)) {
    switch (*reason) {
      case NoSolution::Reason::OddValuation:
        throw NoSolution(*reason, "no square root: valuation " +
                                      std::to_string(a.valuation()) +
                                      " is odd");
      case NoSolution::Reason::NonResidue:
        throw NoSolution(*reason,
                         "no square root: leading digit is not a quadratic "
                         "residue mod p");
      case NoSolution::Reason::TwoAdicDigits:
        throw NoSolution(*reason,
                         "no square root: unit part is not 1 modulo 8");
    }
  }
  const ContextPtr& ctx = a.context();
  const long half_val = a.valuation() / 2;
  const int k = a.known_digits();
  mpz_class root_unit;
  int root_known = k;
  if (ctx->p() == 2) {
    root_unit = lift_sqrt_two(a.unit(), *ctx, k);
    root_known = std::max(1, k - 1);
    root_unit %= ctx->pow(root_known);
  } else {
    const unsigned long d0 = mpz_fdiv_ui(a.unit().get_mpz_t(), ctx->p());
    unsigned long r0 = sqrt_mod_p(d0, ctx->p());
    root_unit = lift_sqrt_odd(a.unit(), r0, *ctx, k);
    // Principal convention: leading digit in the lower half.
    const unsigned long lead = mpz_fdiv_ui(root_unit.get_mpz_t(), ctx->p());
    if (lead > (ctx->p() - 1) / 2) root_unit = ctx->pow(k) - root_unit;
  }
  PAdicNumber principal =
      PAdicNumber::from_parts(ctx, half_val, root_unit, root_known);
  return SqrtRoots{principal, -principal};
}

PAdicNumber hensel_lift(const HenselInput& input) {
  const ContextPtr& ctx = input.F.context();
  const int n = ctx->precision();
  if (input.gamma < 0) throw DomainError("gamma must be >= 0");
  if (2 * input.gamma + 1 >= n) {
    throw PrecisionExhausted(
        "precision too small to separate the lifted root: need N > 2*gamma+1");
  }
  for (const PAdicNumber& c : input.F.coefficients()) {
    if (!c.is_zero() && c.valuation() < 0) {
      throw DomainError("lifting requires p-adic integer coefficients");
    }
  }
  if (input.a0.is_zero()) {
    if (!input.a0.is_exact_zero() && input.a0.valuation_lower_bound() < 0) {
      throw DomainError("a0 must be a p-adic integer");
    }
  } else if (input.a0.valuation() < 0) {
    throw DomainError("a0 must be a p-adic integer");
  }

  const PAdicNumber fa0 = input.F.eval(input.a0);
  if (decide_norm_le(fa0, 2 * input.gamma + 1) != Decision::Yes) {
    throw CertificateViolation(
        "F(a0) is not 0 modulo p^(2*gamma+1): F(a0) = " + fa0.describe());
  }
  const Polynomial fp = input.F.derivative();
  const PAdicNumber fpa0 = fp.eval(input.a0);
  if (fpa0.is_zero()) {
    throw PrecisionExhausted(
        "valuation of F'(a0) undecidable at precision: " + fpa0.describe());
  }
  if (fpa0.valuation() != input.gamma) {
    throw CertificateViolation(
        "valuation of F'(a0) is " + std::to_string(fpa0.valuation()) +
        ", certificate requires exactly gamma = " +
        std::to_string(input.gamma));
  }

  // The preconditions force integer coefficients, so the whole iteration
  // runs on exact integer representatives modulo p^A, where A is the joint
  // absolute precision of the inputs (at most N + gamma, so the packaged
  // root carries at most N digits). Working on representatives avoids the
  // per-step digit erosion of dividing tracked values by F'(a): the gamma
  // digits lost to the derivative are paid once, in the final digit count.
  const long g = input.gamma;
  auto absolute_precision = [](const PAdicNumber& x) -> long {
    if (x.is_exact_zero()) return PAdicNumber::kInfiniteValuation;
    if (x.is_ball()) return x.valuation_lower_bound();
    return x.valuation() + x.known_digits();
  };
  long trust = static_cast<long>(n) + g;
  for (const PAdicNumber& c : input.F.coefficients()) {
    trust = std::min(trust, absolute_precision(c));
  }
  trust = std::min(trust, absolute_precision(input.a0));
  if (trust <= 2 * g + 1) {
    throw PrecisionExhausted(
        "inputs carry too few digits to lift: absolute precision " +
        std::to_string(trust));
  }

  const mpz_class pz(ctx->p());
  auto power = [&](long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), pz.get_mpz_t(), static_cast<unsigned long>(e));
    return r;
  };
  const mpz_class modulus = power(trust);
  auto representative = [&](const PAdicNumber& x) -> mpz_class {
    if (x.is_zero()) return mpz_class(0);
    mpz_class r = x.unit() * power(x.valuation());
    r %= modulus;
    if (r < 0) r += modulus;
    return r;
  };
  std::vector<mpz_class> coeff;
  for (const PAdicNumber& c : input.F.coefficients()) {
    coeff.push_back(representative(c));
  }
  std::vector<mpz_class> dcoeff;
  for (std::size_t i = 1; i < coeff.size(); ++i) {
    dcoeff.push_back(coeff[i] * static_cast<long>(i) % modulus);
  }
  auto eval_mod = [&](const std::vector<mpz_class>& cs, const mpz_class& at) {
    mpz_class acc = 0;
    for (auto it = cs.rbegin(); it != cs.rend(); ++it) {
      acc = (acc * at + *it) % modulus;
    }
    if (acc < 0) acc += modulus;
    return acc;
  };

  const mpz_class pg = power(g);
  mpz_class a = representative(input.a0);
  bool settled = false;
  for (int iter = 0; iter < 4 * n + 8 && !settled; ++iter) {
    mpz_class fa = eval_mod(coeff, a);
    if (fa == 0) {
      settled = true;
      break;
    }
    mpz_class fpa = eval_mod(dcoeff, a);
    // a stays congruent to a0 mod p^(g+1), so F'(a) keeps exact valuation
    // g; its unit cofactor is invertible mod p^(trust - g).
    if (fpa % pg != 0) {
      throw Error("derivative lost its certified valuation during lifting");
    }
    mpz_class fpa_unit = fpa / pg;
    if (fpa_unit % pz == 0) {
      throw Error("derivative lost its certified valuation during lifting");
    }
    mpz_class u_inv =
        invert_unit(fpa_unit, *ctx, static_cast<int>(trust - g));
    mpz_class correction = (fa / pg) % modulus * u_inv % modulus;
    a = (a - correction) % modulus;
    if (a < 0) a += modulus;
  }
  if (!settled) throw Error("Newton lifting failed to converge");

  // The root is determined mod p^(trust - g): one division by the
  // derivative relates root error to residual error.
  const long root_absolute = trust - g;
  mpz_class reduced = a % power(root_absolute);
  if (reduced == 0) return PAdicNumber::zero_at(ctx, root_absolute);
  mpz_class unit;
  const long v = static_cast<long>(mpz_remove(
      unit.get_mpz_t(), reduced.get_mpz_t(), pz.get_mpz_t()));
  const int known = static_cast<int>(
      std::min<long>(root_absolute - v, static_cast<long>(n)));
  unit %= ctx->pow(known);
  return PAdicNumber::from_parts(ctx, v, unit, known);
}

PAdicNumber exp_p(const PAdicNumber& x) {
  const ContextPtr& ctx = x.context();
  const long vmin = (ctx->p() == 2) ? 2 : 1;
  if (x.is_exact_zero()) return PAdicNumber::one(ctx);
  if (x.is_ball()) {
    if (x.valuation_lower_bound() < vmin) {
      throw DomainError("exp argument outside the convergence ball");
    }
    // |exp(x) - 1| = |x|, so only the bound survives.
    return PAdicNumber::one(ctx) +
           PAdicNumber::zero_at(ctx, x.valuation_lower_bound());
  }
  const long v = x.valuation();
  if (v < vmin) {
    throw DomainError("exp argument outside the convergence ball: valuation " +
                      std::to_string(v));
  }
  const long n = ctx->precision();
  const long pm1 = static_cast<long>(ctx->p()) - 1;
  PAdicNumber acc = PAdicNumber::one(ctx);
  PAdicNumber term = PAdicNumber::one(ctx);
  for (long i = 1;; ++i) {
    // Every term from index i on has valuation >= i*v - (i-1)/(p-1).
    if (i * v * pm1 - (i - 1) >= n * pm1) break;
    term = term * x / PAdicNumber::from_integer(i, ctx);
    acc = acc + term;
    if (i > 64 * n + 64) throw Error("exp series failed to terminate");
  }
  return acc;
}

PAdicNumber log_p(const PAdicNumber& x) {
  const ContextPtr& ctx = x.context();
  const long vmin = (ctx->p() == 2) ? 2 : 1;
  const PAdicNumber t = x - PAdicNumber::one(ctx);
  if (t.is_exact_zero()) return PAdicNumber::zero(ctx);
  if (t.is_ball()) {
    if (t.valuation_lower_bound() < vmin) {
      throw DomainError("log argument outside the convergence ball");
    }
    return PAdicNumber::zero_at(ctx, t.valuation_lower_bound());
  }
  const long v = t.valuation();
  if (v < vmin) {
    throw DomainError("log argument outside the convergence ball: |x-1| too "
                      "large, valuation " +
                      std::to_string(v));
  }
  const long n = ctx->precision();
  PAdicNumber acc = PAdicNumber::zero(ctx);
  PAdicNumber power = PAdicNumber::one(ctx);
  for (long i = 1;; ++i) {
    // Terms from index i on have valuation >= i*v - log_p(i), increasing.
    if (i * v - floor_log_p(ctx->p(), i) >= n + 1) break;
    power = power * t;
    PAdicNumber term = power / PAdicNumber::from_integer(i, ctx);
    acc = (i % 2 == 1) ? acc + term : acc - term;
    if (i > 64 * n + 64) throw Error("log series failed to terminate");
  }
  return acc;
}

PVec linear_solve(const PMat& m, const PVec& b) {
  const std::size_t n = m.size();
  if (n == 0 || n > 64) {
    throw DomainError("linear solve dimension must be between 1 and 64");
  }
  if (b.size() != n) throw DomainError("right-hand side size mismatch");
  for (const auto& row : m) {
    if (row.size() != n) throw DomainError("matrix is not square");
  }
  const ContextPtr& ctx = m[0][0].context();

  PMat a = m;
  PVec rhs = b;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = n;
    long best_val = PAdicNumber::kInfiniteValuation;
    for (std::size_t row = col; row < n; ++row) {
      if (a[row][col].is_zero()) continue;
      const long v = a[row][col].valuation();
      if (v < best_val) {
        best_val = v;
        best = row;
      }
    }
    if (best == n) {
      throw SingularAtPrecision(
          "no pivot of decidable nonzero norm in column " +
          std::to_string(col));
    }
    std::swap(a[best], a[col]);
    std::swap(rhs[best], rhs[col]);
    for (std::size_t row = col + 1; row < n; ++row) {
      if (a[row][col].is_exact_zero()) continue;
      const PAdicNumber factor = a[row][col] / a[col][col];
      for (std::size_t j = col; j < n; ++j) {
        a[row][j] = a[row][j] - factor * a[col][j];
      }
      rhs[row] = rhs[row] - factor * rhs[col];
    }
  }

  PVec sol(n, PAdicNumber::zero(ctx));
  for (std::size_t row = n; row-- > 0;) {
    PAdicNumber acc = rhs[row];
    for (std::size_t j = row + 1; j < n; ++j) {
      acc = acc - a[row][j] * sol[j];
    }
    sol[row] = acc / a[row][row];
  }

  // Residual target scales with the row magnitudes: entries or solution
  // coordinates below valuation 0 lower the provable cancellation floor by
  // exactly their excess, so the check stays at full strength for integer
  // systems without rejecting honestly-solved fractional ones.
  for (std::size_t i = 0; i < n; ++i) {
    long row_floor = 0;
    auto see = [&](long v) { row_floor = std::min(row_floor, v); };
    see(b[i].valuation_lower_bound());
    for (std::size_t j = 0; j < n; ++j) {
      see(m[i][j].valuation_lower_bound() + sol[j].valuation_lower_bound());
    }
    const long target = ctx->precision() - kVerifySlack + row_floor;
    PAdicNumber r = -b[i];
    for (std::size_t j = 0; j < n; ++j) r = r + m[i][j] * sol[j];
    switch (decide_norm_le(r, target)) {
      case Decision::Yes:
        break;
      case Decision::No:
        throw Error("linear solve residual is decisively nonzero: " +
                    r.describe());
      case Decision::Unknown:
        throw PrecisionExhausted(
            "linear solve residual not verifiable at working precision");
    }
  }
  return sol;
}

}  // namespace padtree
