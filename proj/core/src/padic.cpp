#include "padtree/padic.hpp"

#include <algorithm>
#include <sstream>

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

// Valuation of z (nonzero) at p; reduced receives z / p^result.
long remove_p(const mpz_class& z, unsigned long p, mpz_class& reduced) {
  mpz_class base(p);
  return static_cast<long>(
      mpz_remove(reduced.get_mpz_t(), z.get_mpz_t(), base.get_mpz_t()));
}

// Inverse of u modulo p^k by Newton doubling from the inverse modulo p.
mpz_class newton_invert(const mpz_class& u, const PAdicContext& ctx, int k) {
  mpz_class base(ctx.p());
  mpz_class w;
  mpz_class u0 = u % base;
  if (u0 < 0) u0 += base;
  if (mpz_invert(w.get_mpz_t(), u0.get_mpz_t(), base.get_mpz_t()) == 0) {
    throw DomainError("unit part divisible by p; cannot invert");
  }
  int j = 1;
  while (j < k) {
    j = std::min(2 * j, k);
    const mpz_class& pj = ctx.pow(j);
    w = w * (2 - u * w) % pj;
    if (w < 0) w += pj;
  }
  w %= ctx.pow(k);
  if (w < 0) w += ctx.pow(k);
  return w;
}

}  // namespace

mpz_class invert_unit(const mpz_class& u, const PAdicContext& ctx, int k) {
  if (k < 1 || k > ctx.precision()) {
    throw DomainError("inverse precision out of range");
  }
  return newton_invert(u, ctx, k);
}

bool is_prime_u64(unsigned long n) {
  if (n < 2) return false;
  static constexpr unsigned long kSmall[] = {2,  3,  5,  7,  11, 13,
                                             17, 19, 23, 29, 31, 37};
  for (unsigned long q : kSmall) {
    if (n % q == 0) return n == q;
  }
  unsigned long d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // Deterministic witness set for all 64-bit integers.
  for (unsigned long a : kSmall) {
    unsigned long x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PAdicContext::PAdicContext(unsigned long p, int precision_n)
    : p_(p), n_(precision_n) {
  if (precision_n < 1) {
    throw DomainError("precision must be >= 1, got " +
                      std::to_string(precision_n));
  }
  if (!is_prime_u64(p)) {
    throw DomainError("p must be prime, got " + std::to_string(p));
  }
  powers_.resize(n_ + 1);
  powers_[0] = 1;
  for (int e = 1; e <= n_; ++e) powers_[e] = powers_[e - 1] * p_;
}

const mpz_class& PAdicContext::pow(int e) const {
  if (e < 0 || e > n_) {
    throw DomainError("power of p outside cached range: " + std::to_string(e));
  }
  return powers_[e];
}

std::shared_ptr<const PAdicContext> PAdicContext::make(unsigned long p,
                                                       int precision_n) {
  return std::make_shared<const PAdicContext>(p, precision_n);
}

void PAdicNumber::require_valid() const {
  if (!ctx_) throw DomainError("use of default-constructed p-adic value");
}

void PAdicNumber::require_same_context(const PAdicNumber& a,
                                       const PAdicNumber& b) {
  a.require_valid();
  b.require_valid();
  if (a.ctx_ == b.ctx_) return;
  if (a.ctx_->p() != b.ctx_->p() ||
      a.ctx_->precision() != b.ctx_->precision()) {
    throw DomainError("mixed p-adic contexts in one operation");
  }
}

PAdicNumber PAdicNumber::zero(ContextPtr ctx) {
  if (!ctx) throw DomainError("null context");
  PAdicNumber r;
  r.ctx_ = std::move(ctx);
  r.kind_ = Kind::Zero;
  return r;
}

PAdicNumber PAdicNumber::zero_at(ContextPtr ctx, long valuation_lower_bound) {
  if (!ctx) throw DomainError("null context");
  PAdicNumber r;
  r.ctx_ = std::move(ctx);
  r.kind_ = Kind::Ball;
  r.val_ = valuation_lower_bound;
  return r;
}

PAdicNumber PAdicNumber::one(const ContextPtr& ctx) {
  return from_integer(1, ctx);
}

PAdicNumber PAdicNumber::from_integer(long value, const ContextPtr& ctx) {
  return from_mpz(mpz_class(value), ctx);
}

PAdicNumber PAdicNumber::from_mpz(const mpz_class& value,
                                  const ContextPtr& ctx) {
  if (!ctx) throw DomainError("null context");
  if (value == 0) return zero(ctx);
  mpz_class reduced;
  long val = remove_p(value, ctx->p(), reduced);
  const int n = ctx->precision();
  mpz_class u = reduced % ctx->pow(n);
  if (u < 0) u += ctx->pow(n);
  return from_parts(ctx, val, std::move(u), n);
}

PAdicNumber PAdicNumber::from_rational(const mpq_class& value,
                                       const ContextPtr& ctx) {
  if (!ctx) throw DomainError("null context");
  mpq_class v(value);
  v.canonicalize();
  if (v == 0) return zero(ctx);
  mpz_class nred, dred;
  long a = remove_p(v.get_num(), ctx->p(), nred);
  long b = remove_p(v.get_den(), ctx->p(), dred);
  const int n = ctx->precision();
  mpz_class u = nred % ctx->pow(n);
  if (u < 0) u += ctx->pow(n);
  u = u * newton_invert(dred, *ctx, n) % ctx->pow(n);
  return from_parts(ctx, a - b, std::move(u), n);
}

PAdicNumber PAdicNumber::from_rational(long num, long den,
                                       const ContextPtr& ctx) {
  if (den == 0) throw DomainError("rational with zero denominator");
  return from_rational(mpq_class(mpz_class(num), mpz_class(den)), ctx);
}

PAdicNumber PAdicNumber::from_parts(ContextPtr ctx, long valuation,
                                    mpz_class unit, int known_digits) {
  if (!ctx) throw DomainError("null context");
  if (known_digits < 1 || known_digits > ctx->precision()) {
    throw DomainError("known_digits out of range: " +
                      std::to_string(known_digits));
  }
  unit %= ctx->pow(known_digits);
  if (unit < 0) unit += ctx->pow(known_digits);
  if (unit == 0 || mpz_divisible_ui_p(unit.get_mpz_t(), ctx->p())) {
    throw DomainError("unit part must be nonzero and coprime to p");
  }
  PAdicNumber r;
  r.ctx_ = std::move(ctx);
  r.kind_ = Kind::Nonzero;
  r.val_ = valuation;
  r.unit_ = std::move(unit);
  r.known_ = known_digits;
  return r;
}

long PAdicNumber::valuation() const {
  require_valid();
  switch (kind_) {
    case Kind::Nonzero:
      return val_;
    case Kind::Ball:
      throw PrecisionExhausted(
          "valuation known only as a lower bound (>= " + std::to_string(val_) +
          ") for a value indistinguishable from zero");
    case Kind::Zero:
      throw DomainError("exact zero has no finite valuation");
  }
  throw DomainError("corrupt value");
}

long PAdicNumber::valuation_lower_bound() const {
  require_valid();
  switch (kind_) {
    case Kind::Nonzero:
    case Kind::Ball:
      return val_;
    case Kind::Zero:
      return kInfiniteValuation;
  }
  throw DomainError("corrupt value");
}

std::optional<long> PAdicNumber::norm_exponent() const {
  require_valid();
  if (kind_ == Kind::Nonzero) return -val_;
  return std::nullopt;
}

const mpz_class& PAdicNumber::unit() const {
  require_valid();
  if (kind_ != Kind::Nonzero) {
    throw DomainError("zero value has no unit part");
  }
  return unit_;
}

std::vector<unsigned long> PAdicNumber::digits(int n) const {
  require_valid();
  if (n < 0) throw DomainError("negative digit count");
  if (kind_ != Kind::Nonzero) {
    throw PrecisionExhausted(
        "no canonical digits: value is indistinguishable from zero");
  }
  if (n > known_) {
    throw PrecisionExhausted("requested " + std::to_string(n) +
                             " digits but only " + std::to_string(known_) +
                             " are trusted");
  }
  std::vector<unsigned long> out;
  out.reserve(n);
  mpz_class t = unit_;
  for (int i = 0; i < n; ++i) {
    out.push_back(mpz_fdiv_q_ui(t.get_mpz_t(), t.get_mpz_t(), ctx_->p()));
  }
  return out;
}

PAdicNumber PAdicNumber::operator-() const {
  require_valid();
  if (kind_ != Kind::Nonzero) return *this;
  PAdicNumber r(*this);
  r.unit_ = ctx_->pow(known_) - unit_;
  return r;
}

PAdicNumber PAdicNumber::operator+(const PAdicNumber& rhs) const {
  require_same_context(*this, rhs);
  const PAdicNumber& x = *this;
  const PAdicNumber& y = rhs;
  if (x.kind_ == Kind::Zero) return y;
  if (y.kind_ == Kind::Zero) return x;
  if (x.kind_ == Kind::Ball && y.kind_ == Kind::Ball) {
    return zero_at(ctx_, std::min(x.val_, y.val_));
  }
  if (x.kind_ == Kind::Ball || y.kind_ == Kind::Ball) {
    const PAdicNumber& nz = (x.kind_ == Kind::Nonzero) ? x : y;
    const long bound = (x.kind_ == Kind::Ball) ? x.val_ : y.val_;
    if (nz.val_ >= bound) return zero_at(ctx_, bound);
    const int keep =
        std::min<long>(nz.known_, bound - nz.val_);  // >= 1 here
    mpz_class u = nz.unit_ % ctx_->pow(keep);
    return from_parts(ctx_, nz.val_, std::move(u), static_cast<int>(keep));
  }
  // Both nonzero. Trust floor A: both operands are known modulo p^A.
  const long a = std::min(x.val_ + x.known_, y.val_ + y.known_);
  const long m = std::min(x.val_, y.val_);
  const long window = a - m;  // in [1, N]
  const mpz_class& pw = ctx_->pow(static_cast<int>(window));
  mpz_class s = 0;
  if (x.val_ - m < window) s += x.unit_ * ctx_->pow(static_cast<int>(x.val_ - m));
  if (y.val_ - m < window) s += y.unit_ * ctx_->pow(static_cast<int>(y.val_ - m));
  s %= pw;
  if (s < 0) s += pw;
  if (s == 0) return zero_at(ctx_, a);
  mpz_class reduced;
  const long t = remove_p(s, ctx_->p(), reduced);
  const long val = m + t;
  const int keep = static_cast<int>(
      std::min<long>(ctx_->precision(), window - t));  // >= 1 since s != 0
  return from_parts(ctx_, val, std::move(reduced), keep);
}

PAdicNumber PAdicNumber::operator-(const PAdicNumber& rhs) const {
  return *this + (-rhs);
}

PAdicNumber PAdicNumber::operator*(const PAdicNumber& rhs) const {
  require_same_context(*this, rhs);
  const PAdicNumber& x = *this;
  const PAdicNumber& y = rhs;
  if (x.kind_ == Kind::Zero || y.kind_ == Kind::Zero) return zero(ctx_);
  if (x.kind_ == Kind::Ball || y.kind_ == Kind::Ball) {
    return zero_at(ctx_, x.val_ + y.val_);  // bound adds against exact/low bound
  }
  const int keep = std::min(x.known_, y.known_);
  mpz_class u = x.unit_ * y.unit_ % ctx_->pow(keep);
  return from_parts(ctx_, x.val_ + y.val_, std::move(u), keep);
}

PAdicNumber PAdicNumber::operator/(const PAdicNumber& rhs) const {
  require_same_context(*this, rhs);
  if (rhs.kind_ == Kind::Zero) throw DivisionByZero("division by exact zero");
  if (rhs.kind_ == Kind::Ball) {
    throw DivisionByZero(
        "division by a value indistinguishable from zero at precision");
  }
  if (kind_ == Kind::Zero) return zero(ctx_);
  if (kind_ == Kind::Ball) return zero_at(ctx_, val_ - rhs.val_);
  const int keep = std::min(known_, rhs.known_);
  mpz_class u = unit_ * newton_invert(rhs.unit_, *ctx_, keep) % ctx_->pow(keep);
  return from_parts(ctx_, val_ - rhs.val_, std::move(u), keep);
}

PAdicNumber PAdicNumber::inverse() const {
  require_valid();
  return one(ctx_) / *this;
}

PAdicNumber PAdicNumber::pow(long exponent) const {
  require_valid();
  if (exponent < 0) return inverse().pow(-exponent);
  PAdicNumber acc = one(ctx_);
  PAdicNumber base = *this;
  unsigned long e = static_cast<unsigned long>(exponent);
  while (e) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return acc;
}

PAdicNumber PAdicNumber::shifted(long shift) const {
  require_valid();
  if (kind_ == Kind::Zero) return *this;
  PAdicNumber r(*this);
  r.val_ += shift;
  return r;
}

std::string PAdicNumber::describe() const {
  require_valid();
  std::ostringstream os;
  switch (kind_) {
    case Kind::Zero:
      os << "0";
      break;
    case Kind::Ball:
      os << "O(" << ctx_->p() << "^" << val_ << ")";
      break;
    case Kind::Nonzero:
      os << ctx_->p() << "^(" << val_ << ")*" << unit_.get_str() << " ["
         << known_ << " digits]";
      break;
  }
  return os.str();
}

PAdicNumber add(const PAdicNumber& x, const PAdicNumber& y) { return x + y; }
PAdicNumber sub(const PAdicNumber& x, const PAdicNumber& y) { return x - y; }
PAdicNumber mul(const PAdicNumber& x, const PAdicNumber& y) { return x * y; }
PAdicNumber div(const PAdicNumber& x, const PAdicNumber& y) { return x / y; }
std::optional<long> norm_exponent(const PAdicNumber& x) {
  return x.norm_exponent();
}

Decision decide_norm_le(const PAdicNumber& x, long e) {
  if (x.is_exact_zero()) return Decision::Yes;
  if (x.is_ball()) {
    return x.valuation_lower_bound() >= e ? Decision::Yes : Decision::Unknown;
  }
  return x.valuation() >= e ? Decision::Yes : Decision::No;
}

bool in_Ep(const PAdicNumber& x) {
  const PAdicNumber d = x - PAdicNumber::one(x.context());
  switch (decide_norm_le(d, 1)) {
    case Decision::Yes:
      return true;
    case Decision::No:
      return false;
    case Decision::Unknown:
      break;
  }
  throw PrecisionExhausted("cannot decide |x-1|_p <= 1/p at precision");
}

bool eq_mod(const PAdicNumber& x, const PAdicNumber& y, long m) {
  switch (decide_norm_le(x - y, m)) {
    case Decision::Yes:
      return true;
    case Decision::No:
      return false;
    case Decision::Unknown:
      break;
  }
  throw PrecisionExhausted("cannot decide congruence modulo p^" +
                           std::to_string(m) + " at precision");
}

}  // namespace padtree
