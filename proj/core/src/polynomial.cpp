#include "padtree/polynomial.hpp"

#include <algorithm>

namespace padtree {

Polynomial::Polynomial(ContextPtr ctx, std::vector<PAdicNumber> coefficients)
    : ctx_(std::move(ctx)), coeffs_(std::move(coefficients)) {
  if (!ctx_) throw DomainError("null context");
  for (const PAdicNumber& c : coeffs_) {
    if (!c.valid() || c.context()->p() != ctx_->p() ||
        c.context()->precision() != ctx_->precision()) {
      throw DomainError("polynomial coefficient from a different context");
    }
  }
  trim();
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_exact_zero()) coeffs_.pop_back();
}

Polynomial Polynomial::zero(ContextPtr ctx) {
  return Polynomial(std::move(ctx), {});
}

Polynomial Polynomial::constant(const PAdicNumber& c) {
  return Polynomial(c.context(), {c});
}

Polynomial Polynomial::monomial(const PAdicNumber& c, int degree) {
  if (degree < 0) throw DomainError("negative monomial degree");
  std::vector<PAdicNumber> cs(degree + 1, PAdicNumber::zero(c.context()));
  cs[degree] = c;
  return Polynomial(c.context(), std::move(cs));
}

Polynomial Polynomial::from_integers(const std::vector<long>& coefficients,
                                     const ContextPtr& ctx) {
  std::vector<PAdicNumber> cs;
  cs.reserve(coefficients.size());
  for (long c : coefficients) cs.push_back(PAdicNumber::from_integer(c, ctx));
  return Polynomial(ctx, std::move(cs));
}

PAdicNumber Polynomial::coeff(int i) const {
  if (i < 0) throw DomainError("negative coefficient index");
  if (i >= static_cast<int>(coeffs_.size())) return PAdicNumber::zero(ctx_);
  return coeffs_[i];
}

PAdicNumber Polynomial::eval(const PAdicNumber& x) const {
  PAdicNumber acc = PAdicNumber::zero(ctx_);
  for (int i = degree(); i >= 0; --i) {
    acc = acc * x + coeffs_[i];
  }
  return acc;
}

Polynomial Polynomial::derivative() const {
  std::vector<PAdicNumber> cs;
  for (int i = 1; i <= degree(); ++i) {
    cs.push_back(coeffs_[i] * PAdicNumber::from_integer(i, ctx_));
  }
  return Polynomial(ctx_, std::move(cs));
}

Polynomial Polynomial::operator+(const Polynomial& rhs) const {
  const int n = std::max(degree(), rhs.degree());
  std::vector<PAdicNumber> cs;
  cs.reserve(n + 1);
  for (int i = 0; i <= n; ++i) cs.push_back(coeff(i) + rhs.coeff(i));
  return Polynomial(ctx_, std::move(cs));
}

Polynomial Polynomial::operator-(const Polynomial& rhs) const {
  const int n = std::max(degree(), rhs.degree());
  std::vector<PAdicNumber> cs;
  cs.reserve(n + 1);
  for (int i = 0; i <= n; ++i) cs.push_back(coeff(i) - rhs.coeff(i));
  return Polynomial(ctx_, std::move(cs));
}

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
  if (degree() < 0 || rhs.degree() < 0) return zero(ctx_);
  std::vector<PAdicNumber> cs(degree() + rhs.degree() + 1,
                              PAdicNumber::zero(ctx_));
  for (int i = 0; i <= degree(); ++i) {
    for (int j = 0; j <= rhs.degree(); ++j) {
      cs[i + j] = cs[i + j] + coeffs_[i] * rhs.coeffs_[j];
    }
  }
  return Polynomial(ctx_, std::move(cs));
}

Polynomial Polynomial::scaled(const PAdicNumber& c) const {
  std::vector<PAdicNumber> cs;
  cs.reserve(coeffs_.size());
  for (const PAdicNumber& x : coeffs_) cs.push_back(x * c);
  return Polynomial(ctx_, std::move(cs));
}

bool Polynomial::congruent_mod(const Polynomial& a, const Polynomial& b,
                               long m) {
  const int n = std::max(a.degree(), b.degree());
  for (int i = 0; i <= n; ++i) {
    if (decide_norm_le(a.coeff(i) - b.coeff(i), m) != Decision::Yes) {
      return false;
    }
  }
  return true;
}

}  // namespace padtree
