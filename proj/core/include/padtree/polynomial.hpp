#pragma once

#include <vector>

#include "padtree/padic.hpp"

namespace padtree {

// Dense polynomial with Q_p coefficients; coefficient i multiplies z^i.
// Trailing exact-zero coefficients are trimmed on construction.
class Polynomial {
 public:
  Polynomial(ContextPtr ctx, std::vector<PAdicNumber> coefficients);

  static Polynomial zero(ContextPtr ctx);
  static Polynomial constant(const PAdicNumber& c);
  static Polynomial monomial(const PAdicNumber& c, int degree);
  static Polynomial from_integers(const std::vector<long>& coefficients,
                                  const ContextPtr& ctx);

  const ContextPtr& context() const { return ctx_; }
  // Degree of the trimmed representation; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<PAdicNumber>& coefficients() const { return coeffs_; }
  // Coefficient of z^i; exact zero beyond the stored degree.
  PAdicNumber coeff(int i) const;

  PAdicNumber eval(const PAdicNumber& x) const;
  Polynomial derivative() const;

  Polynomial operator+(const Polynomial& rhs) const;
  Polynomial operator-(const Polynomial& rhs) const;
  Polynomial operator*(const Polynomial& rhs) const;
  Polynomial scaled(const PAdicNumber& c) const;

  // True when every coefficient of the difference has valuation >= m or is
  // (precision-)zero with bound >= m.
  static bool congruent_mod(const Polynomial& a, const Polynomial& b, long m);

 private:
  ContextPtr ctx_;
  std::vector<PAdicNumber> coeffs_;

  void trim();
};

}  // namespace padtree
