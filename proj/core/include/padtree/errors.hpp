#pragma once

#include <stdexcept>
#include <string>

namespace padtree {

// Base of every error thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A result would carry fewer than one trusted digit, or a comparison cannot
// be decided with the digits at hand.
struct PrecisionExhausted : Error {
  using Error::Error;
};

// Division by exact zero or by a value indistinguishable from zero.
struct DivisionByZero : Error {
  using Error::Error;
};

// Argument outside the domain of the operation (convergence ball, bad prime,
// mismatched contexts, malformed input value).
struct DomainError : Error {
  using Error::Error;
};

// Square root does not exist; reason records which existence clause failed.
struct NoSolution : Error {
  enum class Reason { OddValuation, NonResidue, TwoAdicDigits };
  Reason reason;
  NoSolution(Reason r, const std::string& what) : Error(what), reason(r) {}
};

// Hensel preconditions were checked and do not hold.
struct CertificateViolation : Error {
  using Error::Error;
};

// No valid lifting certificate exists for the requested parameters.
struct NoCertificate : Error {
  using Error::Error;
};

// Linear system has no pivot of decidable nonzero norm.
struct SingularAtPrecision : Error {
  using Error::Error;
};

// Configured size cap exceeded (tree construction, cylinder enumeration).
struct ResourceLimit : Error {
  using Error::Error;
};

// No subtree matching the requested regular-tree truncation exists.
struct NoEmbedding : Error {
  using Error::Error;
};

// An iteration step failed the contraction bound its preconditions promise.
struct NotContracting : Error {
  using Error::Error;
};

// A structural matrix condition required by a construction does not hold.
struct ConditionViolated : Error {
  using Error::Error;
};

// A classifier hypothesis assumed by a witness construction fails on the way.
struct HypothesisViolated : Error {
  using Error::Error;
};

// Malformed input document (JSON, expression, rational literal).
struct ParseError : Error {
  using Error::Error;
};

// Requested combination of options has no applicable solver.
struct Unsupported : Error {
  using Error::Error;
};

}  // namespace padtree
