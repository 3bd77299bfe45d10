#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "padtree/interaction.hpp"
#include "padtree/polynomial.hpp"
#include "padtree/tree.hpp"

namespace padtree {

// Assignment of a normalized (q-1)-vector z(x,y) to each directed edge; the
// q-th coordinate is the constant 1. `phantom` lists, per vertex, the values
// entering along edges that continue beyond the stored truncation (one
// entry per phantom neighbor); vertices without entries continue with
// all-ones, which contribute nothing.
struct BoundaryLawField {
  ContextPtr ctx;
  int q = 2;
  std::map<DirectedEdge, PVec> values;
  std::map<int, std::vector<PVec>> phantom;

  const PVec& value(const DirectedEdge& e) const;
  bool has(const DirectedEdge& e) const { return values.count(e) > 0; }
  const std::vector<PVec>& phantom_at(int v) const;

  // Coordinate i (1-based state, i <= q) of the vector on e.
  PAdicNumber coordinate(const DirectedEdge& e, int state) const;

  static BoundaryLawField all_ones(const ContextPtr& ctx, int q,
                                   const TreeGraph& tree);
  // Same vector on every directed edge. When the tree fixes a completion
  // degree, vertices of smaller degree receive phantom copies of the vector,
  // so constant laws stay exact on truncations.
  static BoundaryLawField constant(const ContextPtr& ctx, int q,
                                   const PVec& vec, const TreeGraph& tree);
};

// Sup-distance from the all-ones field as a valuation lower bound:
// min over edges and coordinates of the valuation of z_i - 1
// (kInfiniteValuation when indistinguishable from the all-ones field).
long distance_to_ones_valuation(const BoundaryLawField& law);

// Left side minus right side of the consistency equation at directed edge
// (x -> y), coordinates i = 1..q-1: z_i(x,y) - prod over v in d{x}\{y} of
//   K_i(v,x) = [1 + sum_j (z_j(v,x)-1) Q_(v,x)(j,i)] /
//              [1 + sum_j (z_j(v,x)-1) Q_(v,x)(j,q)].
// Phantom neighbors contribute via the stored continuation values.
PVec residual(const BoundaryLawField& z, const EdgeMatrixField& field,
              const TreeGraph& tree, const DirectedEdge& e);

// One synchronous application of the consistency map on every directed
// edge; truncation leaves contribute the fixed exterior value 1 (their
// product is empty).
BoundaryLawField iterate_map(const BoundaryLawField& z,
                             const EdgeMatrixField& field,
                             const TreeGraph& tree);

struct SolveLog {
  // Valuation lower bound of the sup-distance to all-ones, one entry per
  // completed iteration (entry 0 is the starting field).
  std::vector<long> distance_valuations;
  int iterations = 0;
  bool converged = false;
};

struct UniqueSolveResult {
  BoundaryLawField law;
  SolveLog log;
};

// Iterates the consistency map until the field is all-ones to working
// precision. Each step must gain at least one digit of proximity
// (contraction factor 1/p); NotContracting otherwise.
UniqueSolveResult solve_unique(const EdgeMatrixField& field,
                               const TreeGraph& tree,
                               const BoundaryLawField& z0, int max_iters);

// G(z) = 1 + sum_{j=1..k} C(k,j) (z b^j - a^j) (z-1)^(j-1); the non-trivial
// translation-invariant solutions are its roots.
Polynomial build_G(int k, const PAdicNumber& alpha, const PAdicNumber& beta);

// F(z) = z (1 - b + b z)^k - (1 - a + a z)^k = (z - 1) G(z).
Polynomial build_F(int k, const PAdicNumber& alpha, const PAdicNumber& beta);

struct HenselCertificate {
  int k = 1;
  PAdicNumber alpha;
  PAdicNumber beta;
  long gamma = 0;
  // Valuations of G(1) and G'(1); nullopt when the value is
  // indistinguishable from zero (valuation beyond precision).
  std::optional<long> vG1;
  std::optional<long> vGp1;
  bool valid = false;
  std::string detail;  // explanation when invalid
};

// Computes gamma = valuation(G'(1)) and checks valuation(G(1)) >= 2*gamma+1;
// also self-checks the factorization F = (z-1) G coefficientwise. The try_
// form reports failure in the record; the plain form throws NoCertificate
// (or PrecisionExhausted when the deciding valuation is out of reach).
HenselCertificate try_certificate(int k, const PAdicNumber& alpha,
                                  const PAdicNumber& beta);
HenselCertificate certificate(int k, const PAdicNumber& alpha,
                              const PAdicNumber& beta);

struct Root {
  PAdicNumber value;
  std::optional<bool> in_Ep;  // nullopt when undecidable at precision
  bool is_hensel = false;     // matches the Newton-lifted root near 1
  std::string origin;         // "trivial" | "closed-form" | "hensel"
};

struct RootReport {
  HenselCertificate cert;
  std::vector<Root> roots;
};

// All translation-invariant solutions this solver can certify: always z = 1;
// the Newton-lifted root when the certificate is valid; for k <= 2 every
// root of G by closed form (k = 2 may throw NoSolution for non-residue
// discriminants).
RootReport solve_translation_invariant(int k, const PAdicNumber& alpha,
                                       const PAdicNumber& beta);

// Block variant: same scalar equation with the block sums (A, B) in place
// of (alpha, beta); the scalar roots repeat over the first m coordinates.
RootReport solve_block(int k, int m, const PAdicNumber& a,
                       const PAdicNumber& b);

// Law vector (z, ..., z, 1, ..., 1) with m leading copies, as a
// (q-1)-vector.
PVec block_law_vector(const PAdicNumber& z, int m, int q);

// Law on a host tree containing an embedded order-k truncation:
//   z              on core edges,
//   1              when the tail lies outside the core,
//   z * g(z)       on crossing edges leaving the core,
// with g(z) = (1 - a + a z)/(1 - b + b z). Requires z = g(z)^k and the
// first-row matrix condition on crossing edges (ConditionViolated).
BoundaryLawField extend_to_general_tree(const TreeGraph& tree,
                                        const CayleyEmbedding& embedding,
                                        const PAdicNumber& z_root,
                                        const PAdicNumber& alpha,
                                        const PAdicNumber& beta,
                                        const EdgeMatrixField& field);

}  // namespace padtree
