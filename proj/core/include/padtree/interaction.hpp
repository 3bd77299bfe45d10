#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "padtree/analysis.hpp"
#include "padtree/tree.hpp"

namespace padtree {

// q x q matrix of edge weights over Q_p. The checked constructor enforces
// the standing normalization: every column sums to 1. Indices are 0-based
// in code; states are numbered 1..q at API boundaries.
class InteractionMatrix {
 public:
  InteractionMatrix(ContextPtr ctx, PMat entries);

  // Skips the column-sum normalization (used by the boundedness classifier,
  // which studies arbitrary weight matrices).
  static InteractionMatrix unchecked(ContextPtr ctx, PMat entries);

  const ContextPtr& context() const { return ctx_; }
  int q() const { return q_; }
  const PAdicNumber& at(int row, int col) const;
  const PMat& entries() const { return entries_; }
  InteractionMatrix transposed() const;

 private:
  InteractionMatrix() = default;

  ContextPtr ctx_;
  int q_ = 0;
  PMat entries_;

  static InteractionMatrix build(ContextPtr ctx, PMat entries,
                                 bool check_stochastic);
};

InteractionMatrix matrix_from_rationals(
    const std::vector<std::vector<mpq_class>>& rows, const ContextPtr& ctx,
    bool check_stochastic = true);

// Constructor for the non-uniqueness setting: first row (alpha, beta, ...,
// beta); middle rows (indices 2..q-1) are free parameters; the last row is
// completed so that every column sums to 1.
InteractionMatrix make_first_row_matrix(
    int q, const mpq_class& alpha, const mpq_class& beta,
    const std::vector<std::vector<mpq_class>>& middle_rows,
    const ContextPtr& ctx);

// Validates the m-block structure: rows 1..m constant across columns
// m+1..q-1 and q, with common within-block column sums. Returns (A, B) where
// A is the block sum of columns 1..m and B the block sum of column q.
// ConditionViolated when the structure fails.
std::pair<PAdicNumber, PAdicNumber> block_sums(const InteractionMatrix& m,
                                               int m_block);

// Assignment of an interaction matrix to every directed edge: either one
// homogeneous matrix used verbatim for both orientations of every edge, or
// an explicit map respecting reversal symmetry Q(y,x) = transpose(Q(x,y)).
class EdgeMatrixField {
 public:
  static EdgeMatrixField homogeneous(InteractionMatrix m);
  static EdgeMatrixField per_edge(
      std::map<DirectedEdge, InteractionMatrix> matrices);

  bool is_homogeneous() const { return homogeneous_.has_value(); }
  int q() const;
  const ContextPtr& context() const;
  const InteractionMatrix& get(const DirectedEdge& e) const;

 private:
  std::optional<InteractionMatrix> homogeneous_;
  std::map<DirectedEdge, InteractionMatrix> per_edge_;
};

struct ConditionFailure {
  DirectedEdge edge;
  int row = 0;  // 1-based states in reports
  int col = 0;
  std::string what;
};

struct ConditionReport {
  bool satisfied = true;
  std::vector<ConditionFailure> failures;
};

// Contraction-regime conditions, entrywise on one matrix:
// |Q(j,i)|_p <= 1 for all j, i and |Q(j,i) - Q(j,q)|_p <= 1/p.
// PrecisionExhausted when some comparison is undecidable.
ConditionReport check_uniqueness_conditions(const InteractionMatrix& m);

// Same check on every directed edge of the tree.
ConditionReport check_uniqueness_conditions(const EdgeMatrixField& field,
                                            const TreeGraph& tree);

}  // namespace padtree
