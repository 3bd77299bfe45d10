#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "padtree/boundary_law.hpp"
#include "padtree/interaction.hpp"
#include "padtree/tree.hpp"

namespace padtree {

// States of a configuration on a finite set of vertices, 1-based in Phi.
struct CylinderAssignment {
  std::map<int, int> states;

  int state(int vertex) const;
  bool assigns(int vertex) const { return states.count(vertex) > 0; }
};

inline constexpr long kDefaultTermCap = 2000000;

// Brute-force sum over all assignments of the closed volume of
//   prod_{x in boundary} w(x, state(x)) * prod_{edges meeting Lambda}
//   Q(state(child), state(parent)),
// edges oriented toward the minimal member of Lambda. The boundary weight
// callback generalizes the boundary-law factor (used directly by tests for
// homogeneity properties).
PAdicNumber weighted_partition_sum(
    const EdgeMatrixField& field, const TreeGraph& tree, const Volume& lambda,
    const std::function<PAdicNumber(int vertex, int state)>& boundary_weight,
    long term_cap = kDefaultTermCap);

// Normalizing factor Z of the finite-volume measure: boundary weights are
// the law values z_{state}(x -> inner neighbor). Equals q exactly for the
// all-ones law and a column-stochastic field.
PAdicNumber partition_function(const BoundaryLawField& z,
                               const EdgeMatrixField& field,
                               const TreeGraph& tree, const Volume& lambda,
                               long term_cap = kDefaultTermCap);

// Probability of one assignment of the closed volume: its product term
// divided by the partition function.
PAdicNumber measure_eval(const BoundaryLawField& z,
                         const EdgeMatrixField& field, const TreeGraph& tree,
                         const Volume& lambda, const CylinderAssignment& cfg,
                         long term_cap = kDefaultTermCap);

// Row i of the two-site marginal on directed edge b = (x -> y):
//   mu_b(i, j) = Q_b(i,j) z_j(x,y) / sum_phi Q_b(i,phi) z_phi(x,y),
// returned as the full q-vector over j.
PVec two_site_marginal(const BoundaryLawField& z, const EdgeMatrixField& field,
                       const DirectedEdge& b, int i);

// Per-edge transition matrices (rows summing to 1) with per-vertex marginal
// vectors (coordinates summing to 1).
struct TransitionSystem {
  ContextPtr ctx;
  int q = 2;
  std::map<DirectedEdge, PMat> transition;
  std::map<int, PVec> marginals;
  // Edge whose transition matrix defined the invariant vector.
  DirectedEdge seed_edge;

  const PMat& matrix(const DirectedEdge& e) const;
  const PVec& marginal(int vertex) const;
};

// Invariant stochastic row vector of a row-stochastic matrix: a P = a,
// sum a_i = 1. SingularAtPrecision when not uniquely solvable.
PVec invariant_vector(const PMat& p, const ContextPtr& ctx);

// Builds every directed-edge transition matrix from the two-site marginals
// and propagates the marginal vector from the seed edge (default: smallest
// directed edge) through a_head = a_tail * P.
TransitionSystem transition_system_from_law(
    const BoundaryLawField& z, const EdgeMatrixField& field,
    const TreeGraph& tree,
    std::optional<DirectedEdge> seed_edge = std::nullopt);

// Chain evaluation rooted at `root`:
//   marginal_root(state) * prod over in-volume edges oriented away from the
//   root of P(state(parent), state(child)).
PAdicNumber markov_eval(const TransitionSystem& ts, const TreeGraph& tree,
                        const Volume& lambda, const CylinderAssignment& cfg,
                        int root);

// Detailed balance a_x(i) P_xy(i,j) = a_y(j) P_yx(j,i) on every edge at
// working precision; PrecisionExhausted on undecidable comparisons.
bool check_reversibility(const TransitionSystem& ts, const TreeGraph& tree);

// Marginal compatibility: summing the larger volume's measure over the
// extra sites reproduces the smaller volume's measure, for every
// assignment. Requires closure(small) inside closure(big).
bool check_consistency(const BoundaryLawField& z, const EdgeMatrixField& field,
                       const TreeGraph& tree, const Volume& small_lambda,
                       const Volume& big_lambda,
                       long term_cap = kDefaultTermCap);

struct WitnessReport {
  std::vector<int> path;    // vertices x_0 .. x_n
  std::vector<int> states;  // chosen states, one per path vertex
  // Norm exponents: entry 0 for the starting marginal, then one per step
  // factor; every step exponent is >= 1.
  std::vector<long> step_exponents;
  // Partial-product exponents; entry m is >= m.
  std::vector<long> cumulative_exponents;
  PAdicNumber value;  // the evaluated path measure
};

struct EdgeNormSummary {
  DirectedEdge edge;
  // max_{i,j} of the entry norm exponent (nullopt when all entries are
  // zero at precision).
  std::optional<long> max_entry_exponent;
  // min over rows of the row-maximal entry norm exponent.
  std::optional<long> min_row_max_exponent;
};

struct BoundednessVerdict {
  enum class Tag { Bounded, Unbounded, Inconclusive };
  Tag tag = Tag::Inconclusive;
  long q_norm_exponent = 0;  // |q|_p = p^(this)
  std::vector<EdgeNormSummary> decisive_norms;
  std::optional<WitnessReport> witness;  // attached to Unbounded
};

// Sufficient-condition classifier:
//   Bounded     when every entry norm is <= |q|_p on every edge;
//   Unbounded   when on every directed edge each row holds an entry of norm
//               > |q|_p (witness attached, built on a diameter path);
//   Inconclusive otherwise.
BoundednessVerdict classify_boundedness(const EdgeMatrixField& field,
                                        const TreeGraph& tree,
                                        const BoundaryLawField& z,
                                        int max_witness_steps = 20);

// Greedy certificate of unboundedness along the first n edges of `path`:
// start from the max-norm coordinate of the invariant vector, then follow
// per-step interaction-matrix row maxima. Every step factor must have norm
// >= p (HypothesisViolated otherwise); the cumulative norm is >= p^n.
WitnessReport unbounded_witness(const EdgeMatrixField& field,
                                const BoundaryLawField& z,
                                const TreeGraph& tree,
                                const std::vector<int>& path, int n);

}  // namespace padtree
