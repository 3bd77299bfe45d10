#include "padtree/measure.hpp"

#include <algorithm>
#include <memory>
#include <utility>

#include "padtree/analysis.hpp"

namespace padtree {

int CylinderAssignment::state(int vertex) const {
  auto it = states.find(vertex);
  if (it == states.end()) {
    throw DomainError("no state assigned to vertex " + std::to_string(vertex));
  }
  return it->second;
}

namespace {

// Closed volume seen as a tree rooted at the minimal member of Lambda:
// every participating edge is stored child -> parent, so peeling leaves
// first makes the column-stochastic sums telescope.
struct RootedClosure {
  std::vector<int> vertices;               // sorted closure
  std::vector<int> boundary;               // sorted
  std::map<int, int> inner_neighbor;       // boundary vertex -> its anchor
  std::vector<DirectedEdge> factor_edges;  // child -> parent
};

RootedClosure root_closure(const TreeGraph& tree, const Volume& lambda) {
  RootedClosure rc;
  rc.vertices = closure(tree, lambda);
  rc.boundary = boundary(tree, lambda);

  const int root = lambda.members().front();
  std::map<int, int> parent{{root, root}};
  std::vector<int> frontier{root};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int u : frontier) {
      for (int w : tree.neighbors(u)) {
        if (parent.count(w)) continue;
        parent[w] = u;
        rc.factor_edges.push_back(DirectedEdge{w, u});
        if (lambda.contains(w)) {
          next.push_back(w);  // boundary vertices stay leaves
        } else {
          rc.inner_neighbor[w] = u;
        }
      }
    }
    frontier = std::move(next);
  }
  return rc;
}

long enumeration_size(int q, std::size_t sites, long cap) {
  long total = 1;
  for (std::size_t i = 0; i < sites; ++i) {
    if (total > cap / q) return cap + 1;
    total *= q;
  }
  return total;
}

// Calls visit(states) for every assignment of 1..q to the sites,
// lexicographic with the last site varying fastest.
template <typename Visit>
void enumerate(int q, std::size_t sites, Visit visit) {
  std::vector<int> states(sites, 1);
  while (true) {
    visit(states);
    std::size_t i = sites;
    while (true) {
      if (i == 0) return;
      --i;
      if (states[i] < q) {
        ++states[i];
        break;
      }
      states[i] = 1;
    }
  }
}

// Position-resolved term evaluator over the states vector of a closure.
class TermEvaluator {
 public:
  TermEvaluator(const EdgeMatrixField& field, const RootedClosure& rc,
                std::function<PAdicNumber(int vertex, int state)> weight)
      : weight_(std::move(weight)) {
    std::map<int, int> pos;
    for (std::size_t i = 0; i < rc.vertices.size(); ++i) {
      pos[rc.vertices[i]] = static_cast<int>(i);
    }
    for (int x : rc.boundary) boundary_.emplace_back(x, pos.at(x));
    for (const DirectedEdge& e : rc.factor_edges) {
      factors_.push_back(Factor{&field.get(e), pos.at(e.tail),
                                pos.at(e.head)});
    }
  }

  PAdicNumber term(const ContextPtr& ctx,
                   const std::vector<int>& states) const {
    PAdicNumber value = PAdicNumber::one(ctx);
    for (const auto& [vertex, p] : boundary_) {
      value = value * weight_(vertex, states[p]);
    }
    for (const Factor& f : factors_) {
      value = value * f.matrix->at(states[f.tail_pos] - 1,
                                   states[f.head_pos] - 1);
    }
    return value;
  }

 private:
  struct Factor {
    const InteractionMatrix* matrix;
    int tail_pos;
    int head_pos;
  };
  std::function<PAdicNumber(int, int)> weight_;
  std::vector<std::pair<int, int>> boundary_;  // (vertex, position)
  std::vector<Factor> factors_;
};

std::function<PAdicNumber(int, int)> law_boundary_weight(
    const BoundaryLawField& z, const RootedClosure& rc) {
  auto inner = std::make_shared<std::map<int, int>>(rc.inner_neighbor);
  return [&z, inner](int x, int state) {
    return z.coordinate(DirectedEdge{x, inner->at(x)}, state);
  };
}

PAdicNumber sum_over_closure(const ContextPtr& ctx, int q,
                             const RootedClosure& rc,
                             const TermEvaluator& eval, long term_cap) {
  if (enumeration_size(q, rc.vertices.size(), term_cap) > term_cap) {
    throw ResourceLimit("assignment enumeration exceeds the term cap of " +
                        std::to_string(term_cap));
  }
  PAdicNumber sum = PAdicNumber::zero(ctx);
  enumerate(q, rc.vertices.size(), [&](const std::vector<int>& states) {
    sum = sum + eval.term(ctx, states);
  });
  return sum;
}

}  // namespace

PAdicNumber weighted_partition_sum(
    const EdgeMatrixField& field, const TreeGraph& tree, const Volume& lambda,
    const std::function<PAdicNumber(int vertex, int state)>& boundary_weight,
    long term_cap) {
  const RootedClosure rc = root_closure(tree, lambda);
  const TermEvaluator eval(field, rc, boundary_weight);
  return sum_over_closure(field.context(), field.q(), rc, eval, term_cap);
}

PAdicNumber partition_function(const BoundaryLawField& z,
                               const EdgeMatrixField& field,
                               const TreeGraph& tree, const Volume& lambda,
                               long term_cap) {
  if (z.q != field.q()) throw DomainError("field and law disagree on q");
  const RootedClosure rc = root_closure(tree, lambda);
  const TermEvaluator eval(field, rc, law_boundary_weight(z, rc));
  return sum_over_closure(z.ctx, z.q, rc, eval, term_cap);
}

namespace {

std::vector<int> states_for(const RootedClosure& rc,
                            const CylinderAssignment& cfg, int q) {
  if (cfg.states.size() != rc.vertices.size()) {
    throw DomainError("assignment must cover exactly the closed volume");
  }
  std::vector<int> states;
  states.reserve(rc.vertices.size());
  for (int v : rc.vertices) {
    const int s = cfg.state(v);  // throws on missing vertices
    if (s < 1 || s > q) throw DomainError("state out of range");
    states.push_back(s);
  }
  return states;
}

}  // namespace

PAdicNumber measure_eval(const BoundaryLawField& z,
                         const EdgeMatrixField& field, const TreeGraph& tree,
                         const Volume& lambda, const CylinderAssignment& cfg,
                         long term_cap) {
  if (z.q != field.q()) throw DomainError("field and law disagree on q");
  const RootedClosure rc = root_closure(tree, lambda);
  const TermEvaluator eval(field, rc, law_boundary_weight(z, rc));
  const std::vector<int> states = states_for(rc, cfg, z.q);
  const PAdicNumber zeta = sum_over_closure(z.ctx, z.q, rc, eval, term_cap);
  if (zeta.is_zero()) {
    throw DivisionByZero("partition function indistinguishable from zero: " +
                         zeta.describe());
  }
  return eval.term(z.ctx, states) / zeta;
}

PVec two_site_marginal(const BoundaryLawField& z, const EdgeMatrixField& field,
                       const DirectedEdge& b, int i) {
  const ContextPtr& ctx = z.ctx;
  const int q = z.q;
  if (q != field.q()) throw DomainError("field and law disagree on q");
  if (i < 1 || i > q) throw DomainError("state out of range");
  const InteractionMatrix& m = field.get(b);
  PAdicNumber den = PAdicNumber::zero(ctx);
  for (int j = 1; j <= q; ++j) {
    den = den + m.at(i - 1, j - 1) * z.coordinate(b, j);
  }
  if (den.is_zero()) {
    throw DivisionByZero("marginal denominator indistinguishable from zero "
                         "at edge " + edge_key(b) + ": " + den.describe());
  }
  PVec row;
  row.reserve(q);
  for (int j = 1; j <= q; ++j) {
    row.push_back(m.at(i - 1, j - 1) * z.coordinate(b, j) / den);
  }
  return row;
}

const PMat& TransitionSystem::matrix(const DirectedEdge& e) const {
  auto it = transition.find(e);
  if (it == transition.end()) {
    throw DomainError("no transition matrix on edge " + edge_key(e));
  }
  return it->second;
}

const PVec& TransitionSystem::marginal(int vertex) const {
  auto it = marginals.find(vertex);
  if (it == marginals.end()) {
    throw DomainError("no marginal vector at vertex " +
                      std::to_string(vertex));
  }
  return it->second;
}

PVec invariant_vector(const PMat& p, const ContextPtr& ctx) {
  const int q = static_cast<int>(p.size());
  const PAdicNumber one = PAdicNumber::one(ctx);
  const long target = ctx->precision() - kVerifySlack;

  // a P = a with sum(a) = 1: transpose to (P^T - I) a = 0 and replace one
  // equation by the normalization. P^T - I always has rank at most q-1, so
  // some replacement works whenever the invariant vector is unique; rows
  // are retried bottom-up for determinism.
  for (int drop = q - 1; drop >= 0; --drop) {
    PMat m(q, PVec(q, PAdicNumber::zero(ctx)));
    PVec rhs(q, PAdicNumber::zero(ctx));
    for (int r = 0; r < q; ++r) {
      if (r == drop) {
        for (int c = 0; c < q; ++c) m[r][c] = one;
        rhs[r] = one;
        continue;
      }
      for (int c = 0; c < q; ++c) {
        m[r][c] = p[c][r];
        if (r == c) m[r][c] = m[r][c] - one;
      }
    }
    PVec a;
    try {
      a = linear_solve(m, rhs);
    } catch (const SingularAtPrecision&) {
      continue;
    }
    // The dropped stationarity equation must hold as well. The decidable
    // cancellation floor scales with the term magnitudes, so lower the
    // target by any negative valuations involved.
    PAdicNumber res = PAdicNumber::zero(ctx);
    long row_floor = 0;
    for (int c = 0; c < q; ++c) {
      res = res + p[c][drop] * a[c];
      row_floor = std::min(row_floor, p[c][drop].valuation_lower_bound() +
                                          a[c].valuation_lower_bound());
    }
    res = res - a[drop];
    row_floor = std::min(row_floor, a[drop].valuation_lower_bound());
    switch (decide_norm_le(res, target + row_floor)) {
      case Decision::Yes:
        return a;
      case Decision::No:
        throw SingularAtPrecision(
            "stationary equations are inconsistent; the invariant vector is "
            "not unique");
      case Decision::Unknown:
        throw PrecisionExhausted(
            "invariant-vector residual undecidable at precision");
    }
  }
  throw SingularAtPrecision(
      "invariant vector not uniquely solvable at this precision");
}

TransitionSystem transition_system_from_law(
    const BoundaryLawField& z, const EdgeMatrixField& field,
    const TreeGraph& tree, std::optional<DirectedEdge> seed_edge) {
  TransitionSystem ts;
  ts.ctx = z.ctx;
  ts.q = z.q;
  const std::vector<DirectedEdge> edges = tree.directed_edges();
  for (const DirectedEdge& e : edges) {
    PMat m;
    m.reserve(ts.q);
    for (int i = 1; i <= ts.q; ++i) {
      m.push_back(two_site_marginal(z, field, e, i));
    }
    ts.transition[e] = std::move(m);
  }

  ts.seed_edge = seed_edge.value_or(edges.front());
  if (!ts.transition.count(ts.seed_edge)) {
    throw DomainError("seed edge " + edge_key(ts.seed_edge) +
                      " is not in the tree");
  }
  ts.marginals[ts.seed_edge.tail] =
      invariant_vector(ts.transition.at(ts.seed_edge), ts.ctx);

  // Push marginals outward: a_head(j) = sum_i a_tail(i) P(i,j).
  std::vector<int> frontier{ts.seed_edge.tail};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int u : frontier) {
      for (int w : tree.neighbors(u)) {
        if (ts.marginals.count(w)) continue;
        const PMat& p = ts.transition.at(DirectedEdge{u, w});
        const PVec& a = ts.marginals.at(u);
        PVec b(ts.q, PAdicNumber::zero(ts.ctx));
        for (int j = 0; j < ts.q; ++j) {
          for (int i = 0; i < ts.q; ++i) b[j] = b[j] + a[i] * p[i][j];
        }
        ts.marginals[w] = std::move(b);
        next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  return ts;
}

PAdicNumber markov_eval(const TransitionSystem& ts, const TreeGraph& tree,
                        const Volume& lambda, const CylinderAssignment& cfg,
                        int root) {
  if (!lambda.contains(root)) {
    throw DomainError("root must belong to the volume");
  }
  for (int v : lambda.members()) {
    const int s = cfg.state(v);
    if (s < 1 || s > ts.q) throw DomainError("state out of range");
  }
  PAdicNumber value = ts.marginal(root)[cfg.state(root) - 1];
  std::map<int, bool> seen{{root, true}};
  std::vector<int> frontier{root};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int u : frontier) {
      for (int w : tree.neighbors(u)) {
        if (!lambda.contains(w) || seen.count(w)) continue;
        seen[w] = true;
        const PMat& p = ts.matrix(DirectedEdge{u, w});
        value = value * p[cfg.state(u) - 1][cfg.state(w) - 1];
        next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  return value;
}

namespace {

// Deepest absolute level a computed value certifies: valuation floor plus
// trusted digits. Balls certify exactly their bound, exact zeros any level.
long certified_level(const PAdicNumber& x) {
  if (x.is_exact_zero()) return PAdicNumber::kInfiniteValuation;
  if (x.is_ball()) return x.valuation_lower_bound();
  return x.valuation_lower_bound() + x.known_digits();
}

// Comparison target for lhs == rhs: the working target shifted down by
// below-unit magnitudes, capped by what both sides actually certify.
long comparison_target(const PAdicNumber& lhs, const PAdicNumber& rhs,
                       long base) {
  long target = base;
  for (const PAdicNumber* s : {&lhs, &rhs}) {
    if (s->is_exact_zero()) continue;
    target = std::min(target, base + std::min(0L, s->valuation_lower_bound()));
    target = std::min(target, certified_level(*s));
  }
  return target;
}

}  // namespace

bool check_reversibility(const TransitionSystem& ts, const TreeGraph& tree) {
  const long base = ts.ctx->precision() - kVerifySlack;
  bool ok = true;
  for (const auto& [x, y] : tree.edges()) {
    const PMat& fwd = ts.matrix(DirectedEdge{x, y});
    const PMat& bwd = ts.matrix(DirectedEdge{y, x});
    const PVec& ax = ts.marginal(x);
    const PVec& ay = ts.marginal(y);
    for (int i = 0; i < ts.q; ++i) {
      for (int j = 0; j < ts.q; ++j) {
        const PAdicNumber lhs = ax[i] * fwd[i][j];
        const PAdicNumber rhs = ay[j] * bwd[j][i];
        const PAdicNumber diff = lhs - rhs;
        switch (decide_norm_le(diff, comparison_target(lhs, rhs, base))) {
          case Decision::Yes:
            break;
          case Decision::No:
            ok = false;
            break;
          case Decision::Unknown:
            throw PrecisionExhausted(
                "detailed-balance comparison undecidable at edge " +
                edge_key(DirectedEdge{x, y}));
        }
      }
    }
  }
  return ok;
}

bool check_consistency(const BoundaryLawField& z, const EdgeMatrixField& field,
                       const TreeGraph& tree, const Volume& small_lambda,
                       const Volume& big_lambda, long term_cap) {
  const ContextPtr& ctx = z.ctx;
  const int q = z.q;
  const long target = ctx->precision() - kVerifySlack;
  const RootedClosure small_rc = root_closure(tree, small_lambda);
  const RootedClosure big_rc = root_closure(tree, big_lambda);
  for (int v : small_rc.vertices) {
    if (!std::binary_search(big_rc.vertices.begin(), big_rc.vertices.end(),
                            v)) {
      throw DomainError(
          "the small closed volume must sit inside the large one");
    }
  }
  if (enumeration_size(q, big_rc.vertices.size(), term_cap) > term_cap) {
    throw ResourceLimit("assignment enumeration exceeds the term cap of " +
                        std::to_string(term_cap));
  }

  // One sweep over the large closure, bucketing terms by the restriction
  // to the small closure.
  const TermEvaluator big_eval(field, big_rc, law_boundary_weight(z, big_rc));
  const PAdicNumber big_zeta =
      sum_over_closure(ctx, q, big_rc, big_eval, term_cap);
  if (big_zeta.is_zero()) {
    throw DivisionByZero("partition function indistinguishable from zero");
  }
  std::vector<int> restriction_pos;
  {
    std::map<int, int> pos;
    for (std::size_t i = 0; i < big_rc.vertices.size(); ++i) {
      pos[big_rc.vertices[i]] = static_cast<int>(i);
    }
    for (int v : small_rc.vertices) restriction_pos.push_back(pos.at(v));
  }
  std::map<std::vector<int>, PAdicNumber> buckets;
  enumerate(q, big_rc.vertices.size(), [&](const std::vector<int>& states) {
    std::vector<int> key;
    key.reserve(restriction_pos.size());
    for (int p : restriction_pos) key.push_back(states[p]);
    const PAdicNumber term = big_eval.term(ctx, states);
    auto [it, inserted] = buckets.try_emplace(key, term);
    if (!inserted) it->second = it->second + term;
  });

  const TermEvaluator small_eval(field, small_rc,
                                 law_boundary_weight(z, small_rc));
  const PAdicNumber small_zeta =
      sum_over_closure(ctx, q, small_rc, small_eval, term_cap);
  if (small_zeta.is_zero()) {
    throw DivisionByZero("partition function indistinguishable from zero");
  }
  bool ok = true;
  enumerate(q, small_rc.vertices.size(), [&](const std::vector<int>& states) {
    const PAdicNumber direct = small_eval.term(ctx, states) / small_zeta;
    const PAdicNumber summed = buckets.at(states) / big_zeta;
    switch (decide_norm_le(direct - summed,
                           comparison_target(direct, summed, target))) {
      case Decision::Yes:
        break;
      case Decision::No:
        ok = false;
        break;
      case Decision::Unknown:
        throw PrecisionExhausted(
            "volume-compatibility comparison undecidable at precision");
    }
  });
  return ok;
}

namespace {

long integer_valuation(long value, unsigned long p) {
  long v = 0;
  while (value % static_cast<long>(p) == 0) {
    value /= static_cast<long>(p);
    ++v;
  }
  return v;
}

enum class Tri { Yes, No, Unknown };

Tri combine_all(Tri a, Tri b) {
  if (a == Tri::No || b == Tri::No) return Tri::No;
  if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
  return Tri::Yes;
}

}  // namespace

BoundednessVerdict classify_boundedness(const EdgeMatrixField& field,
                                        const TreeGraph& tree,
                                        const BoundaryLawField& z,
                                        int max_witness_steps) {
  const ContextPtr& ctx = field.context();
  const int q = field.q();
  if (z.q != q) throw DomainError("field and law disagree on q");
  for (const auto& [e, vec] : z.values) {
    for (const PAdicNumber& x : vec) {
      if (!in_Ep(x)) {
        throw HypothesisViolated(
            "law coordinate outside the unit sphere near 1 at edge " +
            edge_key(e) + ": " + x.describe());
      }
    }
  }

  const long vq = integer_valuation(q, ctx->p());
  BoundednessVerdict verdict;
  verdict.q_norm_exponent = -vq;

  Tri bounded = Tri::Yes;
  Tri unbounded = Tri::Yes;
  for (const DirectedEdge& e : tree.directed_edges()) {
    const InteractionMatrix& m = field.get(e);
    EdgeNormSummary summary;
    summary.edge = e;
    std::optional<long> max_entry;
    std::optional<long> min_row_max;
    bool zero_norm_row = false;
    Tri edge_rows_exceed = Tri::Yes;  // every row has an entry > |q|_p
    for (int i = 0; i < q; ++i) {
      std::optional<long> row_max;
      Tri row_exceeds = Tri::No;
      for (int j = 0; j < q; ++j) {
        const PAdicNumber& x = m.at(i, j);
        const std::optional<long> ne = x.norm_exponent();
        if (ne) {
          if (!row_max || *ne > *row_max) row_max = ne;
          if (!max_entry || *ne > *max_entry) max_entry = ne;
        }
        // Part 1 needs |x| <= |q|_p, i.e. valuation >= v_p(q).
        switch (decide_norm_le(x, vq)) {
          case Decision::Yes:
            break;
          case Decision::No:
            bounded = combine_all(bounded, Tri::No);
            break;
          case Decision::Unknown:
            bounded = combine_all(bounded, Tri::Unknown);
            break;
        }
        // Part 2 asks for an entry with |x| > |q|_p in every row.
        if (ne && *ne > -vq) {
          row_exceeds = Tri::Yes;
        } else if (x.is_ball() && x.valuation_lower_bound() < vq &&
                   row_exceeds == Tri::No) {
          row_exceeds = Tri::Unknown;
        }
      }
      if (!row_max) {
        zero_norm_row = true;  // row of precision-zeros: row max norm is 0
      } else if (!min_row_max || *row_max < *min_row_max) {
        min_row_max = row_max;
      }
      edge_rows_exceed = combine_all(edge_rows_exceed, row_exceeds);
    }
    summary.max_entry_exponent = max_entry;
    summary.min_row_max_exponent =
        zero_norm_row ? std::nullopt : min_row_max;
    verdict.decisive_norms.push_back(summary);
    unbounded = combine_all(unbounded, edge_rows_exceed);
  }

  if (bounded == Tri::Yes) {
    verdict.tag = BoundednessVerdict::Tag::Bounded;
    return verdict;
  }
  if (unbounded == Tri::Yes) {
    verdict.tag = BoundednessVerdict::Tag::Unbounded;
    std::vector<int> path = diameter_path(tree);
    int steps = static_cast<int>(path.size()) - 1;
    steps = std::min(steps, max_witness_steps);
    path.resize(steps + 1);
    verdict.witness = unbounded_witness(field, z, tree, path, steps);
    return verdict;
  }
  if (bounded == Tri::Unknown || unbounded == Tri::Unknown) {
    throw PrecisionExhausted(
        "norm comparisons undecidable at precision; no verdict");
  }
  verdict.tag = BoundednessVerdict::Tag::Inconclusive;
  return verdict;
}

WitnessReport unbounded_witness(const EdgeMatrixField& field,
                                const BoundaryLawField& z,
                                const TreeGraph& tree,
                                const std::vector<int>& path, int n) {
  const ContextPtr& ctx = field.context();
  const int q = field.q();
  if (n < 0) throw DomainError("witness length must be >= 0");
  if (path.empty()) throw DomainError("path must not be empty");
  if (static_cast<int>(path.size()) < n + 1) {
    throw DomainError("path holds fewer than n edges");
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!tree.adjacent(path[i], path[i + 1])) {
      throw DomainError("path vertices " + std::to_string(path[i]) + " and " +
                        std::to_string(path[i + 1]) + " are not adjacent");
    }
  }
  const long vq = integer_valuation(q, ctx->p());

  // The invariant vector comes from the first path edge; a 0-step witness
  // on a single vertex still needs one incident edge to define it.
  DirectedEdge seed;
  if (path.size() >= 2) {
    seed = DirectedEdge{path[0], path[1]};
  } else {
    seed = DirectedEdge{path[0], tree.neighbors(path[0]).front()};
  }
  PMat seed_matrix;
  for (int i = 1; i <= q; ++i) {
    seed_matrix.push_back(two_site_marginal(z, field, seed, i));
  }
  const PVec alpha = invariant_vector(seed_matrix, ctx);

  WitnessReport report;
  report.path.assign(path.begin(), path.begin() + (n + 1));

  // Start from the marginal coordinate of maximal norm; sum(alpha) = 1
  // forces that norm to be >= 1.
  int current = 0;
  long best_val = PAdicNumber::kInfiniteValuation;
  for (int s = 0; s < q; ++s) {
    if (alpha[s].is_zero()) continue;
    if (alpha[s].valuation() < best_val) {
      best_val = alpha[s].valuation();
      current = s;
    }
  }
  if (best_val > 0) {
    throw Error("invariant vector sums to 1 yet has no coordinate of norm "
                ">= 1; arithmetic invariant broken");
  }
  report.states.push_back(current + 1);
  report.step_exponents.push_back(-best_val);
  report.cumulative_exponents.push_back(-best_val);
  PAdicNumber value = alpha[current];

  for (int m = 1; m <= n; ++m) {
    const DirectedEdge e{path[m - 1], path[m]};
    const InteractionMatrix& qm = field.get(e);
    // Greedy continuation: maximize |Q(current, j)|, smallest j on ties.
    int next = -1;
    long next_val = PAdicNumber::kInfiniteValuation;
    bool undecided = false;
    for (int j = 0; j < q; ++j) {
      const PAdicNumber& entry = qm.at(current, j);
      if (entry.is_ball()) undecided = true;
      if (entry.is_zero()) continue;
      if (entry.valuation() < next_val) {
        next_val = entry.valuation();
        next = j;
      }
    }
    if (next < 0 || next_val >= vq) {
      if (undecided) {
        throw PrecisionExhausted("row maximum undecidable at edge " +
                                 edge_key(e));
      }
      throw HypothesisViolated(
          "row " + std::to_string(current + 1) + " of edge " + edge_key(e) +
          " has no entry of norm above the state-count norm");
    }
    const PVec row = two_site_marginal(z, field, e, current + 1);
    const PAdicNumber factor = row[next];
    if (factor.is_zero() || factor.valuation() > -1) {
      throw HypothesisViolated(
          "step " + std::to_string(m) + " factor has norm below p: " +
          factor.describe());
    }
    value = value * factor;
    current = next;
    report.states.push_back(current + 1);
    report.step_exponents.push_back(-factor.valuation());
    report.cumulative_exponents.push_back(
        report.cumulative_exponents.back() - factor.valuation());
  }
  report.value = value;
  return report;
}

}  // namespace padtree
