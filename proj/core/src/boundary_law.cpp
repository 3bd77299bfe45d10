#include "padtree/boundary_law.hpp"

#include <algorithm>
#include <utility>

#include "padtree/analysis.hpp"

namespace padtree {

namespace {

void require_vector(const PVec& v, int q, const ContextPtr& ctx) {
  if (static_cast<int>(v.size()) != q - 1) {
    throw DomainError("law vector must have q-1 coordinates");
  }
  for (const PAdicNumber& x : v) {
    if (!x.valid() || x.context()->p() != ctx->p() ||
        x.context()->precision() != ctx->precision()) {
      throw DomainError("law coordinate from a different context");
    }
  }
}

bool exactly_ones(const PVec& v, const ContextPtr& ctx) {
  const PAdicNumber one = PAdicNumber::one(ctx);
  for (const PAdicNumber& x : v) {
    if (!(x - one).is_exact_zero()) return false;
  }
  return true;
}

}  // namespace

const PVec& BoundaryLawField::value(const DirectedEdge& e) const {
  auto it = values.find(e);
  if (it == values.end()) {
    throw DomainError("no law value on edge " + edge_key(e));
  }
  return it->second;
}

const std::vector<PVec>& BoundaryLawField::phantom_at(int v) const {
  static const std::vector<PVec> kEmpty;
  auto it = phantom.find(v);
  return it == phantom.end() ? kEmpty : it->second;
}

PAdicNumber BoundaryLawField::coordinate(const DirectedEdge& e,
                                         int state) const {
  if (state < 1 || state > q) throw DomainError("state out of range");
  if (state == q) return PAdicNumber::one(ctx);
  return value(e)[state - 1];
}

BoundaryLawField BoundaryLawField::all_ones(const ContextPtr& ctx, int q,
                                            const TreeGraph& tree) {
  if (q < 2) throw DomainError("state count q must be >= 2");
  BoundaryLawField law;
  law.ctx = ctx;
  law.q = q;
  const PVec ones(q - 1, PAdicNumber::one(ctx));
  for (const DirectedEdge& e : tree.directed_edges()) law.values[e] = ones;
  return law;
}

BoundaryLawField BoundaryLawField::constant(const ContextPtr& ctx, int q,
                                            const PVec& vec,
                                            const TreeGraph& tree) {
  if (q < 2) throw DomainError("state count q must be >= 2");
  require_vector(vec, q, ctx);
  BoundaryLawField law;
  law.ctx = ctx;
  law.q = q;
  for (const DirectedEdge& e : tree.directed_edges()) law.values[e] = vec;
  if (tree.completion_degree) {
    const int target = *tree.completion_degree;
    for (int v : tree.vertices()) {
      const int missing = target - tree.degree(v);
      if (missing < 0) {
        throw DomainError("vertex degree exceeds the completion degree");
      }
      if (missing > 0 && !exactly_ones(vec, ctx)) {
        law.phantom[v].assign(missing, vec);
      }
    }
  }
  return law;
}

long distance_to_ones_valuation(const BoundaryLawField& law) {
  const PAdicNumber one = PAdicNumber::one(law.ctx);
  long best = PAdicNumber::kInfiniteValuation;
  for (const auto& [e, vec] : law.values) {
    for (const PAdicNumber& x : vec) {
      best = std::min(best, (x - one).valuation_lower_bound());
    }
  }
  return best;
}

namespace {

// Product over incoming factors of the consistency map at directed edge
// (x -> y), coordinates 1..q-1. Each contributing value w(v,x) yields
// K_i = [1 + sum_j (w_j - 1) Q(j,i)] / [1 + sum_j (w_j - 1) Q(j,q)].
PVec consistency_product(const BoundaryLawField& z,
                         const EdgeMatrixField& field, const TreeGraph& tree,
                         const DirectedEdge& e) {
  const ContextPtr& ctx = z.ctx;
  const int q = z.q;
  if (field.q() != q) throw DomainError("field and law disagree on q");
  if (!tree.adjacent(e.tail, e.head)) {
    throw DomainError("edge " + edge_key(e) + " is not in the tree");
  }
  const PAdicNumber one = PAdicNumber::one(ctx);
  PVec prod(q - 1, one);

  auto apply_factor = [&](const PVec& w, const InteractionMatrix& m) {
    PVec diff(q - 1, PAdicNumber::zero(ctx));
    bool all_zero = true;
    for (int j = 0; j < q - 1; ++j) {
      diff[j] = w[j] - one;
      all_zero = all_zero && diff[j].is_exact_zero();
    }
    if (all_zero) return;  // factor is exactly 1
    PAdicNumber den = one;
    for (int j = 0; j < q - 1; ++j) den = den + diff[j] * m.at(j, q - 1);
    if (den.is_zero()) {
      throw DivisionByZero(
          "consistency denominator indistinguishable from zero at edge " +
          edge_key(e) + ": " + den.describe());
    }
    for (int i = 0; i < q - 1; ++i) {
      PAdicNumber num = one;
      for (int j = 0; j < q - 1; ++j) num = num + diff[j] * m.at(j, i);
      prod[i] = prod[i] * (num / den);
    }
  };

  for (int v : tree.neighbors(e.tail)) {
    if (v == e.head) continue;
    const DirectedEdge in{v, e.tail};
    apply_factor(z.value(in), field.get(in));
  }
  for (const PVec& w : z.phantom_at(e.tail)) {
    require_vector(w, q, ctx);
    if (exactly_ones(w, ctx)) continue;
    if (!field.is_homogeneous()) {
      throw Unsupported(
          "phantom continuation values require a homogeneous matrix field");
    }
    apply_factor(w, field.get(DirectedEdge{e.tail, e.tail}));
  }
  return prod;
}

}  // namespace

PVec residual(const BoundaryLawField& z, const EdgeMatrixField& field,
              const TreeGraph& tree, const DirectedEdge& e) {
  const PVec prod = consistency_product(z, field, tree, e);
  const PVec& lhs = z.value(e);
  PVec out(z.q - 1, PAdicNumber::zero(z.ctx));
  for (int i = 0; i < z.q - 1; ++i) out[i] = lhs[i] - prod[i];
  return out;
}

BoundaryLawField iterate_map(const BoundaryLawField& z,
                             const EdgeMatrixField& field,
                             const TreeGraph& tree) {
  BoundaryLawField next;
  next.ctx = z.ctx;
  next.q = z.q;
  next.phantom = z.phantom;  // the continuation is fixed boundary data
  for (const DirectedEdge& e : tree.directed_edges()) {
    next.values[e] = consistency_product(z, field, tree, e);
  }
  return next;
}

UniqueSolveResult solve_unique(const EdgeMatrixField& field,
                               const TreeGraph& tree,
                               const BoundaryLawField& z0, int max_iters) {
  if (max_iters < 0) throw DomainError("max_iters must be >= 0");
  const ContextPtr& ctx = z0.ctx;
  const long n = ctx->precision();
  for (const auto& [e, vec] : z0.values) {
    require_vector(vec, z0.q, ctx);
    for (const PAdicNumber& x : vec) {
      if (!in_Ep(x)) {
        throw DomainError("starting coordinate outside the unit sphere near "
                          "1 at edge " + edge_key(e) + ": " + x.describe());
      }
    }
  }

  UniqueSolveResult result{z0, {}};
  long d = distance_to_ones_valuation(result.law);
  result.log.distance_valuations.push_back(d);
  if (d >= n) {
    result.log.converged = true;
    return result;
  }
  for (int t = 1; t <= max_iters; ++t) {
    result.law = iterate_map(result.law, field, tree);
    const long next_d = distance_to_ones_valuation(result.law);
    result.log.distance_valuations.push_back(next_d);
    result.log.iterations = t;
    if (next_d < std::min(d + 1, n)) {
      throw NotContracting(
          "iteration " + std::to_string(t) + " gained no digit: distance "
          "valuation went from " + std::to_string(d) + " to " +
          std::to_string(next_d) +
          " (the matrix field violates the contraction conditions)");
    }
    d = next_d;
    if (d >= n) {
      result.log.converged = true;
      return result;
    }
  }
  throw ResourceLimit("no convergence within " + std::to_string(max_iters) +
                      " iterations; last distance valuation " +
                      std::to_string(d));
}

namespace {

void require_integer_parameter(const PAdicNumber& x, const char* name) {
  if (!x.valid()) throw DomainError("invalid parameter");
  if (x.is_exact_zero()) return;
  if (x.is_ball()) {
    if (x.valuation_lower_bound() < 0) {
      throw PrecisionExhausted(std::string("cannot confirm that ") + name +
                               " is a p-adic integer at this precision");
    }
    return;
  }
  if (x.valuation() < 0) {
    throw DomainError(std::string(name) + " must be a p-adic integer");
  }
}

mpz_class binomial(unsigned long n, unsigned long k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return b;
}

}  // namespace

Polynomial build_G(int k, const PAdicNumber& alpha, const PAdicNumber& beta) {
  if (k < 1) throw DomainError("tree order k must be >= 1");
  require_integer_parameter(alpha, "alpha");
  require_integer_parameter(beta, "beta");
  const ContextPtr& ctx = alpha.context();
  const PAdicNumber one = PAdicNumber::one(ctx);
  const Polynomial zm1(ctx, {-one, one});  // z - 1

  Polynomial g = Polynomial::constant(one);
  Polynomial zm1_pow = Polynomial::constant(one);  // (z-1)^(j-1)
  for (int j = 1; j <= k; ++j) {
    const PAdicNumber aj = alpha.pow(j);
    const PAdicNumber bj = beta.pow(j);
    const PAdicNumber c =
        PAdicNumber::from_mpz(binomial(static_cast<unsigned long>(k),
                                       static_cast<unsigned long>(j)),
                              ctx);
    const Polynomial lin(ctx, {-aj, bj});  // z b^j - a^j
    g = g + lin.scaled(c) * zm1_pow;
    zm1_pow = zm1_pow * zm1;
  }
  return g;
}

Polynomial build_F(int k, const PAdicNumber& alpha, const PAdicNumber& beta) {
  if (k < 1) throw DomainError("tree order k must be >= 1");
  require_integer_parameter(alpha, "alpha");
  require_integer_parameter(beta, "beta");
  const ContextPtr& ctx = alpha.context();
  const PAdicNumber one = PAdicNumber::one(ctx);
  const Polynomial u(ctx, {one - beta, beta});    // 1 - b + b z
  const Polynomial v(ctx, {one - alpha, alpha});  // 1 - a + a z
  Polynomial uk = Polynomial::constant(one);
  Polynomial vk = Polynomial::constant(one);
  for (int j = 0; j < k; ++j) {
    uk = uk * u;
    vk = vk * v;
  }
  return Polynomial::monomial(one, 1) * uk - vk;
}

HenselCertificate try_certificate(int k, const PAdicNumber& alpha,
                                  const PAdicNumber& beta) {
  const ContextPtr& ctx = alpha.context();
  const long n = ctx->precision();
  HenselCertificate cert;
  cert.k = k;
  cert.alpha = alpha;
  cert.beta = beta;

  const Polynomial g = build_G(k, alpha, beta);
  const Polynomial f = build_F(k, alpha, beta);
  const PAdicNumber one = PAdicNumber::one(ctx);
  const Polynomial zm1(ctx, {-one, one});
  if (!Polynomial::congruent_mod(f, zm1 * g, n - kVerifySlack)) {
    throw Error("internal factorization self-check failed");
  }

  const PAdicNumber g1 = g.eval(one);
  const PAdicNumber gp1 = g.derivative().eval(one);
  if (!g1.is_zero()) cert.vG1 = g1.valuation();
  if (gp1.is_exact_zero()) {
    cert.valid = false;
    cert.detail = "derivative at 1 vanishes identically; no finite gamma";
    return cert;
  }
  if (gp1.is_ball()) {
    cert.valid = false;
    cert.detail =
        "derivative at 1 indistinguishable from zero at this precision";
    return cert;
  }
  cert.vGp1 = gp1.valuation();
  cert.gamma = *cert.vGp1;

  switch (decide_norm_le(g1, 2 * cert.gamma + 1)) {
    case Decision::Yes:
      cert.valid = true;
      break;
    case Decision::No:
      cert.valid = false;
      cert.detail = "value at 1 has valuation " +
                    std::to_string(*cert.vG1) + ", the certificate needs >= " +
                    std::to_string(2 * cert.gamma + 1);
      break;
    case Decision::Unknown:
      cert.valid = false;
      cert.detail = "valuation of the value at 1 undecidable at precision";
      break;
  }
  if (cert.valid && 2 * cert.gamma + 1 >= n) {
    cert.valid = false;
    cert.detail = "gamma = " + std::to_string(cert.gamma) +
                  " needs working precision above " +
                  std::to_string(2 * cert.gamma + 1);
  }
  return cert;
}

HenselCertificate certificate(int k, const PAdicNumber& alpha,
                              const PAdicNumber& beta) {
  HenselCertificate cert = try_certificate(k, alpha, beta);
  if (!cert.valid) {
    if (cert.detail.find("undecidable") != std::string::npos ||
        cert.detail.find("indistinguishable") != std::string::npos ||
        cert.detail.find("precision") != std::string::npos) {
      throw PrecisionExhausted(cert.detail);
    }
    throw NoCertificate(cert.detail);
  }
  return cert;
}

namespace {

std::optional<bool> probe_in_Ep(const PAdicNumber& x) {
  try {
    return in_Ep(x);
  } catch (const PrecisionExhausted&) {
    return std::nullopt;
  }
}

// Merges r into the report, folding it into an existing entry when the
// values agree to working precision.
void add_root(RootReport& report, Root r, long merge_precision) {
  for (Root& have : report.roots) {
    if (decide_norm_le(have.value - r.value, merge_precision) ==
        Decision::Yes) {
      have.is_hensel = have.is_hensel || r.is_hensel;
      if (!have.in_Ep) have.in_Ep = r.in_Ep;
      return;
    }
  }
  report.roots.push_back(std::move(r));
}

}  // namespace

RootReport solve_translation_invariant(int k, const PAdicNumber& alpha,
                                       const PAdicNumber& beta) {
  const ContextPtr& ctx = alpha.context();
  const long merge = ctx->precision() - kVerifySlack;
  const PAdicNumber one = PAdicNumber::one(ctx);

  RootReport report;
  report.cert = try_certificate(k, alpha, beta);
  report.roots.push_back(Root{one, true, false, "trivial"});

  if (report.cert.valid) {
    const Polynomial g = build_G(k, alpha, beta);
    const PAdicNumber lifted =
        hensel_lift(HenselInput{g, one, report.cert.gamma});
    add_root(report, Root{lifted, probe_in_Ep(lifted), true, "hensel"},
             merge);
  }

  if (k == 1) {
    // G(z) = 1 - a + b z
    if (!beta.is_zero()) {
      const PAdicNumber r = (alpha - one) / beta;
      add_root(report, Root{r, probe_in_Ep(r), false, "closed-form"}, merge);
    }
  } else if (k == 2) {
    // G(z) = b^2 z^2 + (2b - a^2 - b^2) z + (1 - a)^2
    const PAdicNumber a2 = alpha * alpha;
    const PAdicNumber b2 = beta * beta;
    const PAdicNumber lead = b2;
    const PAdicNumber mid = beta + beta - a2 - b2;
    const PAdicNumber low = (one - alpha) * (one - alpha);
    if (lead.is_zero()) {
      if (!mid.is_zero()) {
        const PAdicNumber r = -low / mid;
        add_root(report, Root{r, probe_in_Ep(r), false, "closed-form"},
                 merge);
      }
    } else {
      const PAdicNumber four = PAdicNumber::from_integer(4, ctx);
      const PAdicNumber disc = mid * mid - four * lead * low;
      if (disc.is_exact_zero()) {
        const PAdicNumber r = -mid / (lead + lead);
        add_root(report, Root{r, probe_in_Ep(r), false, "closed-form"},
                 merge);
      } else if (disc.is_ball()) {
        throw PrecisionExhausted(
            "discriminant indistinguishable from zero; roots undecidable");
      } else {
        const SqrtRoots sq = sqrt(disc);  // NoSolution propagates
        const PAdicNumber two_lead = lead + lead;
        for (const PAdicNumber& s : {sq.principal, sq.negated}) {
          const PAdicNumber r = (s - mid) / two_lead;
          add_root(report, Root{r, probe_in_Ep(r), false, "closed-form"},
                   merge);
        }
      }
    }
  }
  return report;
}

RootReport solve_block(int k, int m, const PAdicNumber& a,
                       const PAdicNumber& b) {
  if (m < 1) throw DomainError("block size m must be >= 1");
  return solve_translation_invariant(k, a, b);
}

PVec block_law_vector(const PAdicNumber& z, int m, int q) {
  if (q < 2) throw DomainError("state count q must be >= 2");
  if (m < 1 || m > q - 1) throw DomainError("block size m must be in 1..q-1");
  PVec vec;
  vec.reserve(q - 1);
  for (int i = 0; i < m; ++i) vec.push_back(z);
  for (int i = m; i < q - 1; ++i) {
    vec.push_back(PAdicNumber::one(z.context()));
  }
  return vec;
}

BoundaryLawField extend_to_general_tree(const TreeGraph& tree,
                                        const CayleyEmbedding& embedding,
                                        const PAdicNumber& z_root,
                                        const PAdicNumber& alpha,
                                        const PAdicNumber& beta,
                                        const EdgeMatrixField& field) {
  const ContextPtr& ctx = z_root.context();
  const long check = ctx->precision() - kVerifySlack;
  const int q = field.q();
  const PAdicNumber one = PAdicNumber::one(ctx);

  const PAdicNumber g_den = one - beta + beta * z_root;
  if (g_den.is_zero()) {
    throw DivisionByZero("1 - b + b z is indistinguishable from zero");
  }
  const PAdicNumber g = (one - alpha + alpha * z_root) / g_den;
  if (!eq_mod(z_root, g.pow(embedding.k), check)) {
    throw HypothesisViolated(
        "z does not satisfy z = g(z)^k at working precision");
  }

  // First-row structure: (1,1) entry a, row constant b on columns 2..q.
  // Required on the core edges and, crossing outward, on edges leaving it.
  auto check_first_row = [&](const DirectedEdge& e) {
    const InteractionMatrix& m = field.get(e);
    auto expect = [&](int col, const PAdicNumber& want, const char* what) {
      switch (decide_norm_le(m.at(0, col) - want, check)) {
        case Decision::Yes:
          return;
        case Decision::No:
          throw ConditionViolated(std::string(what) + " fails at edge " +
                                  edge_key(e) + ", entry (1," +
                                  std::to_string(col + 1) + ")");
        case Decision::Unknown:
          throw PrecisionExhausted("first-row comparison undecidable at edge " +
                                   edge_key(e));
      }
    };
    expect(0, alpha, "first-row value at column 1");
    expect(q - 1, beta, "first-row value at column q");
    for (int i = 1; i < q - 1; ++i) {
      expect(i, m.at(0, q - 1), "first-row constancy across columns 2..q");
    }
  };

  BoundaryLawField law;
  law.ctx = ctx;
  law.q = q;
  const PVec core_vec = block_law_vector(z_root, 1, q);
  const PVec ones_vec(q - 1, one);
  PVec crossing_vec = ones_vec;
  crossing_vec[0] = z_root * g;

  for (const DirectedEdge& e : tree.directed_edges()) {
    switch (embedding.classify(e.tail, e.head)) {
      case EdgeClass::Core:
        check_first_row(e);
        law.values[e] = core_vec;
        break;
      case EdgeClass::Crossing:
        check_first_row(DirectedEdge{
            embedding.in_core(e.tail) ? e.tail : e.head,
            embedding.in_core(e.tail) ? e.head : e.tail});
        law.values[e] = embedding.in_core(e.tail) ? crossing_vec : ones_vec;
        break;
      case EdgeClass::Outside:
        law.values[e] = ones_vec;
        break;
    }
  }

  // Core vertices holding fewer than k+1 within-core neighbors continue
  // into the untruncated regular tree; those phantom edges carry z.
  for (int v : embedding.core) {
    int core_neighbors = 0;
    for (int w : tree.neighbors(v)) {
      if (embedding.classify(v, w) == EdgeClass::Core) ++core_neighbors;
    }
    const int missing = embedding.k + 1 - core_neighbors;
    if (missing > 0) law.phantom[v].assign(missing, core_vec);
  }
  return law;
}

}  // namespace padtree
