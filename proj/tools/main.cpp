// Command-line front end: arithmetic expression evaluation, solvers for
// boundary-law fixed points, boundedness classification, cylinder measures,
// and deterministic demos checked against golden JSON files.

#include <CLI11.hpp>

#include <padtree/analysis.hpp>
#include <padtree/boundary_law.hpp>
#include <padtree/errors.hpp>
#include <padtree/interaction.hpp>
#include <padtree/io.hpp>
#include <padtree/measure.hpp>
#include <padtree/padic.hpp>
#include <padtree/polynomial.hpp>
#include <padtree/tree.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

namespace pt = padtree;
using pt::Json;

// Exit codes: 0 ok, 2 parse/config, 3 arithmetic, 4 unsupported, 5 golden
// mismatch, 1 internal.
struct GoldenMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr long kMinPrecision = 8;
constexpr long kMaxPrecision = 4096;

long precision_from_env() {
  const char* s = std::getenv("PADTREE_PRECISION");
  if (s == nullptr || *s == '\0') return 64;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (end == nullptr || *end != '\0' || v < kMinPrecision || v > kMaxPrecision)
    throw pt::ParseError("PADTREE_PRECISION must be an integer in [8, 4096]");
  return v;
}

pt::ContextPtr make_context(long p, long n) {
  if (p < 2 || !pt::is_prime_u64(static_cast<unsigned long>(p)))
    throw pt::ParseError("--prime must be a prime number");
  if (n < kMinPrecision || n > kMaxPrecision)
    throw pt::ParseError("--precision must lie in [8, 4096]");
  return pt::PAdicContext::make(static_cast<unsigned long>(p),
                                static_cast<int>(n));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

long parse_long(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw pt::ParseError("expected an integer for " + what + ", got '" + s +
                         "'");
  }
}

// Tree argument: inline "cayley:K,DEPTH" or a JSON file path.
pt::TreeGraph tree_from_spec(const std::string& spec) {
  if (spec.rfind("cayley:", 0) == 0) {
    auto parts = split(spec.substr(7), ',');
    if (parts.size() != 2)
      throw pt::ParseError("tree spec must be cayley:K,DEPTH or a file path");
    pt::CayleySpec cs;
    cs.order_k = static_cast<int>(parse_long(trim(parts[0]), "cayley order"));
    cs.depth = static_cast<int>(parse_long(trim(parts[1]), "cayley depth"));
    return pt::build_cayley(cs);
  }
  return pt::tree_from_json(pt::load_json_file(spec));
}

Json conditions_to_json(const pt::ConditionReport& report) {
  Json j;
  j["satisfied"] = report.satisfied;
  Json failures = Json::array();
  for (const auto& f : report.failures) {
    Json e;
    e["edge"] = pt::edge_key(f.edge);
    e["row"] = f.row;
    e["col"] = f.col;
    e["what"] = f.what;
    failures.push_back(e);
  }
  j["failures"] = failures;
  return j;
}

// ---------------------------------------------------------------------------
// arith: newline-separated expressions "op arg [arg] [@ key=val, key=val]".

struct ArithLine {
  std::string op;
  std::vector<std::string> args;
  std::map<std::string, std::string> opts;
};

ArithLine parse_arith_line(const std::string& line) {
  ArithLine out;
  std::string head = line;
  std::string tail;
  size_t at = line.find('@');
  if (at != std::string::npos) {
    head = line.substr(0, at);
    tail = line.substr(at + 1);
  }
  std::istringstream hs(head);
  std::string tok;
  while (hs >> tok) {
    if (out.op.empty())
      out.op = tok;
    else
      out.args.push_back(tok);
  }
  if (out.op.empty()) throw pt::ParseError("empty expression");
  for (const std::string& piece : split(tail, ',')) {
    std::string kv = trim(piece);
    if (kv.empty()) continue;
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw pt::ParseError("expected key=value after '@', got '" + kv + "'");
    out.opts[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
  }
  return out;
}

const char* sqrt_reason_name(pt::NoSolution::Reason r) {
  switch (r) {
    case pt::NoSolution::Reason::OddValuation:
      return "OddValuation";
    case pt::NoSolution::Reason::NonResidue:
      return "NonResidue";
    case pt::NoSolution::Reason::TwoAdicDigits:
      return "TwoAdicDigits";
  }
  return "Unknown";
}

Json digits_json(const pt::PAdicNumber& x, long count) {
  Json arr = Json::array();
  for (unsigned long d : x.digits(static_cast<int>(count))) arr.push_back(d);
  return arr;
}

Json eval_arith_line(const ArithLine& ln, long default_p, long default_n) {
  long p = default_p;
  long n = default_n;
  long ndigits = 8;
  for (const auto& [key, value] : ln.opts) {
    if (key == "p")
      p = parse_long(value, "p");
    else if (key == "precision")
      n = parse_long(value, "precision");
    else if (key == "digits")
      ndigits = parse_long(value, "digits");
    else
      throw pt::ParseError("unknown option '" + key + "' in expression");
  }
  pt::ContextPtr ctx = make_context(p, n);
  if (ndigits < 1 || ndigits > n)
    throw pt::ParseError("digits must lie in [1, precision]");

  auto arg = [&](size_t i) {
    return pt::PAdicNumber::from_rational(
        pt::rational_from_string(ln.args.at(i)), ctx);
  };
  auto need = [&](size_t count) {
    if (ln.args.size() != count)
      throw pt::ParseError("operation '" + ln.op + "' takes " +
                           std::to_string(count) + " argument(s)");
  };

  Json r;
  r["op"] = ln.op;
  r["p"] = p;
  r["precision"] = n;
  if (ln.op == "norm") {
    need(1);
    auto e = arg(0).norm_exponent();
    r["norm_exponent"] = e ? Json(*e) : Json(nullptr);
  } else if (ln.op == "val") {
    need(1);
    pt::PAdicNumber x = arg(0);
    r["valuation"] = x.is_zero() ? Json(nullptr) : Json(x.valuation());
  } else if (ln.op == "digits") {
    need(1);
    pt::PAdicNumber x = arg(0);
    r["padic"] = pt::padic_to_json(x);
    r["digits"] = digits_json(x, ndigits);
  } else if (ln.op == "sqrt") {
    need(1);
    pt::PAdicNumber x = arg(0);
    pt::SqrtCheck chk = pt::sqrt_exists(x);
    r["exists"] = chk.exists;
    if (!chk.exists) {
      r["reason"] = chk.reason ? Json(sqrt_reason_name(*chk.reason))
                               : Json(nullptr);
    } else {
      pt::SqrtRoots roots = pt::sqrt(x);
      r["principal"] = pt::padic_to_json(roots.principal);
      r["negated"] = pt::padic_to_json(roots.negated);
      r["digits"] = digits_json(roots.principal, ndigits);
    }
  } else if (ln.op == "inv") {
    need(1);
    r["padic"] = pt::padic_to_json(arg(0).inverse());
  } else if (ln.op == "exp") {
    need(1);
    r["padic"] = pt::padic_to_json(pt::exp_p(arg(0)));
  } else if (ln.op == "log") {
    need(1);
    r["padic"] = pt::padic_to_json(pt::log_p(arg(0)));
  } else if (ln.op == "add" || ln.op == "sub" || ln.op == "mul" ||
             ln.op == "div") {
    need(2);
    pt::PAdicNumber a = arg(0);
    pt::PAdicNumber b = arg(1);
    pt::PAdicNumber c = ln.op == "add"   ? a + b
                        : ln.op == "sub" ? a - b
                        : ln.op == "mul" ? a * b
                                         : a / b;
    r["padic"] = pt::padic_to_json(c);
  } else {
    throw pt::ParseError("unknown operation '" + ln.op + "'");
  }
  return r;
}

Json run_arith(const std::string& path, long p, long n) {
  std::string text;
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream in(path);
    if (!in) throw pt::ParseError("cannot open expression file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  Json results = Json::array();
  for (const std::string& raw : split(text, '\n')) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    Json r = eval_arith_line(parse_arith_line(line), p, n);
    Json entry;
    entry["expr"] = line;
    for (auto& [k, v] : r.items()) entry[k] = v;
    results.push_back(entry);
  }
  Json doc;
  doc["mode"] = "arith";
  doc["results"] = results;
  return doc;
}

// ---------------------------------------------------------------------------
// solve

struct SolveOptions {
  std::optional<long> k;
  std::string alpha;
  std::string beta;
  std::optional<long> block_m;
  std::string block_a;
  std::string block_b;
  std::optional<long> q;
  std::string matrix_file;
  std::string tree_spec;
  std::string law_file;
  long max_iters = 64;
  long depth = 3;
};

// Residuals of a constant one-coordinate law (z) on a regular truncation,
// against the two-state matrix with first row (alpha, beta). Returns the
// minimal residual valuation over all directed edges.
long constant_law_residual_valuation(const pt::PAdicNumber& z,
                                     const pt::PAdicNumber& alpha,
                                     const pt::PAdicNumber& beta, int k,
                                     int depth, const pt::ContextPtr& ctx) {
  pt::TreeGraph tree = pt::build_cayley({k, depth, 0});
  // Two-state matrix built directly from the p-adic parameters; columns
  // (alpha, 1-alpha) and (beta, 1-beta) sum to 1.
  pt::PMat rows = {
      {alpha, beta},
      {pt::PAdicNumber::one(ctx) - alpha, pt::PAdicNumber::one(ctx) - beta}};
  pt::EdgeMatrixField field = pt::EdgeMatrixField::homogeneous(
      pt::InteractionMatrix(ctx, std::move(rows)));
  pt::BoundaryLawField law = pt::BoundaryLawField::constant(ctx, 2, {z}, tree);
  long min_val = pt::PAdicNumber::kInfiniteValuation;
  for (const pt::DirectedEdge& e : tree.directed_edges()) {
    for (const pt::PAdicNumber& coord : pt::residual(law, field, tree, e)) {
      min_val = std::min(min_val, coord.valuation_lower_bound());
    }
  }
  return min_val;
}

Json run_solve(const SolveOptions& opt, long p, long n) {
  pt::ContextPtr ctx = make_context(p, n);
  Json doc;
  if (!opt.matrix_file.empty()) {
    // Contraction regime: verify the matrix conditions, then iterate the
    // consistency map to the all-ones law.
    if (opt.tree_spec.empty())
      throw pt::ParseError("--matrix solving requires --tree");
    pt::TreeGraph tree = tree_from_spec(opt.tree_spec);
    pt::EdgeMatrixField field =
        pt::field_from_json(pt::load_json_file(opt.matrix_file), ctx, true);
    pt::ConditionReport conditions =
        pt::check_uniqueness_conditions(field, tree);
    doc["mode"] = "contraction";
    doc["prime"] = p;
    doc["precision"] = n;
    doc["q"] = field.q();
    doc["conditions"] = conditions_to_json(conditions);
    if (!conditions.satisfied) {
      doc["solver_skipped"] = "matrix conditions not satisfied";
      return doc;
    }
    pt::BoundaryLawField z0 =
        opt.law_file.empty()
            ? pt::BoundaryLawField::all_ones(ctx, field.q(), tree)
            : pt::law_from_json(pt::load_json_file(opt.law_file), ctx,
                                field.q());
    pt::UniqueSolveResult result =
        pt::solve_unique(field, tree, z0, static_cast<int>(opt.max_iters));
    doc["log"] = pt::solve_log_to_json(result.log);
    doc["converged_to_ones"] =
        result.log.converged &&
        pt::distance_to_ones_valuation(result.law) >= n;
    return doc;
  }
  if (opt.block_m.has_value()) {
    if (!opt.k || opt.block_a.empty() || opt.block_b.empty())
      throw pt::ParseError("block solving requires --k, --block-a, --block-b");
    pt::PAdicNumber a = pt::PAdicNumber::from_rational(
        pt::rational_from_string(opt.block_a), ctx);
    pt::PAdicNumber b = pt::PAdicNumber::from_rational(
        pt::rational_from_string(opt.block_b), ctx);
    pt::RootReport report = pt::solve_block(
        static_cast<int>(*opt.k), static_cast<int>(*opt.block_m), a, b);
    doc["mode"] = "block";
    doc["prime"] = p;
    doc["precision"] = n;
    doc["k"] = *opt.k;
    doc["m"] = *opt.block_m;
    doc["report"] = pt::root_report_to_json(report);
    return doc;
  }
  if (opt.k && !opt.alpha.empty() && !opt.beta.empty()) {
    pt::PAdicNumber alpha = pt::PAdicNumber::from_rational(
        pt::rational_from_string(opt.alpha), ctx);
    pt::PAdicNumber beta = pt::PAdicNumber::from_rational(
        pt::rational_from_string(opt.beta), ctx);
    int k = static_cast<int>(*opt.k);
    if (!opt.tree_spec.empty()) {
      // Extension onto a host tree containing a regular truncation.
      pt::TreeGraph tree = tree_from_spec(opt.tree_spec);
      pt::CayleyEmbedding emb =
          pt::embed_cayley(tree, k, static_cast<int>(opt.depth));
      pt::RootReport report = pt::solve_translation_invariant(k, alpha, beta);
      const pt::Root* lifted = nullptr;
      for (const pt::Root& r : report.roots)
        if (r.is_hensel) lifted = &r;
      if (lifted == nullptr)
        throw pt::Unsupported("no lifted root available to extend");
      mpq_class qa = pt::rational_from_string(opt.alpha);
      mpq_class qb = pt::rational_from_string(opt.beta);
      int q = static_cast<int>(opt.q.value_or(2));
      if (q < 2) throw pt::ParseError("--q must be at least 2");
      std::vector<std::vector<mpq_class>> middle(
          std::max(0, q - 2), std::vector<mpq_class>(q, mpq_class(0)));
      pt::EdgeMatrixField field = pt::EdgeMatrixField::homogeneous(
          pt::make_first_row_matrix(q, qa, qb, middle, ctx));
      pt::BoundaryLawField law = pt::extend_to_general_tree(
          tree, emb, lifted->value, alpha, beta, field);
      doc["mode"] = "extend";
      doc["prime"] = p;
      doc["precision"] = n;
      doc["k"] = k;
      doc["q"] = q;
      doc["report"] = pt::root_report_to_json(report);
      doc["law"] = pt::law_to_json(law);
      long min_val = pt::PAdicNumber::kInfiniteValuation;
      for (const pt::DirectedEdge& e : tree.directed_edges())
        for (const pt::PAdicNumber& c : pt::residual(law, field, tree, e))
          min_val = std::min(min_val, c.valuation_lower_bound());
      doc["residual_min_valuation"] =
          min_val >= pt::PAdicNumber::kInfiniteValuation ? Json(nullptr)
                                                         : Json(min_val);
      doc["residual_ok"] = min_val >= n - pt::kVerifySlack;
      return doc;
    }
    // Translation-invariant roots with a residual check on a small
    // regular truncation.
    pt::RootReport report = pt::solve_translation_invariant(k, alpha, beta);
    doc["mode"] = "translation-invariant";
    doc["prime"] = p;
    doc["precision"] = n;
    doc["k"] = k;
    doc["alpha"] = opt.alpha;
    doc["beta"] = opt.beta;
    doc["report"] = pt::root_report_to_json(report);
    Json residuals = Json::array();
    bool all_ok = true;
    for (const pt::Root& r : report.roots) {
      long v = constant_law_residual_valuation(
          r.value, alpha, beta, k, static_cast<int>(opt.depth), ctx);
      Json e;
      e["origin"] = r.origin;
      e["min_valuation"] =
          v >= pt::PAdicNumber::kInfiniteValuation ? Json(nullptr) : Json(v);
      e["ok"] = v >= n - pt::kVerifySlack;
      all_ok = all_ok && v >= n - pt::kVerifySlack;
      residuals.push_back(e);
    }
    doc["residual_check"] = residuals;
    doc["residuals_ok"] = all_ok;
    return doc;
  }
  throw pt::Unsupported(
      "no applicable solver: give --matrix/--tree, or --k with "
      "--alpha/--beta, or --block-m with --block-a/--block-b");
}

// ---------------------------------------------------------------------------
// classify / measure

pt::BoundaryLawField law_or_ones(const std::string& law_file,
                                 const pt::ContextPtr& ctx, int q,
                                 const pt::TreeGraph& tree) {
  if (law_file.empty()) return pt::BoundaryLawField::all_ones(ctx, q, tree);
  return pt::law_from_json(pt::load_json_file(law_file), ctx, q);
}

Json run_classify(const std::string& matrix_file, const std::string& tree_spec,
                  const std::string& law_file, long max_steps, long p, long n) {
  pt::ContextPtr ctx = make_context(p, n);
  pt::TreeGraph tree = tree_from_spec(tree_spec);
  pt::EdgeMatrixField field =
      pt::field_from_json(pt::load_json_file(matrix_file), ctx, true);
  pt::BoundaryLawField law = law_or_ones(law_file, ctx, field.q(), tree);
  pt::BoundednessVerdict verdict = pt::classify_boundedness(
      field, tree, law, static_cast<int>(max_steps));
  Json doc;
  doc["mode"] = "classify";
  doc["prime"] = p;
  doc["precision"] = n;
  doc["q"] = field.q();
  doc["verdict"] = pt::verdict_to_json(verdict);
  return doc;
}

std::vector<int> parse_vertex_list(const std::string& s) {
  std::vector<int> out;
  for (const std::string& piece : split(s, ',')) {
    std::string t = trim(piece);
    if (t.empty()) continue;
    out.push_back(static_cast<int>(parse_long(t, "vertex id")));
  }
  if (out.empty()) throw pt::ParseError("--volume must list vertex ids");
  return out;
}

pt::CylinderAssignment parse_assignment(const std::string& s) {
  pt::CylinderAssignment cfg;
  for (const std::string& piece : split(s, ',')) {
    std::string t = trim(piece);
    if (t.empty()) continue;
    size_t colon = t.find(':');
    if (colon == std::string::npos)
      throw pt::ParseError("--assign entries look like VERTEX:STATE");
    int v = static_cast<int>(parse_long(trim(t.substr(0, colon)), "vertex"));
    int st = static_cast<int>(parse_long(trim(t.substr(colon + 1)), "state"));
    cfg.states[v] = st;
  }
  if (cfg.states.empty())
    throw pt::ParseError("--assign must list VERTEX:STATE pairs");
  return cfg;
}

Json run_measure(const std::string& matrix_file, const std::string& tree_spec,
                 const std::string& law_file, const std::string& volume_arg,
                 const std::string& assign_arg, bool with_markov, long p,
                 long n) {
  pt::ContextPtr ctx = make_context(p, n);
  pt::TreeGraph tree = tree_from_spec(tree_spec);
  pt::EdgeMatrixField field =
      pt::field_from_json(pt::load_json_file(matrix_file), ctx, true);
  pt::BoundaryLawField law = law_or_ones(law_file, ctx, field.q(), tree);
  pt::Volume lambda(tree, parse_vertex_list(volume_arg));

  Json doc;
  doc["mode"] = "measure";
  doc["prime"] = p;
  doc["precision"] = n;
  doc["q"] = field.q();
  doc["volume"] = Json(lambda.members());
  doc["closure"] = Json(pt::closure(tree, lambda));
  doc["zeta"] = pt::padic_to_json(
      pt::partition_function(law, field, tree, lambda));
  if (!assign_arg.empty()) {
    pt::CylinderAssignment cfg = parse_assignment(assign_arg);
    Json assign;
    for (const auto& [v, st] : cfg.states)
      assign[std::to_string(v)] = st;
    doc["assignment"] = assign;
    doc["value"] = pt::padic_to_json(
        pt::measure_eval(law, field, tree, lambda, cfg));
    if (with_markov) {
      pt::TransitionSystem ts =
          pt::transition_system_from_law(law, field, tree);
      Json mk;
      mk["value"] = pt::padic_to_json(
          pt::markov_eval(ts, tree, lambda, cfg, lambda.members().front()));
      mk["reversible"] = pt::check_reversibility(ts, tree);
      doc["markov"] = mk;
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------
// demos: fixed parameters, byte-stable output, compared to golden files.

pt::EdgeMatrixField field_from_integer_rows(
    const std::vector<std::vector<long>>& rows, const pt::ContextPtr& ctx) {
  std::vector<std::vector<mpq_class>> qrows;
  for (const auto& row : rows) {
    std::vector<mpq_class> qrow;
    for (long v : row) qrow.emplace_back(v);
    qrows.push_back(qrow);
  }
  return pt::EdgeMatrixField::homogeneous(
      pt::matrix_from_rationals(qrows, ctx, true));
}

Json matrix_rows_json(const std::vector<std::vector<std::string>>& rows) {
  Json out = Json::array();
  for (const auto& row : rows) {
    Json r = Json::array();
    for (const auto& cell : row) r.push_back(cell);
    out.push_back(r);
  }
  return out;
}

const pt::Root& find_root(const pt::RootReport& report, bool want_hensel) {
  for (const pt::Root& r : report.roots) {
    if (r.origin == "trivial") continue;
    if (r.is_hensel == want_hensel) return r;
  }
  throw pt::Error("expected root not present in report");
}

Json demo_example_1a() {
  pt::ContextPtr ctx = pt::PAdicContext::make(3, 64);
  pt::PAdicNumber alpha = pt::PAdicNumber::from_integer(5, ctx);
  pt::PAdicNumber beta = pt::PAdicNumber::from_integer(1, ctx);
  pt::RootReport report = pt::solve_translation_invariant(1, alpha, beta);
  Json doc;
  doc["name"] = "example-1a";
  doc["prime"] = 3;
  doc["precision"] = 64;
  doc["k"] = 1;
  doc["alpha"] = "5";
  doc["beta"] = "1";
  doc["report"] = pt::root_report_to_json(report);
  // The non-trivial root must be (alpha - 1) / beta = 4 on the nose.
  const pt::Root& extra = find_root(report, true);
  doc["expected_root"] = "4";
  doc["matches_expected"] =
      pt::eq_mod(extra.value, pt::PAdicNumber::from_integer(4, ctx),
                 64 - pt::kVerifySlack);
  return doc;
}

Json demo_example_1b() {
  pt::ContextPtr ctx = pt::PAdicContext::make(3, 64);
  pt::SqrtRoots s13 = pt::sqrt(pt::PAdicNumber::from_integer(13, ctx));
  pt::PAdicNumber alpha = pt::PAdicNumber::from_integer(2, ctx);
  pt::PAdicNumber beta = pt::PAdicNumber::from_integer(3, ctx);
  pt::RootReport report = pt::solve_translation_invariant(2, alpha, beta);
  const pt::Root& z1 = find_root(report, true);
  const pt::Root& z2 = find_root(report, false);
  Json doc;
  doc["name"] = "example-1b";
  doc["prime"] = 3;
  doc["precision"] = 64;
  doc["k"] = 2;
  doc["alpha"] = "2";
  doc["beta"] = "3";
  doc["sqrt13_digits"] = digits_json(s13.principal, 7);
  doc["report"] = pt::root_report_to_json(report);
  auto exponent_json = [](const pt::PAdicNumber& x) {
    auto e = x.norm_exponent();
    return e ? Json(*e) : Json(nullptr);
  };
  doc["z1_norm_exponent"] = exponent_json(z1.value);
  doc["z1_minus_one_norm_exponent"] =
      exponent_json(z1.value - pt::PAdicNumber::one(ctx));
  doc["z2_norm_exponent"] = exponent_json(z2.value);
  doc["flags"] = Json::array({z1.in_Ep ? Json(*z1.in_Ep) : Json(nullptr),
                              z2.in_Ep ? Json(*z2.in_Ep) : Json(nullptr)});
  return doc;
}

Json demo_example_2() {
  pt::ContextPtr ctx = pt::PAdicContext::make(3, 64);
  pt::PAdicNumber alpha = pt::PAdicNumber::from_integer(6, ctx);
  pt::PAdicNumber beta = pt::PAdicNumber::from_integer(19, ctx);
  pt::RootReport report = pt::solve_translation_invariant(2, alpha, beta);
  // Closed form (359 +- 39 sqrt(61)) / 722 for the two non-trivial roots.
  pt::PAdicNumber s61 =
      pt::sqrt(pt::PAdicNumber::from_integer(61, ctx)).principal;
  pt::PAdicNumber c359 = pt::PAdicNumber::from_integer(359, ctx);
  pt::PAdicNumber c39 = pt::PAdicNumber::from_integer(39, ctx);
  pt::PAdicNumber c722 = pt::PAdicNumber::from_integer(722, ctx);
  pt::PAdicNumber plus = (c359 + c39 * s61) / c722;
  pt::PAdicNumber minus = (c359 - c39 * s61) / c722;
  Json doc;
  doc["name"] = "example-2";
  doc["prime"] = 3;
  doc["precision"] = 64;
  doc["k"] = 2;
  doc["alpha"] = "6";
  doc["beta"] = "19";
  doc["report"] = pt::root_report_to_json(report);
  doc["closed_form_plus"] = pt::padic_to_json(plus);
  doc["closed_form_minus"] = pt::padic_to_json(minus);
  long agreement = pt::PAdicNumber::kInfiniteValuation;
  bool all_in_Ep = true;
  for (const pt::Root& r : report.roots) {
    if (r.origin == "trivial") continue;
    long best = std::max((r.value - plus).valuation_lower_bound(),
                         (r.value - minus).valuation_lower_bound());
    agreement = std::min(agreement, best);
    all_in_Ep = all_in_Ep && r.in_Ep.value_or(false);
  }
  doc["agreement_valuation"] =
      agreement >= pt::PAdicNumber::kInfiniteValuation ? Json(nullptr)
                                                       : Json(agreement);
  doc["matches_closed_form"] = agreement >= 30;
  doc["both_roots_in_Ep"] = all_in_Ep;
  return doc;
}

Json demo_partition_q() {
  pt::ContextPtr ctx = pt::PAdicContext::make(3, 64);
  pt::TreeGraph tree = pt::build_cayley({2, 2, 0});
  std::vector<std::vector<long>> rows = {{2, 3, 3}, {1, 1, 1}, {-2, -3, -3}};
  pt::EdgeMatrixField field = field_from_integer_rows(rows, ctx);
  pt::BoundaryLawField law = pt::BoundaryLawField::all_ones(ctx, 3, tree);
  pt::Volume lambda(tree, tree.vertices());
  pt::PAdicNumber zeta = pt::partition_function(law, field, tree, lambda);
  Json doc;
  doc["name"] = "partition-q";
  doc["prime"] = 3;
  doc["precision"] = 64;
  doc["q"] = 3;
  doc["matrix"] =
      matrix_rows_json({{"2", "3", "3"}, {"1", "1", "1"}, {"-2", "-3", "-3"}});
  doc["tree"] = Json{{"cayley", Json{{"k", 2}, {"depth", 2}}}};
  doc["volume"] = Json(lambda.members());
  doc["zeta"] = pt::padic_to_json(zeta);
  doc["equals_q"] =
      pt::eq_mod(zeta, pt::PAdicNumber::from_integer(3, ctx), 64);
  return doc;
}

Json demo_contraction() {
  pt::ContextPtr ctx = pt::PAdicContext::make(3, 64);
  pt::TreeGraph tree = pt::build_cayley({2, 3, 0});
  std::vector<std::vector<long>> rows = {{5, 2, 2}, {-2, 4, 1}, {-2, -5, -2}};
  pt::EdgeMatrixField field = field_from_integer_rows(rows, ctx);
  pt::ConditionReport conditions = pt::check_uniqueness_conditions(
      field.get(pt::DirectedEdge{0, 0}));
  // Constant start inside the unit-distance ball around the all-ones field,
  // stored per edge with no continuation values.
  pt::BoundaryLawField z0;
  z0.ctx = ctx;
  z0.q = 3;
  pt::PVec start = {pt::PAdicNumber::from_integer(4, ctx),
                    pt::PAdicNumber::from_integer(7, ctx)};
  for (const pt::DirectedEdge& e : tree.directed_edges()) z0.values[e] = start;
  pt::UniqueSolveResult result = pt::solve_unique(field, tree, z0, 64);
  Json doc;
  doc["name"] = "contraction";
  doc["prime"] = 3;
  doc["precision"] = 64;
  doc["q"] = 3;
  doc["matrix"] = matrix_rows_json(
      {{"5", "2", "2"}, {"-2", "4", "1"}, {"-2", "-5", "-2"}});
  doc["tree"] = Json{{"cayley", Json{{"k", 2}, {"depth", 3}}}};
  doc["start_value"] = Json::array({"4", "7"});
  doc["conditions_satisfied"] = conditions.satisfied;
  doc["log"] = pt::solve_log_to_json(result.log);
  doc["converged_to_ones"] =
      result.log.converged && pt::distance_to_ones_valuation(result.law) >= 64;
  return doc;
}

Json demo_witness() {
  pt::ContextPtr ctx = pt::PAdicContext::make(3, 64);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 20; ++i) edges.push_back({i, i + 1});
  pt::TreeGraph tree = pt::TreeGraph::from_edges(edges);
  std::vector<std::vector<mpq_class>> rows(
      3, std::vector<mpq_class>(3, mpq_class(1, 3)));
  pt::EdgeMatrixField field = pt::EdgeMatrixField::homogeneous(
      pt::matrix_from_rationals(rows, ctx, true));
  pt::BoundaryLawField law = pt::BoundaryLawField::all_ones(ctx, 3, tree);
  pt::BoundednessVerdict verdict =
      pt::classify_boundedness(field, tree, law, 20);
  Json doc;
  doc["name"] = "witness";
  doc["prime"] = 3;
  doc["precision"] = 64;
  doc["q"] = 3;
  doc["matrix"] = matrix_rows_json({{"1/3", "1/3", "1/3"},
                                    {"1/3", "1/3", "1/3"},
                                    {"1/3", "1/3", "1/3"}});
  doc["tree"] = pt::tree_to_json(tree);
  doc["verdict"] = pt::verdict_to_json(verdict);
  return doc;
}

Json compute_demo(const std::string& name) {
  if (name == "example-1a") return demo_example_1a();
  if (name == "example-1b") return demo_example_1b();
  if (name == "example-2") return demo_example_2();
  if (name == "partition-q") return demo_partition_q();
  if (name == "contraction") return demo_contraction();
  if (name == "witness") return demo_witness();
  throw pt::ParseError(
      "unknown demo '" + name +
      "' (expected example-1a, example-1b, example-2, partition-q, "
      "contraction, witness)");
}

std::string resolve_golden_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("PADTREE_GOLDEN_DIR"))
    if (*env != '\0') return env;
  return PADTREE_GOLDEN_DIR;
}

int run_demo(const std::string& name, const std::string& golden_dir_flag,
             bool write_golden, const std::string& out_path) {
  Json doc = compute_demo(name);
  std::string rendered = doc.dump(2);
  rendered.push_back('\n');
  std::string golden_path = resolve_golden_dir(golden_dir_flag) + "/" + name +
                            ".json";
  if (!out_path.empty()) pt::save_json_file(out_path, doc);
  std::cout << rendered;
  if (write_golden) {
    std::ofstream out(golden_path, std::ios::binary);
    if (!out)
      throw pt::ParseError("cannot write golden file: " + golden_path);
    out << rendered;
    std::cerr << "golden file written: " << golden_path << "\n";
    return 0;
  }
  std::ifstream in(golden_path, std::ios::binary);
  if (!in)
    throw GoldenMismatch("golden file missing: " + golden_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string golden = ss.str();
  if (golden != rendered) {
    size_t i = 0;
    while (i < golden.size() && i < rendered.size() &&
           golden[i] == rendered[i])
      ++i;
    throw GoldenMismatch("demo '" + name +
                         "' diverges from golden output at byte " +
                         std::to_string(i));
  }
  std::cerr << "demo '" << name << "' matches golden output\n";
  return 0;
}

// ---------------------------------------------------------------------------

void emit(const Json& doc, const std::string& out_path) {
  if (!out_path.empty()) pt::save_json_file(out_path, doc);
  std::cout << doc.dump(2) << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Exact p-adic boundary laws and Markov chains on finite trees"};
  app.require_subcommand(1);

  long prime = 3;
  long precision = 0;  // 0: resolve from PADTREE_PRECISION or 64
  std::string out_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--prime", prime, "prime p of the base field")
        ->capture_default_str();
    sub->add_option("--precision", precision,
                    "significant base-p digits (default: PADTREE_PRECISION "
                    "or 64)");
    sub->add_option("--out", out_path, "also write the JSON document here");
  };

  // arith
  auto* arith = app.add_subcommand(
      "arith", "evaluate p-adic expressions from a file ('-' for stdin)");
  std::string expr_file;
  arith->add_option("file", expr_file, "expression file")->required();
  add_common(arith);

  // solve
  auto* solve = app.add_subcommand(
      "solve", "boundary-law solvers: contraction, scalar roots, blocks");
  SolveOptions sopt;
  long k_arg = 0, block_m_arg = 0, q_arg = 0;
  auto* k_opt = solve->add_option("--k", k_arg, "branching order k");
  solve->add_option("--alpha", sopt.alpha, "matrix entry alpha (rational)");
  solve->add_option("--beta", sopt.beta, "matrix entry beta (rational)");
  auto* bm_opt =
      solve->add_option("--block-m", block_m_arg, "leading block size m");
  solve->add_option("--block-a", sopt.block_a, "block column sum A");
  solve->add_option("--block-b", sopt.block_b, "block column sum B");
  auto* q_opt = solve->add_option("--q", q_arg, "number of states");
  solve->add_option("--matrix", sopt.matrix_file, "interaction matrix JSON")
      ->check(CLI::ExistingFile);
  solve->add_option("--tree", sopt.tree_spec,
                    "tree: cayley:K,DEPTH or JSON file");
  solve->add_option("--law", sopt.law_file, "starting law JSON")
      ->check(CLI::ExistingFile);
  solve->add_option("--max-iters", sopt.max_iters, "iteration cap")
      ->capture_default_str();
  solve->add_option("--depth", sopt.depth,
                    "truncation depth for residual checks / embedding")
      ->capture_default_str();
  add_common(solve);

  // classify
  auto* classify = app.add_subcommand(
      "classify", "boundedness verdict for the chain of a law");
  std::string cls_matrix, cls_tree, cls_law;
  long cls_steps = 20;
  classify->add_option("--matrix", cls_matrix, "interaction matrix JSON")
      ->required()
      ->check(CLI::ExistingFile);
  classify->add_option("--tree", cls_tree, "tree: cayley:K,DEPTH or JSON file")
      ->required();
  classify->add_option("--law", cls_law, "law JSON (default: all ones)")
      ->check(CLI::ExistingFile);
  classify->add_option("--max-iters", cls_steps, "witness length cap")
      ->capture_default_str();
  add_common(classify);

  // measure
  auto* measure = app.add_subcommand(
      "measure", "partition function and cylinder probabilities");
  std::string ms_matrix, ms_tree, ms_law, ms_volume, ms_assign;
  bool ms_markov = false;
  measure->add_option("--matrix", ms_matrix, "interaction matrix JSON")
      ->required()
      ->check(CLI::ExistingFile);
  measure->add_option("--tree", ms_tree, "tree: cayley:K,DEPTH or JSON file")
      ->required();
  measure->add_option("--law", ms_law, "law JSON (default: all ones)")
      ->check(CLI::ExistingFile);
  measure->add_option("--volume", ms_volume, "comma-separated vertex ids")
      ->required();
  measure->add_option("--assign", ms_assign,
                      "VERTEX:STATE pairs covering the closed volume");
  measure->add_flag("--markov", ms_markov,
                    "also evaluate through the transition-matrix chain");
  add_common(measure);

  // demo
  auto* demo = app.add_subcommand("demo", "recompute a demo and diff golden");
  std::string demo_name, golden_dir;
  bool write_golden = false;
  demo->add_option("name", demo_name,
                   "example-1a | example-1b | example-2 | partition-q | "
                   "contraction | witness")
      ->required();
  demo->add_option("--golden-dir", golden_dir, "golden file directory");
  demo->add_flag("--write-golden", write_golden,
                 "rewrite the golden file instead of comparing");
  demo->add_option("--out", out_path, "also write the JSON document here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (precision == 0) precision = precision_from_env();

  if (app.got_subcommand(arith)) {
    emit(run_arith(expr_file, prime, precision), out_path);
    return 0;
  }
  if (app.got_subcommand(solve)) {
    if (k_opt->count() > 0) sopt.k = k_arg;
    if (bm_opt->count() > 0) sopt.block_m = block_m_arg;
    if (q_opt->count() > 0) sopt.q = q_arg;
    emit(run_solve(sopt, prime, precision), out_path);
    return 0;
  }
  if (app.got_subcommand(classify)) {
    emit(run_classify(cls_matrix, cls_tree, cls_law, cls_steps, prime,
                      precision),
         out_path);
    return 0;
  }
  if (app.got_subcommand(measure)) {
    emit(run_measure(ms_matrix, ms_tree, ms_law, ms_volume, ms_assign,
                     ms_markov, prime, precision),
         out_path);
    return 0;
  }
  if (app.got_subcommand(demo)) {
    return run_demo(demo_name, golden_dir, write_golden, out_path);
  }
  throw pt::ParseError("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pt::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const pt::Unsupported& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 4;
  } catch (const pt::ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 4;
  } catch (const pt::NoEmbedding& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 4;
  } catch (const GoldenMismatch& e) {
    std::cerr << "golden mismatch: " << e.what() << "\n";
    return 5;
  } catch (const pt::Error& e) {
    std::cerr << "arithmetic error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
