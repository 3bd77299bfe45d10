#include "padtree/io.hpp"

#include <fstream>

namespace padtree {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const Json& expect(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(std::string("missing key '") + key + "'");
  }
  return j.at(key);
}

long expect_long(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) fail(what + " must be an integer");
  return j.get<long>();
}

}  // namespace

mpq_class rational_from_string(const std::string& text) {
  if (text.empty()) fail("empty rational literal");
  // mpq accepts forms like "12", "-3/4"; validate shape first so stray
  // characters do not parse as 0.
  std::size_t slash = std::string::npos;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '-' && (i == 0 || (slash != std::string::npos && i == slash + 1))) {
      continue;
    }
    if (c == '/') {
      if (slash != std::string::npos || i == 0 || i + 1 == text.size()) {
        fail("malformed rational '" + text + "'");
      }
      slash = i;
      continue;
    }
    if (c < '0' || c > '9') fail("malformed rational '" + text + "'");
  }
  mpq_class value;
  if (value.set_str(text, 10) != 0) fail("malformed rational '" + text + "'");
  if (value.get_den() == 0) fail("zero denominator in '" + text + "'");
  value.canonicalize();
  return value;
}

std::string rational_to_string(const mpq_class& value) {
  mpq_class c = value;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Json padic_to_json(const PAdicNumber& x) {
  Json j;
  j["p"] = x.context()->p();
  if (x.is_exact_zero()) {
    j["zero"] = true;
    return j;
  }
  if (x.is_ball()) {
    j["zero_to_precision"] = x.valuation_lower_bound();
    return j;
  }
  j["valuation"] = x.valuation();
  j["digits"] = x.digits(x.known_digits());
  j["known_digits"] = x.known_digits();
  return j;
}

PAdicNumber padic_from_json(const Json& j, const ContextPtr& ctx) {
  if (!j.is_object()) fail("value record must be an object");
  const long p = expect_long(expect(j, "p"), "p");
  if (p != static_cast<long>(ctx->p())) {
    fail("value record for p=" + std::to_string(p) +
         " used in a p=" + std::to_string(ctx->p()) + " context");
  }
  if (j.contains("zero") && j.at("zero").is_boolean() &&
      j.at("zero").get<bool>()) {
    return PAdicNumber::zero(ctx);
  }
  if (j.contains("zero_to_precision")) {
    return PAdicNumber::zero_at(
        ctx, expect_long(j.at("zero_to_precision"), "zero_to_precision"));
  }
  const long val = expect_long(expect(j, "valuation"), "valuation");
  const Json& digits = expect(j, "digits");
  if (!digits.is_array() || digits.empty()) {
    fail("digits must be a nonempty array");
  }
  const long known = j.contains("known_digits")
                         ? expect_long(j.at("known_digits"), "known_digits")
                         : static_cast<long>(digits.size());
  if (known != static_cast<long>(digits.size())) {
    fail("known_digits disagrees with the digit count");
  }
  if (known > ctx->precision()) fail("more digits than the working precision");
  mpz_class unit = 0;
  for (std::size_t i = digits.size(); i > 0; --i) {
    const long d = expect_long(digits[i - 1], "digit");
    if (d < 0 || d >= static_cast<long>(ctx->p())) {
      fail("digit out of range");
    }
    unit = unit * static_cast<long>(ctx->p()) + d;
  }
  try {
    return PAdicNumber::from_parts(ctx, val, unit, static_cast<int>(known));
  } catch (const Error& e) {
    fail(std::string("bad value record: ") + e.what());
  }
}

TreeGraph tree_from_json(const Json& j) {
  if (!j.is_object()) fail("tree document must be an object");
  if (j.contains("cayley")) {
    const Json& c = j.at("cayley");
    CayleySpec spec;
    spec.order_k = static_cast<int>(expect_long(expect(c, "k"), "k"));
    spec.depth = static_cast<int>(expect_long(expect(c, "depth"), "depth"));
    if (c.contains("root")) {
      spec.root = static_cast<int>(expect_long(c.at("root"), "root"));
    }
    return build_cayley(spec);
  }
  const Json& edges_j = expect(j, "edges");
  if (!edges_j.is_array()) fail("edges must be an array");
  std::vector<std::pair<int, int>> edges;
  for (const Json& e : edges_j) {
    if (!e.is_array() || e.size() != 2) fail("edge must be a pair [x, y]");
    edges.emplace_back(static_cast<int>(expect_long(e[0], "vertex")),
                       static_cast<int>(expect_long(e[1], "vertex")));
  }
  TreeGraph tree = [&] {
    if (!j.contains("vertices")) return TreeGraph::from_edges(edges);
    const Json& verts_j = j.at("vertices");
    if (!verts_j.is_array()) fail("vertices must be an array");
    std::vector<int> vertices;
    for (const Json& v : verts_j) {
      vertices.push_back(static_cast<int>(expect_long(v, "vertex")));
    }
    return TreeGraph::from_vertices_and_edges(vertices, edges);
  }();
  if (j.contains("completion_degree")) {
    tree.completion_degree = static_cast<int>(
        expect_long(j.at("completion_degree"), "completion_degree"));
  }
  return tree;
}

Json tree_to_json(const TreeGraph& tree) {
  Json j;
  j["vertices"] = tree.vertices();
  Json edges = Json::array();
  for (const auto& [x, y] : tree.edges()) edges.push_back(Json::array({x, y}));
  j["edges"] = edges;
  if (tree.completion_degree) {
    j["completion_degree"] = *tree.completion_degree;
  }
  return j;
}

namespace {

InteractionMatrix matrix_from_json(const Json& j, const ContextPtr& ctx,
                                   bool check_stochastic) {
  if (!j.is_array() || j.empty()) fail("matrix must be a nonempty array");
  std::vector<std::vector<mpq_class>> rows;
  for (const Json& row_j : j) {
    if (!row_j.is_array() || row_j.size() != j.size()) {
      fail("matrix must be square");
    }
    std::vector<mpq_class> row;
    for (const Json& cell : row_j) {
      if (!cell.is_string()) fail("matrix entries must be rational strings");
      row.push_back(rational_from_string(cell.get<std::string>()));
    }
    rows.push_back(std::move(row));
  }
  return matrix_from_rationals(rows, ctx, check_stochastic);
}

DirectedEdge edge_from_key(const std::string& key) {
  const std::size_t arrow = key.find("->");
  if (arrow == std::string::npos) fail("edge key must look like 'x->y'");
  try {
    return DirectedEdge{std::stoi(key.substr(0, arrow)),
                        std::stoi(key.substr(arrow + 2))};
  } catch (const std::exception&) {
    fail("malformed edge key '" + key + "'");
  }
}

}  // namespace

EdgeMatrixField field_from_json(const Json& j, const ContextPtr& ctx,
                                bool check_stochastic) {
  if (j.is_array()) {
    return EdgeMatrixField::homogeneous(
        matrix_from_json(j, ctx, check_stochastic));
  }
  if (j.is_object() && j.contains("per_edge")) {
    const Json& entries = j.at("per_edge");
    if (!entries.is_object()) fail("per_edge must be an object");
    std::map<DirectedEdge, InteractionMatrix> matrices;
    for (const auto& [key, value] : entries.items()) {
      matrices.emplace(edge_from_key(key),
                       matrix_from_json(value, ctx, check_stochastic));
    }
    return EdgeMatrixField::per_edge(std::move(matrices));
  }
  fail("matrix document must be an array or hold 'per_edge'");
}

BoundaryLawField law_from_json(const Json& j, const ContextPtr& ctx, int q) {
  if (!j.is_object()) fail("law document must be an object");
  BoundaryLawField law;
  law.ctx = ctx;
  law.q = q;
  auto read_vector = [&](const Json& arr) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != q - 1) {
      fail("law vector must hold q-1 records");
    }
    PVec vec;
    for (const Json& rec : arr) vec.push_back(padic_from_json(rec, ctx));
    return vec;
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "phantom") {
      if (!value.is_object()) fail("phantom must be an object");
      for (const auto& [vkey, lists] : value.items()) {
        int vertex = 0;
        try {
          vertex = std::stoi(vkey);
        } catch (const std::exception&) {
          fail("phantom keys must be vertex ids");
        }
        if (!lists.is_array()) fail("phantom entries must be arrays");
        for (const Json& arr : lists) {
          law.phantom[vertex].push_back(read_vector(arr));
        }
      }
      continue;
    }
    law.values[edge_from_key(key)] = read_vector(value);
  }
  if (law.values.empty()) fail("law document holds no edges");
  return law;
}

Json law_to_json(const BoundaryLawField& law) {
  Json j = Json::object();
  for (const auto& [e, vec] : law.values) {
    Json arr = Json::array();
    for (const PAdicNumber& x : vec) arr.push_back(padic_to_json(x));
    j[edge_key(e)] = arr;
  }
  if (!law.phantom.empty()) {
    Json ph = Json::object();
    for (const auto& [v, lists] : law.phantom) {
      Json vertex_lists = Json::array();
      for (const PVec& vec : lists) {
        Json arr = Json::array();
        for (const PAdicNumber& x : vec) arr.push_back(padic_to_json(x));
        vertex_lists.push_back(arr);
      }
      ph[std::to_string(v)] = vertex_lists;
    }
    j["phantom"] = ph;
  }
  return j;
}

Json certificate_to_json(const HenselCertificate& cert) {
  Json j;
  j["gamma"] = cert.gamma;
  j["vG1"] = cert.vG1 ? Json(*cert.vG1) : Json(nullptr);
  j["vGp1"] = cert.vGp1 ? Json(*cert.vGp1) : Json(nullptr);
  j["valid"] = cert.valid;
  if (!cert.detail.empty()) j["detail"] = cert.detail;
  return j;
}

Json root_report_to_json(const RootReport& report) {
  Json j;
  j["certificate"] = certificate_to_json(report.cert);
  Json roots = Json::array();
  for (const Root& r : report.roots) {
    Json rj;
    rj["value"] = padic_to_json(r.value);
    rj["in_Ep"] = r.in_Ep ? Json(*r.in_Ep) : Json(nullptr);
    rj["is_hensel"] = r.is_hensel;
    rj["origin"] = r.origin;
    roots.push_back(rj);
  }
  j["roots"] = roots;
  return j;
}

Json solve_log_to_json(const SolveLog& log) {
  Json j;
  Json distances = Json::array();
  for (long d : log.distance_valuations) {
    // Entries at the infinite-valuation sentinel mean "indistinguishable
    // from the all-ones field"; render them as null.
    if (d >= PAdicNumber::kInfiniteValuation)
      distances.push_back(nullptr);
    else
      distances.push_back(d);
  }
  j["distance_valuations"] = distances;
  j["iterations"] = log.iterations;
  j["converged"] = log.converged;
  return j;
}

Json witness_to_json(const WitnessReport& report) {
  Json j;
  j["path"] = report.path;
  j["states"] = report.states;
  j["norm_exponents"] = report.cumulative_exponents;
  j["step_exponents"] = report.step_exponents;
  j["value"] = padic_to_json(report.value);
  return j;
}

Json verdict_to_json(const BoundednessVerdict& verdict) {
  Json j;
  switch (verdict.tag) {
    case BoundednessVerdict::Tag::Bounded:
      j["verdict"] = "bounded";
      break;
    case BoundednessVerdict::Tag::Unbounded:
      j["verdict"] = "unbounded";
      break;
    case BoundednessVerdict::Tag::Inconclusive:
      j["verdict"] = "inconclusive";
      break;
  }
  j["q_norm_exponent"] = verdict.q_norm_exponent;
  Json norms = Json::array();
  for (const EdgeNormSummary& s : verdict.decisive_norms) {
    Json e;
    e["edge"] = edge_key(s.edge);
    e["max_entry_exponent"] =
        s.max_entry_exponent ? Json(*s.max_entry_exponent) : Json(nullptr);
    e["min_row_max_exponent"] =
        s.min_row_max_exponent ? Json(*s.min_row_max_exponent) : Json(nullptr);
    norms.push_back(e);
  }
  j["decisive_norms"] = norms;
  if (verdict.witness) j["witness"] = witness_to_json(*verdict.witness);
  return j;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    fail("cannot parse '" + path + "': " + e.what());
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace padtree
