#pragma once

#include <string>

#include <json.hpp>

#include "padtree/boundary_law.hpp"
#include "padtree/interaction.hpp"
#include "padtree/measure.hpp"
#include "padtree/padic.hpp"
#include "padtree/tree.hpp"

namespace padtree {

using Json = nlohmann::ordered_json;

// Rationals travel as strings "n/m" (or "n"); ParseError on anything else.
mpq_class rational_from_string(const std::string& text);
std::string rational_to_string(const mpq_class& value);

// Value records: nonzero {p, valuation, digits, known_digits}; exact zero
// {p, zero: true}; precision zero {p, zero_to_precision: bound}.
Json padic_to_json(const PAdicNumber& x);
PAdicNumber padic_from_json(const Json& j, const ContextPtr& ctx);

// Tree documents: {vertices: [...], edges: [[x,y],...]} with an optional
// completion_degree, or {cayley: {k, depth}} with an optional root.
TreeGraph tree_from_json(const Json& j);
Json tree_to_json(const TreeGraph& tree);

// Matrix documents: a q x q array of rational strings (one homogeneous
// matrix), or {per_edge: {"x->y": matrix, ...}}.
EdgeMatrixField field_from_json(const Json& j, const ContextPtr& ctx,
                                bool check_stochastic = true);

// Law documents: {"x->y": [record, ...], ...} with q-1 records per edge;
// an optional "phantom" object maps vertex ids to arrays of such vectors.
BoundaryLawField law_from_json(const Json& j, const ContextPtr& ctx, int q);
Json law_to_json(const BoundaryLawField& law);

Json certificate_to_json(const HenselCertificate& cert);
Json root_report_to_json(const RootReport& report);
Json solve_log_to_json(const SolveLog& log);
Json witness_to_json(const WitnessReport& report);
Json verdict_to_json(const BoundednessVerdict& verdict);

// Strict file loading: ParseError with the path on any failure.
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace padtree
