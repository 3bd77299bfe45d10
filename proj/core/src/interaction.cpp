#include "padtree/interaction.hpp"

namespace padtree {

InteractionMatrix InteractionMatrix::build(ContextPtr ctx, PMat entries,
                                           bool check_stochastic) {
  if (!ctx) throw DomainError("null context");
  const int q = static_cast<int>(entries.size());
  if (q < 2) throw DomainError("state count q must be >= 2");
  for (const auto& row : entries) {
    if (static_cast<int>(row.size()) != q) {
      throw DomainError("interaction matrix must be square");
    }
    for (const PAdicNumber& x : row) {
      if (!x.valid() || x.context()->p() != ctx->p() ||
          x.context()->precision() != ctx->precision()) {
        throw DomainError("matrix entry from a different context");
      }
    }
  }
  if (check_stochastic) {
    const long target = ctx->precision() - kVerifySlack;
    for (int col = 0; col < q; ++col) {
      PAdicNumber s = PAdicNumber::zero(ctx);
      for (int row = 0; row < q; ++row) s = s + entries[row][col];
      const PAdicNumber dev = s - PAdicNumber::one(ctx);
      switch (decide_norm_le(dev, target)) {
        case Decision::Yes:
          break;
        case Decision::No:
          throw ConditionViolated("column " + std::to_string(col + 1) +
                                  " does not sum to 1: sum = " + s.describe());
        case Decision::Unknown:
          throw PrecisionExhausted("column sum undecidable at precision");
      }
    }
  }
  InteractionMatrix m;
  m.ctx_ = std::move(ctx);
  m.q_ = q;
  m.entries_ = std::move(entries);
  return m;
}

InteractionMatrix::InteractionMatrix(ContextPtr ctx, PMat entries) {
  *this = build(std::move(ctx), std::move(entries), true);
}

InteractionMatrix InteractionMatrix::unchecked(ContextPtr ctx, PMat entries) {
  return build(std::move(ctx), std::move(entries), false);
}

const PAdicNumber& InteractionMatrix::at(int row, int col) const {
  if (row < 0 || row >= q_ || col < 0 || col >= q_) {
    throw DomainError("matrix index out of range");
  }
  return entries_[row][col];
}

InteractionMatrix InteractionMatrix::transposed() const {
  PMat t(q_, PVec(q_, PAdicNumber::zero(ctx_)));
  for (int i = 0; i < q_; ++i) {
    for (int j = 0; j < q_; ++j) t[j][i] = entries_[i][j];
  }
  return unchecked(ctx_, std::move(t));
}

InteractionMatrix matrix_from_rationals(
    const std::vector<std::vector<mpq_class>>& rows, const ContextPtr& ctx,
    bool check_stochastic) {
  PMat entries;
  entries.reserve(rows.size());
  for (const auto& row : rows) {
    PVec r;
    r.reserve(row.size());
    for (const mpq_class& x : row) {
      r.push_back(PAdicNumber::from_rational(x, ctx));
    }
    entries.push_back(std::move(r));
  }
  return check_stochastic
             ? InteractionMatrix(ctx, std::move(entries))
             : InteractionMatrix::unchecked(ctx, std::move(entries));
}

InteractionMatrix make_first_row_matrix(
    int q, const mpq_class& alpha, const mpq_class& beta,
    const std::vector<std::vector<mpq_class>>& middle_rows,
    const ContextPtr& ctx) {
  if (q < 2) throw DomainError("q must be >= 2");
  if (static_cast<int>(middle_rows.size()) != q - 2) {
    throw DomainError("expected " + std::to_string(q - 2) +
                      " middle rows, got " +
                      std::to_string(middle_rows.size()));
  }
  std::vector<std::vector<mpq_class>> rows;
  rows.push_back(std::vector<mpq_class>(q, beta));
  rows.front()[0] = alpha;
  for (const auto& row : middle_rows) {
    if (static_cast<int>(row.size()) != q) {
      throw DomainError("middle row has wrong length");
    }
    rows.push_back(row);
  }
  std::vector<mpq_class> last(q);
  for (int col = 0; col < q; ++col) {
    mpq_class s = 0;
    for (const auto& row : rows) s += row[col];
    last[col] = 1 - s;
  }
  rows.push_back(std::move(last));
  return matrix_from_rationals(rows, ctx);
}

std::pair<PAdicNumber, PAdicNumber> block_sums(const InteractionMatrix& m,
                                               int m_block) {
  const int q = m.q();
  if (m_block < 1 || m_block > q - 1) {
    throw DomainError("block size must be in [1, q-1]");
  }
  const long target = m.context()->precision() - kVerifySlack;
  // Rows 1..m must agree on columns m+1..q-1 and q.
  for (int j = 0; j < m_block; ++j) {
    for (int i = m_block; i < q - 1; ++i) {
      if (decide_norm_le(m.at(j, i) - m.at(j, q - 1), target) !=
          Decision::Yes) {
        throw ConditionViolated(
            "entry (" + std::to_string(j + 1) + "," + std::to_string(i + 1) +
            ") differs from column q within the constrained block");
      }
    }
  }
  auto column_block_sum = [&](int col) {
    PAdicNumber s = PAdicNumber::zero(m.context());
    for (int j = 0; j < m_block; ++j) s = s + m.at(j, col);
    return s;
  };
  const PAdicNumber a = column_block_sum(0);
  for (int col = 1; col < m_block; ++col) {
    if (decide_norm_le(column_block_sum(col) - a, target) != Decision::Yes) {
      throw ConditionViolated("block sums of the first " +
                              std::to_string(m_block) +
                              " columns are not constant");
    }
  }
  const PAdicNumber b = column_block_sum(q - 1);
  return {a, b};
}

EdgeMatrixField EdgeMatrixField::homogeneous(InteractionMatrix m) {
  EdgeMatrixField f;
  f.homogeneous_ = std::move(m);
  return f;
}

EdgeMatrixField EdgeMatrixField::per_edge(
    std::map<DirectedEdge, InteractionMatrix> matrices) {
  if (matrices.empty()) throw DomainError("empty edge-matrix map");
  EdgeMatrixField f;
  const int q = matrices.begin()->second.q();
  const long target =
      matrices.begin()->second.context()->precision() - kVerifySlack;
  for (const auto& [e, m] : matrices) {
    if (m.q() != q) throw DomainError("mixed state counts across edges");
    const DirectedEdge rev{e.head, e.tail};
    auto it = matrices.find(rev);
    if (it != matrices.end()) {
      // Reversal symmetry: Q(y,x) must equal the transpose of Q(x,y).
      for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
          if (decide_norm_le(m.at(i, j) - it->second.at(j, i), target) !=
              Decision::Yes) {
            throw ConditionViolated(
                "edge " + edge_key(e) +
                ": reverse matrix is not the transpose at entry (" +
                std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
          }
        }
      }
    }
  }
  f.per_edge_ = std::move(matrices);
  // Derive missing orientations.
  std::vector<std::pair<DirectedEdge, InteractionMatrix>> derived;
  for (const auto& [e, m] : f.per_edge_) {
    const DirectedEdge rev{e.head, e.tail};
    if (f.per_edge_.find(rev) == f.per_edge_.end()) {
      derived.push_back({rev, m.transposed()});
    }
  }
  for (auto& [e, m] : derived) f.per_edge_.emplace(e, std::move(m));
  return f;
}

int EdgeMatrixField::q() const {
  if (homogeneous_) return homogeneous_->q();
  return per_edge_.begin()->second.q();
}

const ContextPtr& EdgeMatrixField::context() const {
  if (homogeneous_) return homogeneous_->context();
  return per_edge_.begin()->second.context();
}

const InteractionMatrix& EdgeMatrixField::get(const DirectedEdge& e) const {
  if (homogeneous_) return *homogeneous_;
  auto it = per_edge_.find(e);
  if (it == per_edge_.end()) {
    throw DomainError("no matrix assigned to edge " + edge_key(e));
  }
  return it->second;
}

namespace {

void check_matrix_conditions(const InteractionMatrix& m,
                             const DirectedEdge& where,
                             ConditionReport& report) {
  const int q = m.q();
  for (int j = 0; j < q; ++j) {
    for (int i = 0; i < q; ++i) {
      switch (decide_norm_le(m.at(j, i), 0)) {
        case Decision::Yes:
          break;
        case Decision::No:
          report.satisfied = false;
          report.failures.push_back(
              {where, j + 1, i + 1, "|Q(j,i)|_p exceeds 1"});
          break;
        case Decision::Unknown:
          throw PrecisionExhausted("entry norm undecidable at precision");
      }
      switch (decide_norm_le(m.at(j, i) - m.at(j, q - 1), 1)) {
        case Decision::Yes:
          break;
        case Decision::No:
          report.satisfied = false;
          report.failures.push_back(
              {where, j + 1, i + 1, "|Q(j,i) - Q(j,q)|_p exceeds 1/p"});
          break;
        case Decision::Unknown:
          throw PrecisionExhausted(
              "entry difference norm undecidable at precision");
      }
    }
  }
}

}  // namespace

ConditionReport check_uniqueness_conditions(const InteractionMatrix& m) {
  ConditionReport report;
  check_matrix_conditions(m, DirectedEdge{0, 0}, report);
  return report;
}

ConditionReport check_uniqueness_conditions(const EdgeMatrixField& field,
                                            const TreeGraph& tree) {
  ConditionReport report;
  if (field.is_homogeneous()) {
    check_matrix_conditions(field.get(DirectedEdge{0, 0}), DirectedEdge{0, 0},
                            report);
    return report;
  }
  for (const DirectedEdge& e : tree.directed_edges()) {
    check_matrix_conditions(field.get(e), e, report);
  }
  return report;
}

}  // namespace padtree
