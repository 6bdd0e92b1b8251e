#include <stdexcept>

#include "cmg/reference.hpp"

namespace cmg::reference {

namespace {

using Dense = DenseMatrix;

constexpr int kMaxLevels = 3;

Dense to_dense(const solver::StencilOperator& a) {
  Dense d(a.rows(), std::vector<mpq_class>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    for (std::size_t k = 0; k < row.offsets.size(); ++k) {
      d[i][static_cast<std::size_t>(row.base + row.offsets[k])] = row.values[k].to_rational();
    }
  }
  return d;
}

Dense product(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Dense c(n, std::vector<mpq_class>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < k; ++t) {
      if (a[i][t] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (b[t][j] != 0) c[i][j] += a[i][t] * b[t][j];
      }
    }
  }
  return c;
}

}  // namespace

std::vector<std::vector<DenseMatrix>> block_matrix(const solver::OperatorCache& ops, int L) {
  if (L < 0 || L > ops.finest()) throw std::invalid_argument("block_matrix: level not available");
  if (L > kMaxLevels) throw std::invalid_argument("block_matrix: dense construction limited to L <= 3");
  const auto nl = static_cast<std::size_t>(L) + 1;
  std::vector<Dense> a(nl), p(nl), rr(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    const auto& lv = ops.level(static_cast<int>(l));
    a[l] = to_dense(lv.a_a);
    if (l > 0) {
      p[l] = to_dense(lv.p_a);
      rr[l] = to_dense(lv.r_a);
    }
  }
  std::vector<std::vector<Dense>> blocks(nl, std::vector<Dense>(nl));
  for (std::size_t l = 0; l < nl; ++l) {
    blocks[l][l] = a[l];
    Dense chain = a[l];
    for (std::size_t k = l; k-- > 0;) {
      chain = product(chain, p[k + 1]);
      blocks[l][k] = chain;
    }
    for (std::size_t k = l + 1; k < nl; ++k) {
      Dense down = a[k];
      for (std::size_t q = k; q > l; --q) down = product(rr[q], down);
      blocks[l][k] = std::move(down);
    }
  }
  return blocks;
}

std::vector<std::vector<mpq_class>> block_system_gs(const solver::OperatorCache& ops, int L,
                                                    std::span<const std::vector<mpq_class>> r,
                                                    std::span<const std::vector<mpq_class>> y,
                                                    const StoreFn& store) {
  if (L < 0 || L > ops.finest() || r.size() != static_cast<std::size_t>(L) + 1 || y.size() != r.size()) {
    throw std::invalid_argument("block_system_gs: one section per level required");
  }
  const auto nl = static_cast<std::size_t>(L) + 1;
  for (std::size_t l = 0; l < nl; ++l) {
    if (r[l].size() != ops.dofs(static_cast<int>(l)) || y[l].size() != r[l].size()) {
      throw std::invalid_argument("block_system_gs: section length mismatch");
    }
  }
  const auto blocks = block_matrix(ops, L);

  std::vector<std::vector<mpq_class>> out(y.begin(), y.end());
  for (std::size_t l = 0; l < nl; ++l) {
    const auto& lv = ops.level(static_cast<int>(l));
    for (std::size_t j = 0; j < out[l].size(); ++j) {
      mpq_class d = r[l][j];
      for (std::size_t k = 0; k < nl; ++k) {
        const auto& row = blocks[l][k][j];
        for (std::size_t c = 0; c < row.size(); ++c) {
          if (row[c] != 0 && out[k][c] != 0) d -= row[c] * out[k][c];
        }
      }
      mpq_class next = out[l][j] + lv.m_a[j].to_rational() * d;
      if (store) next = store(static_cast<int>(l), j, next);
      out[l][j] = next;
    }
  }
  return out;
}

compact::CompactVector block_system_gs(const solver::OperatorCache& ops, int L, std::span<const bfp::BfpVector> r,
                                       const compact::CompactVector& y) {
  const auto& pol = ops.policy();
  if (y.finest() != L || !(y.spec() == pol.ry_spec())) throw std::invalid_argument("block_system_gs: guess shape");
  std::vector<std::vector<mpq_class>> rq, yq;
  SoftScalar v;
  for (int l = 0; l <= L; ++l) {
    if (static_cast<std::size_t>(l) >= r.size()) throw std::invalid_argument("block_system_gs: missing section");
    auto& rs = rq.emplace_back();
    for (std::size_t i = 0; i < r[static_cast<std::size_t>(l)].size(); ++i) {
      r[static_cast<std::size_t>(l)].get_into(v, i);
      rs.push_back(v.to_rational());
    }
    auto& ys = yq.emplace_back();
    for (std::size_t i = 0; i < y.section(l).size(); ++i) {
      y.section(l).get_into(v, i);
      ys.push_back(v.to_rational());
    }
  }
  std::vector<bfp::StreamEncoder> enc;
  for (int l = 0; l <= L; ++l) enc.emplace_back(pol.ry_width(l, L), ops.dofs(l));
  auto keep = [&](int l, std::size_t j, const mpq_class& q) {
    auto& e = enc[static_cast<std::size_t>(l)];
    if (e.size() != j) throw std::logic_error("block_system_gs: out of order update");
    e.push(SoftScalar::from_rational(q, pol.cfas_work_width(l, L)));
    e.get_into(v, j);
    return v.to_rational();
  };
  block_system_gs(ops, L, rq, yq, keep);
  std::vector<bfp::BfpVector> sections;
  for (auto& e : enc) sections.push_back(e.finish());
  return compact::CompactVector(pol.ry_spec(), std::move(sections));
}

}  // namespace cmg::reference
