#include <algorithm>
#include <stdexcept>

#include "cmg/operator.hpp"

namespace cmg::fem {

StencilOperator StencilOperator::quantize(const ExactOperator& op, int width, OpKind kind) {
  softfloat::check_width(width);
  StencilOperator q;
  q.rows_ = op.rows();
  q.cols_ = op.cols();
  q.width_ = width;
  q.kind_ = kind;
  q.pool_.reserve(op.pool_size());
  for (const auto& s : op.pool()) {
    Stencil t;
    t.offsets = s.offsets;
    t.values.reserve(s.values.size());
    for (const auto& v : s.values) t.values.push_back(SoftScalar::from_rational(v, width));
    q.pool_.push_back(std::move(t));
  }
  q.row_stencil_.resize(q.rows_);
  q.row_base_.resize(q.rows_);
  q.fst_.resize(q.rows_);
  q.lst_.resize(q.rows_);
  q.diag_.assign(q.rows_, -1);
  for (std::size_t r = 0; r < q.rows_; ++r) {
    q.row_stencil_[r] = op.stencil_id(r);
    q.row_base_[r] = op.base(r);
    q.fst_[r] = op.fst_col(r);
    q.lst_[r] = op.lst_col(r);
    const auto& offs = op.stencil(r).offsets;
    std::int64_t d = static_cast<std::int64_t>(r) - op.base(r);
    auto it = std::lower_bound(offs.begin(), offs.end(), d);
    if (it != offs.end() && *it == d) q.diag_[r] = static_cast<std::int32_t>(it - offs.begin());
  }
  q.zero_ = SoftScalar(width);
  return q;
}

StencilOperator StencilOperator::rounded(int width) const {
  softfloat::check_width(width);
  StencilOperator q = *this;
  q.width_ = width;
  for (auto& s : q.pool_) {
    for (auto& v : s.values) softfloat::round_into(v, v, width);
  }
  q.zero_ = SoftScalar(width);
  return q;
}

SoftScalar StencilOperator::entry(std::size_t row, std::size_t col) const {
  RowView v = this->row(row);
  std::int64_t off = static_cast<std::int64_t>(col) - v.base;
  auto it = std::lower_bound(v.offsets.begin(), v.offsets.end(), off);
  if (it == v.offsets.end() || *it != off) return SoftScalar(width_);
  return v.values[static_cast<std::size_t>(it - v.offsets.begin())];
}

const SoftScalar& StencilOperator::diagonal(std::size_t row) const {
  if (diag_[row] < 0) return zero_;
  return pool_[row_stencil_[row]].values[static_cast<std::size_t>(diag_[row])];
}

}  // namespace cmg::fem
