#include <algorithm>
#include <stdexcept>
#include <string>

#include "cmg/solver.hpp"

namespace cmg::solver {

namespace {

template <class T, class F>
std::vector<T> collect(int finest, F&& f) {
  std::vector<T> out;
  for (int l = 0; l <= finest; ++l) out.push_back(f(l));
  return out;
}

}  // namespace

OperatorCache::OperatorCache(const GridHierarchy& hierarchy, const PrecisionPolicy& policy)
    : OperatorCache(collect<fem::ExactOperator>(hierarchy.finest(), [&](int l) { return hierarchy.stiffness(l); }),
                    collect<fem::ExactOperator>(hierarchy.finest(),
                                                [&](int l) { return l > 0 ? hierarchy.prolongation(l) : fem::ExactOperator(); }),
                    collect<fem::ExactOperator>(hierarchy.finest(),
                                                [&](int l) { return l > 0 ? hierarchy.restriction(l) : fem::ExactOperator(); }),
                    collect<std::vector<SoftScalar>>(hierarchy.finest(), [&](int l) { return hierarchy.rhs(l); }),
                    policy) {
  if (policy.offset() != hierarchy.offset()) throw std::invalid_argument("policy offset does not match hierarchy");
}

OperatorCache::OperatorCache(std::span<const fem::ExactOperator> a, std::span<const fem::ExactOperator> p,
                             std::span<const fem::ExactOperator> r, std::span<const std::vector<SoftScalar>> rhs,
                             const PrecisionPolicy& policy)
    : policy_(policy) {
  if (a.empty() || p.size() != a.size() || r.size() != a.size() || rhs.size() != a.size()) {
    throw std::invalid_argument("operator cache: one entry per level required");
  }
  const int finest_level = static_cast<int>(a.size()) - 1;
  levels_.resize(a.size());
  for (int l = 0; l <= finest_level; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    auto& lv = levels_[ul];
    const int wf = policy.resid_mat_width(l);
    const int wa = policy.vcycle_mat_width(l);
    if (rhs[ul].size() != a[ul].rows()) throw std::invalid_argument("operator cache: rhs length mismatch");
    for (const auto& v : rhs[ul]) {
      if (v.width() < wf) {
        throw softfloat::PrecisionError("right-hand side width " + std::to_string(v.width()) +
                                        " below matrix width " + std::to_string(wf));
      }
      lv.f_f.push_back(softfloat::round_to(v, wf));
    }
    lv.a_f = StencilOperator::quantize(a[ul], wf, fem::OpKind::stiffness);
    lv.a_a = lv.a_f.rounded(wa);
    lv.delta_a = fem::delta(a[ul]);
    if (l > 0) {
      if (p[ul].rows() != a[ul].rows() || p[ul].cols() != a[ul - 1].rows() || r[ul].rows() != a[ul - 1].rows() ||
          r[ul].cols() != a[ul].rows()) {
        throw std::invalid_argument("operator cache: transfer shape mismatch on level " + std::to_string(l));
      }
      lv.p_f = StencilOperator::quantize(p[ul], wf, fem::OpKind::prolongation);
      lv.r_f = StencilOperator::quantize(r[ul], wf, fem::OpKind::restriction);
      lv.p_a = lv.p_f.rounded(wa);
      lv.r_a = lv.r_f.rounded(wa);
      lv.delta_p = fem::delta(p[ul]);
      lv.delta_r = fem::delta(r[ul]);
      lv.delta_ap = fem::delta_of_product(a[ul], p[ul]);
    }
    lv.m_a = smoother_diagonal(lv.a_a);
  }
}

std::size_t OperatorCache::z_capacity(int l, int L) const {
  if (l < 1 || l > L) throw std::out_of_range("z buffer level");
  if (l == L) return std::max<std::size_t>(1, level(l).delta_a);
  const auto& next = level(l + 1);
  return std::max({std::size_t{1}, level(l).delta_a, next.delta_p, next.delta_ap});
}

std::size_t OperatorCache::u_capacity(int l, int L) const {
  if (l < 0 || l > L) throw std::out_of_range("u buffer level");
  if (l == L) return std::max<std::size_t>(1, level(l).delta_a);
  return std::max<std::size_t>(1, level(l + 1).delta_p);
}

std::size_t OperatorCache::t_capacity(int l) const {
  if (l == 0) return 1;
  return std::max<std::size_t>(1, level(l).delta_r);
}

StreamBuffer::StreamBuffer(std::size_t capacity, int width) : width_(width) {
  if (capacity == 0) throw std::invalid_argument("stream buffer needs a positive capacity");
  slots_.reserve(capacity);
  for (std::size_t i = 0; i < capacity; ++i) slots_.emplace_back(width);
}

void StreamBuffer::push(const SoftScalar& v) {
  if (v.width() != width_) {
    throw softfloat::PrecisionError("buffer write at width " + std::to_string(v.width()) + ", declared " +
                                    std::to_string(width_));
  }
  if (hi_ - lo_ == slots_.size()) ++lo_;
  slots_[hi_ % slots_.size()] = v;
  ++hi_;
  peak_ = std::max(peak_, hi_ - lo_);
}

const SoftScalar& StreamBuffer::at(std::size_t i) const {
  if (i < lo_ || i >= hi_) {
    throw BufferWindowError("buffer read of index " + std::to_string(i) + " outside window [" +
                            std::to_string(lo_) + ", " + std::to_string(hi_) + ")");
  }
  return slots_[i % slots_.size()];
}

std::uint64_t BufferStats::peak_bits() const {
  std::uint64_t bits = 0;
  for (std::size_t l = 0; l < peak.size(); ++l) bits += static_cast<std::uint64_t>(peak[l]) * width[l];
  return bits;
}

}  // namespace cmg::solver
