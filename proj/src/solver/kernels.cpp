#include "kernels.hpp"

#include <stdexcept>
#include <string>

namespace cmg::solver {

std::vector<SoftScalar> smoother_diagonal(const StencilOperator& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("smoother needs a square operator");
  std::vector<SoftScalar> m;
  m.reserve(a.rows());
  const SoftScalar one = SoftScalar::from_int(1, a.width());
  for (std::size_t j = 0; j < a.rows(); ++j) {
    const SoftScalar& d = a.diagonal(j);
    if (d.is_zero()) throw std::domain_error("zero diagonal entry in row " + std::to_string(j));
    m.push_back(softfloat::div(one, d, a.width()));
  }
  return m;
}

std::vector<SoftScalar> gs_smooth(const StencilOperator& a, std::span<const SoftScalar> m,
                                  std::span<const SoftScalar> rhs, std::span<const SoftScalar> y, int work_width,
                                  int store_width) {
  const std::size_t n = a.rows();
  if (a.cols() != n || m.size() != n || rhs.size() != n || y.size() != n) {
    throw std::invalid_argument("gs_smooth: shape mismatch");
  }
  std::vector<SoftScalar> out(y.begin(), y.end());
  detail::NodeScratch sc(work_width);
  auto none = [](std::size_t) -> const SoftScalar& { throw std::logic_error("no z term"); };
  auto get_y = [&](std::size_t k) -> const SoftScalar& { return out[k]; };
  SoftScalar next;
  for (std::size_t j = 0; j < n; ++j) {
    detail::gs_node(sc, a, m[j], j, rhs[j], nullptr, false, none, get_y, store_width, next);
    out[j] = next;
  }
  return out;
}

}  // namespace cmg::solver
