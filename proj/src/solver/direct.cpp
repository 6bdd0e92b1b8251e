#include <stdexcept>

#include "cmg/solver.hpp"

namespace cmg::solver {

std::vector<SoftScalar> dense_solve(const StencilOperator& a, std::span<const SoftScalar> b, int width) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("dense_solve: shape mismatch");
  if (n > 4096) throw std::invalid_argument("dense_solve: system too large");
  std::vector<SoftScalar> m(n * n, SoftScalar(width));
  std::vector<SoftScalar> x(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = a.row(r);
    for (std::size_t k = 0; k < row.offsets.size(); ++k) {
      softfloat::round_into(m[r * n + static_cast<std::size_t>(row.base + row.offsets[k])], row.values[k], width);
    }
    x[r] = softfloat::round_to(b[r], width);
  }
  SoftScalar factor(width), prod(width);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (mpfr_cmpabs(m[r * n + c].raw(), m[piv * n + c].raw()) > 0) piv = r;
    }
    if (m[piv * n + c].is_zero()) throw std::domain_error("dense_solve: singular matrix");
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(m[c * n + k], m[piv * n + k]);
      std::swap(x[c], x[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r * n + c].is_zero()) continue;
      mpfr_div(factor.raw_mut(), m[r * n + c].raw(), m[c * n + c].raw(), MPFR_RNDN);
      for (std::size_t k = c + 1; k < n; ++k) {
        mpfr_mul(prod.raw_mut(), factor.raw(), m[c * n + k].raw(), MPFR_RNDN);
        mpfr_sub(m[r * n + k].raw_mut(), m[r * n + k].raw(), prod.raw(), MPFR_RNDN);
      }
      mpfr_mul(prod.raw_mut(), factor.raw(), x[c].raw(), MPFR_RNDN);
      mpfr_sub(x[r].raw_mut(), x[r].raw(), prod.raw(), MPFR_RNDN);
      mpfr_set_zero(m[r * n + c].raw_mut(), 1);
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t k = c + 1; k < n; ++k) {
      mpfr_mul(prod.raw_mut(), m[c * n + k].raw(), x[k].raw(), MPFR_RNDN);
      mpfr_sub(x[c].raw_mut(), x[c].raw(), prod.raw(), MPFR_RNDN);
    }
    mpfr_div(x[c].raw_mut(), x[c].raw(), m[c * n + c].raw(), MPFR_RNDN);
  }
  return x;
}

CompactVector coarse_solve(const OperatorCache& ops) {
  const auto& pol = ops.policy();
  const auto& lv = ops.level(0);
  auto x = dense_solve(lv.a_f, lv.f_f, pol.resid_work_width(0, 0));
  const int w = pol.u_width(0, 0);
  bfp::StreamEncoder enc(w, x.size());
  for (const auto& v : x) enc.push(v);
  std::vector<BfpVector> sections;
  sections.push_back(enc.finish());
  return CompactVector(pol.u_spec(), std::move(sections));
}

}  // namespace cmg::solver
