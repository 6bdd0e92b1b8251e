#include <stdexcept>

#include "cmg/hierarchy.hpp"
#include "cmg/quadrature.hpp"
#include "manufactured.hpp"

namespace cmg::fem {

namespace {

void fma_into(mp::Real& acc, const mp::Real& a, const mp::Real& b) {
  mpfr_fma(acc.get(), a.get(), b.get(), acc.get(), MPFR_RNDN);
}

SoftScalar error_1d(const ProblemSpec& problem, int level, std::span<const SoftScalar> coeffs, int width) {
  const int p = problem.degree;
  const int m = problem.order();
  const long elements = 1L << level;
  const long nfull = elements + p;
  const int q = p + 4;
  const QuadratureRule& rule = gauss_legendre(q, width);
  std::vector<mp::Real> nodes, weights;
  for (int k = 0; k < q; ++k) {
    nodes.emplace_back(rule.nodes[static_cast<std::size_t>(k)]);
    weights.emplace_back(rule.weights[static_cast<std::size_t>(k)]);
  }
  detail::PieceTable table(p, m, nodes);
  std::vector<mp::Real> c(static_cast<std::size_t>(p + 1));
  mp::Real err, norm, uh, diff, wk;
  for (long e = 0; e < elements; ++e) {
    auto cls = classify(e, elements, p);
    for (int b = 0; b <= p; ++b) {
      long j = e + b;
      if (j < m || j >= nfull - m) {
        mpfr_set_zero(c[static_cast<std::size_t>(b)].get(), 1);
      } else {
        mpfr_set(c[static_cast<std::size_t>(b)].get(), coeffs[static_cast<std::size_t>(j - m)].raw(), MPFR_RNDN);
      }
    }
    for (int k = 0; k < q; ++k) {
      mp::Real x = ldexp(mp::Real(e) + nodes[static_cast<std::size_t>(k)], -level);
      auto exact = detail::solution_1d(problem.pde, x);
      wk = ldexp(weights[static_cast<std::size_t>(k)], -level);
      for (int d = 0; d <= m; ++d) {
        const auto& vals = table.at(cls, d)[static_cast<std::size_t>(k)];
        mpfr_set_zero(uh.get(), 1);
        for (int b = 0; b <= p; ++b) fma_into(uh, c[static_cast<std::size_t>(b)], vals[static_cast<std::size_t>(b)]);
        uh = ldexp(uh, static_cast<long>(d) * level);
        diff = uh - exact[static_cast<std::size_t>(d)];
        mp::Real wd = wk * diff;
        fma_into(err, wd, diff);
        mp::Real wu = wk * exact[static_cast<std::size_t>(d)];
        fma_into(norm, wu, exact[static_cast<std::size_t>(d)]);
      }
    }
  }
  return sqrt(err / norm).to_scalar(width);
}

SoftScalar error_2d(const ProblemSpec& problem, int level, std::span<const SoftScalar> coeffs, int width) {
  const int p = problem.degree;
  const int m = problem.order();
  const long elements = 1L << level;
  const long nfull = elements + p;
  const long n = nfull - 2 * m;
  const int q = p + 4;
  const auto uq = static_cast<std::size_t>(q);
  const auto up = static_cast<std::size_t>(p + 1);
  const QuadratureRule& rule = gauss_legendre(q, width);
  std::vector<mp::Real> nodes, weights;
  for (int k = 0; k < q; ++k) {
    nodes.emplace_back(rule.nodes[static_cast<std::size_t>(k)]);
    weights.emplace_back(rule.weights[static_cast<std::size_t>(k)]);
  }
  detail::PieceTable table(p, 1, nodes);
  // g and g' at every element's nodes; the grid is the same in x and y.
  std::vector<std::vector<mp::Real>> g0(static_cast<std::size_t>(elements)), g1(static_cast<std::size_t>(elements));
  for (long e = 0; e < elements; ++e) {
    for (int k = 0; k < q; ++k) {
      mp::Real x = ldexp(mp::Real(e) + nodes[static_cast<std::size_t>(k)], -level);
      auto s = detail::solution_1d(Pde::poisson, x);
      g0[static_cast<std::size_t>(e)].push_back(s[0]);
      g1[static_cast<std::size_t>(e)].push_back(s[1]);
    }
  }
  std::vector<mp::Real> c(up * up);
  std::vector<mp::Real> t0(up * uq), t1(up * uq);
  mp::Real err, norm, u, ux, uy, d, w, ex, wd;
  for (long ey = 0; ey < elements; ++ey) {
    auto cy = classify(ey, elements, p);
    const auto& ny0 = table.at(cy, 0);
    const auto& ny1 = table.at(cy, 1);
    for (long ex_ = 0; ex_ < elements; ++ex_) {
      auto cx = classify(ex_, elements, p);
      const auto& nx0 = table.at(cx, 0);
      const auto& nx1 = table.at(cx, 1);
      for (std::size_t by = 0; by < up; ++by) {
        long jy = ey + static_cast<long>(by);
        for (std::size_t bx = 0; bx < up; ++bx) {
          long jx = ex_ + static_cast<long>(bx);
          auto& dst = c[by * up + bx];
          if (jy < m || jy >= nfull - m || jx < m || jx >= nfull - m) {
            mpfr_set_zero(dst.get(), 1);
          } else {
            std::size_t idx = static_cast<std::size_t>((jy - m) * n + (jx - m));
            mpfr_set(dst.get(), coeffs[idx].raw(), MPFR_RNDN);
          }
        }
      }
      for (std::size_t by = 0; by < up; ++by) {
        for (std::size_t kx = 0; kx < uq; ++kx) {
          auto& a0 = t0[by * uq + kx];
          auto& a1 = t1[by * uq + kx];
          mpfr_set_zero(a0.get(), 1);
          mpfr_set_zero(a1.get(), 1);
          for (std::size_t bx = 0; bx < up; ++bx) {
            fma_into(a0, c[by * up + bx], nx0[kx][bx]);
            fma_into(a1, c[by * up + bx], nx1[kx][bx]);
          }
        }
      }
      for (std::size_t ky = 0; ky < uq; ++ky) {
        for (std::size_t kx = 0; kx < uq; ++kx) {
          mpfr_set_zero(u.get(), 1);
          mpfr_set_zero(ux.get(), 1);
          mpfr_set_zero(uy.get(), 1);
          for (std::size_t by = 0; by < up; ++by) {
            fma_into(u, ny0[ky][by], t0[by * uq + kx]);
            fma_into(ux, ny0[ky][by], t1[by * uq + kx]);
            fma_into(uy, ny1[ky][by], t0[by * uq + kx]);
          }
          mpfr_mul_2si(ux.get(), ux.get(), level, MPFR_RNDN);
          mpfr_mul_2si(uy.get(), uy.get(), level, MPFR_RNDN);
          const auto& gx0 = g0[static_cast<std::size_t>(ex_)][kx];
          const auto& gx1 = g1[static_cast<std::size_t>(ex_)][kx];
          const auto& gy0 = g0[static_cast<std::size_t>(ey)][ky];
          const auto& gy1 = g1[static_cast<std::size_t>(ey)][ky];
          mpfr_mul(w.get(), weights[kx].get(), weights[ky].get(), MPFR_RNDN);
          mpfr_mul_2si(w.get(), w.get(), -2L * level, MPFR_RNDN);
          const mp::Real* exact_parts[3][2] = {{&gx0, &gy0}, {&gx1, &gy0}, {&gx0, &gy1}};
          const mp::Real* approx[3] = {&u, &ux, &uy};
          for (int part = 0; part < 3; ++part) {
            mpfr_mul(ex.get(), exact_parts[part][0]->get(), exact_parts[part][1]->get(), MPFR_RNDN);
            mpfr_sub(d.get(), approx[part]->get(), ex.get(), MPFR_RNDN);
            mpfr_mul(wd.get(), w.get(), d.get(), MPFR_RNDN);
            fma_into(err, wd, d);
            mpfr_mul(wd.get(), w.get(), ex.get(), MPFR_RNDN);
            fma_into(norm, wd, ex);
          }
        }
      }
    }
  }
  return sqrt(err / norm).to_scalar(width);
}

}  // namespace

SoftScalar relative_hm_error(const ProblemSpec& problem, int level, std::span<const SoftScalar> coeffs,
                             int eval_width) {
  validate(problem);
  if (coeffs.size() != problem.dofs(level)) throw std::invalid_argument("coefficient count does not match level");
  int width = eval_width > 0 ? eval_width : (problem.dim == 1 ? 256 : 128);
  mp::Precision guard(width);
  return problem.dim == 1 ? error_1d(problem, level, coeffs, width) : error_2d(problem, level, coeffs, width);
}

}  // namespace cmg::fem
