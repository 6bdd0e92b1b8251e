#include "cmg/hierarchy.hpp"

#include <functional>
#include <stdexcept>

#include "cmg/assembly.hpp"
#include "cmg/quadrature.hpp"
#include "manufactured.hpp"

namespace cmg::fem {

namespace {

using Func = std::function<mp::Real(const mp::Real&)>;

// (f, phi_i) for the interior B-splines on 2^level elements of [0, 1].
std::vector<mp::Real> moments(int p, int bc, int level, const Func& f, int q, int width) {
  const long elements = 1L << level;
  const long nfull = elements + p;
  const long n = nfull - 2 * bc;
  const QuadratureRule& rule = gauss_legendre(q, width);
  std::vector<mp::Real> nodes, weights;
  for (int k = 0; k < q; ++k) {
    nodes.emplace_back(rule.nodes[static_cast<std::size_t>(k)]);
    weights.emplace_back(rule.weights[static_cast<std::size_t>(k)]);
  }
  detail::PieceTable table(p, 0, nodes);
  std::vector<mp::Real> out(static_cast<std::size_t>(n));
  mp::Real fx, term;
  for (long e = 0; e < elements; ++e) {
    const auto& vals = table.at(classify(e, elements, p), 0);
    for (int k = 0; k < q; ++k) {
      mp::Real x = ldexp(mp::Real(e) + nodes[static_cast<std::size_t>(k)], -level);
      fx = ldexp(f(x) * weights[static_cast<std::size_t>(k)], -level);
      for (int b = 0; b <= p; ++b) {
        long j = e + b;
        if (j < bc || j >= nfull - bc) continue;
        mpfr_mul(term.get(), fx.get(), vals[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)].get(),
                 MPFR_RNDN);
        out[static_cast<std::size_t>(j - bc)] += term;
      }
    }
  }
  return out;
}

std::vector<mp::Real> adaptive_moments(int p, int bc, int level, const Func& f, int width) {
  int q = p + 2;
  auto prev = moments(p, bc, level, f, q, width);
  for (;;) {
    int next_q = 2 * q;
    if (next_q > 1024) throw std::runtime_error("load vector quadrature did not converge");
    auto next = moments(p, bc, level, f, next_q, width);
    mp::Real diff, scale;
    for (std::size_t i = 0; i < next.size(); ++i) {
      mp::Real d = abs(next[i] - prev[i]);
      if (diff < d) diff = d;
      mp::Real a = abs(next[i]);
      if (scale < a) scale = a;
    }
    if (!(ldexp(scale, -(width / 2)) < diff)) return next;
    prev = std::move(next);
    q = next_q;
  }
}

}  // namespace

std::vector<SoftScalar> load_vector(const ProblemSpec& problem, int level, int width) {
  validate(problem);
  mp::Precision guard(width + 16);
  const int p = problem.degree;
  const int bc = problem.order();
  const Pde pde = problem.pde;
  std::vector<SoftScalar> out;
  if (problem.dim == 1) {
    auto mvec = adaptive_moments(p, bc, level, [pde](const mp::Real& x) { return detail::source_1d(pde, x); }, width);
    for (const auto& v : mvec) out.push_back(v.to_scalar(width));
    return out;
  }
  auto g0 = adaptive_moments(p, bc, level, [](const mp::Real& x) { return detail::solution_1d(Pde::poisson, x)[0]; },
                             width);
  auto g2 = adaptive_moments(p, bc, level, [](const mp::Real& x) { return detail::solution_1d(Pde::poisson, x)[2]; },
                             width);
  const std::size_t n = g0.size();
  out.reserve(n * n);
  for (std::size_t iy = 0; iy < n; ++iy) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      mp::Real v = -(g2[ix] * g0[iy] + g0[ix] * g2[iy]);
      out.push_back(v.to_scalar(width));
    }
  }
  return out;
}

GridHierarchy::GridHierarchy(const ProblemSpec& problem, int finest_physical_level, int assembly_width)
    : problem_(problem), offset_(problem.coarsest_level()), assembly_width_(assembly_width) {
  validate(problem);
  if (finest_physical_level < offset_) {
    throw std::invalid_argument("finest level " + std::to_string(finest_physical_level) + " has no unknowns for " +
                                problem.name());
  }
  if (finest_physical_level > 30) throw std::invalid_argument("finest level too large");
  for (int phys = offset_; phys <= finest_physical_level; ++phys) {
    a_.push_back(fem::stiffness(problem, phys));
    if (phys == offset_) {
      p_.emplace_back();
      r_.emplace_back();
    } else {
      p_.push_back(fem::prolongation(problem, phys));
      r_.push_back(transpose(p_.back()));
    }
    f_.push_back(load_vector(problem, phys, assembly_width));
  }
}

}  // namespace cmg::fem
