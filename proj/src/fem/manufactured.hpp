#pragma once

#include <array>
#include <vector>

#include "cmg/bspline.hpp"
#include "cmg/problem.hpp"
#include "mp_real.hpp"

namespace cmg::fem::detail {

// Derivatives 0..2 of the one-dimensional factor of the exact solution:
// g(x) = x(1-x)cos(pi x/2) for Poisson, 1 - cos(2 pi x) for biharmonic.
inline std::array<mp::Real, 3> solution_1d(Pde pde, const mp::Real& x) {
  mp::Real s, c;
  if (pde == Pde::poisson) {
    mp::Real a = ldexp(mp::Real::pi(), -1);
    sin_cos(s, c, a * x);
    mp::Real one(1L);
    mp::Real q = x - x * x;
    mp::Real lin = one - ldexp(x, 1);
    mp::Real g0 = q * c;
    mp::Real g1 = lin * c - a * q * s;
    mp::Real g2 = -ldexp(c, 1) - ldexp(a * lin * s, 1) - a * a * q * c;
    return {g0, g1, g2};
  }
  mp::Real a = ldexp(mp::Real::pi(), 1);
  sin_cos(s, c, a * x);
  return {mp::Real(1L) - c, a * s, a * a * c};
}

// Right-hand side of the one-dimensional problems.
inline mp::Real source_1d(Pde pde, const mp::Real& x) {
  if (pde == Pde::poisson) return -solution_1d(pde, x)[2];
  mp::Real a = ldexp(mp::Real::pi(), 1);
  mp::Real a2 = a * a;
  return -(a2 * a2) * cos(a * x);
}

// Local pieces of every element class with coefficients at the current
// precision, plus values of derivative d at a set of nodes.
struct PieceTable {
  int degree = 0;
  std::vector<ElementClass> classes;
  // values[class][d][node][piece]
  std::vector<std::vector<std::vector<std::vector<mp::Real>>>> values;

  PieceTable(int p, int max_deriv, const std::vector<mp::Real>& nodes) : degree(p) {
    for (int l = 0; l <= p; ++l) {
      for (int r = 0; r <= p; ++r) classes.push_back({l, r});
    }
    for (const auto& cls : classes) {
      auto pieces = local_pieces(p, cls);
      std::vector<std::vector<std::vector<mp::Real>>> per_d;
      for (int d = 0; d <= max_deriv; ++d) {
        std::vector<std::vector<mp::Real>> per_node;
        for (const auto& x : nodes) {
          std::vector<mp::Real> per_piece;
          for (const auto& piece : pieces) {
            Poly dp = piece.derivative(d);
            mp::Real v;
            for (std::size_t k = dp.c.size(); k-- > 0;) v = v * x + mp::Real(dp.c[k]);
            per_piece.push_back(v);
          }
          per_node.push_back(std::move(per_piece));
        }
        per_d.push_back(std::move(per_node));
      }
      values.push_back(std::move(per_d));
    }
  }

  const std::vector<std::vector<mp::Real>>& at(ElementClass cls, int d) const {
    return values[static_cast<std::size_t>(cls.left * (degree + 1) + cls.right)][static_cast<std::size_t>(d)];
  }
};

}  // namespace cmg::fem::detail
