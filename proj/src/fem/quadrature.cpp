#include "cmg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "mp_real.hpp"

namespace cmg::fem {

namespace {

// Legendre P_n(x) and P_{n-1}(x) by the three-term recurrence.
void legendre(int n, const mp::Real& x, mp::Real& pn, mp::Real& pn1) {
  mp::Real p0(1L);
  mp::Real p1 = x;
  if (n == 0) {
    pn = p0;
    pn1 = mp::Real(0L);
    return;
  }
  for (int k = 2; k <= n; ++k) {
    mp::Real p2 = (mp::Real(static_cast<long>(2 * k - 1)) * x * p1 - mp::Real(static_cast<long>(k - 1)) * p0) /
                  mp::Real(static_cast<long>(k));
    p0 = std::move(p1);
    p1 = std::move(p2);
  }
  pn = p1;
  pn1 = p0;
}

QuadratureRule compute(int n, int width) {
  mp::Precision guard(width + 32);
  QuadratureRule rule;
  mp::Real one(1L);
  mp::Real tol = ldexp(one, -(width + 24));
  const mp::Real nn(static_cast<long>(n));
  for (int i = 0; i < n; ++i) {
    mp::Real x(std::cos(M_PI * (i + 0.75) / (n + 0.5)));
    mp::Real pn, pn1, dp;
    for (int it = 0; it < 200; ++it) {
      legendre(n, x, pn, pn1);
      dp = nn * (x * pn - pn1) / (x * x - one);
      mp::Real dx = pn / dp;
      x -= dx;
      if (abs(dx) < tol) break;
    }
    legendre(n, x, pn, pn1);
    dp = nn * (x * pn - pn1) / (x * x - one);
    mp::Real w = mp::Real(2L) / ((one - x * x) * dp * dp);
    // Map [-1, 1] to [0, 1].
    rule.nodes.push_back(ldexp(one + x, -1).to_scalar(width));
    rule.weights.push_back(ldexp(w, -1).to_scalar(width));
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int points, int width) {
  if (points < 1) throw std::invalid_argument("quadrature needs at least one point");
  static std::mutex mu;
  static std::map<std::pair<int, int>, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(points, width);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute(points, width)).first;
  return it->second;
}

}  // namespace cmg::fem
