#include "cmg/bspline.hpp"

#include <algorithm>
#include <stdexcept>

namespace cmg::fem {

namespace {

mpq_class frac(long a, long b) {
  mpq_class q{mpz_class(a), mpz_class(b)};
  q.canonicalize();
  return q;
}

}  // namespace

mpq_class Poly::operator()(const mpq_class& s) const {
  mpq_class v = 0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * s + c[k];
  return v;
}

Poly Poly::derivative(int times) const {
  Poly r = *this;
  for (int t = 0; t < times; ++t) {
    Poly d;
    for (std::size_t k = 1; k < r.c.size(); ++k) d.c.push_back(r.c[k] * static_cast<long>(k));
    r = std::move(d);
  }
  return r;
}

Poly Poly::compose_affine(const mpq_class& a, const mpq_class& b) const {
  // Horner in the polynomial ring.
  Poly lin{{b, a}};
  Poly r;
  for (std::size_t k = c.size(); k-- > 0;) {
    r = r * lin;
    r = r + Poly{{c[k]}};
  }
  return r;
}

mpq_class Poly::integral01() const {
  mpq_class v = 0;
  for (std::size_t k = 0; k < c.size(); ++k) v += c[k] / mpq_class(static_cast<long>(k + 1));
  return v;
}

void Poly::trim() {
  while (!c.empty() && sgn(c.back()) == 0) c.pop_back();
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly r;
  r.c.resize(std::max(a.c.size(), b.c.size()));
  for (std::size_t k = 0; k < a.c.size(); ++k) r.c[k] += a.c[k];
  for (std::size_t k = 0; k < b.c.size(); ++k) r.c[k] += b.c[k];
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  if (a.c.empty() || b.c.empty()) return r;
  r.c.assign(a.c.size() + b.c.size() - 1, mpq_class(0));
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  }
  return r;
}

Poly operator*(const mpq_class& k, const Poly& a) {
  Poly r = a;
  for (auto& v : r.c) v *= k;
  return r;
}

ElementClass classify(long element, long elements, int degree) {
  if (element < 0 || element >= elements) throw std::out_of_range("element index");
  return {static_cast<int>(std::min<long>(element, degree)),
          static_cast<int>(std::min<long>(elements - 1 - element, degree))};
}

std::vector<Poly> local_pieces(int p, ElementClass cls) {
  std::vector<long> r(static_cast<std::size_t>(2 * p + 2));
  for (int i = 0; i <= 2 * p + 1; ++i) r[static_cast<std::size_t>(i)] = std::clamp<long>(i - p, -cls.left, cls.right + 1);
  std::vector<Poly> n(static_cast<std::size_t>(2 * p + 1));
  n[static_cast<std::size_t>(p)] = Poly{{mpq_class(1)}};
  for (int d = 1; d <= p; ++d) {
    std::vector<Poly> next(static_cast<std::size_t>(2 * p + 1 - d));
    for (int i = 0; i <= 2 * p - d; ++i) {
      auto ui = static_cast<std::size_t>(i);
      Poly term;
      long den1 = r[ui + static_cast<std::size_t>(d)] - r[ui];
      if (den1 != 0 && !n[ui].c.empty()) {
        Poly lin{{frac(-r[ui], den1), frac(1, den1)}};
        term = term + lin * n[ui];
      }
      long den2 = r[ui + static_cast<std::size_t>(d) + 1] - r[ui + 1];
      if (den2 != 0 && !n[ui + 1].c.empty()) {
        Poly lin{{frac(r[ui + static_cast<std::size_t>(d) + 1], den2), frac(-1, den2)}};
        term = term + lin * n[ui + 1];
      }
      for (auto& v : term.c) v.canonicalize();
      term.trim();
      next[ui] = std::move(term);
    }
    n = std::move(next);
  }
  for (auto& piece : n) piece.c.resize(static_cast<std::size_t>(p + 1), mpq_class(0));
  return n;
}

std::vector<std::vector<mpq_class>> local_transfer(int p, ElementClass fine, ElementClass coarse, int half) {
  const std::size_t q = static_cast<std::size_t>(p + 1);
  auto f = local_pieces(p, fine);
  auto c = local_pieces(p, coarse);
  // Augmented system [F | C] with F[k][b] = coefficient of s^k in fine piece b.
  std::vector<std::vector<mpq_class>> m(q, std::vector<mpq_class>(2 * q));
  for (std::size_t b = 0; b < q; ++b) {
    for (std::size_t k = 0; k < q; ++k) m[k][b] = f[b].c[k];
  }
  for (std::size_t a = 0; a < q; ++a) {
    Poly g = c[a].compose_affine(frac(1, 2), frac(half, 2));
    g.c.resize(q, mpq_class(0));
    for (std::size_t k = 0; k < q; ++k) m[k][q + a] = g.c[k];
  }
  for (std::size_t col = 0; col < q; ++col) {
    std::size_t piv = col;
    while (piv < q && sgn(m[piv][col]) == 0) ++piv;
    if (piv == q) throw std::logic_error("singular local basis");
    std::swap(m[piv], m[col]);
    for (std::size_t rr = 0; rr < q; ++rr) {
      if (rr == col || sgn(m[rr][col]) == 0) continue;
      mpq_class factor = m[rr][col] / m[col][col];
      for (std::size_t k = col; k < 2 * q; ++k) m[rr][k] -= factor * m[col][k];
    }
  }
  std::vector<std::vector<mpq_class>> x(q, std::vector<mpq_class>(q));
  for (std::size_t b = 0; b < q; ++b) {
    for (std::size_t a = 0; a < q; ++a) x[b][a] = m[b][q + a] / m[b][b];
  }
  return x;
}

}  // namespace cmg::fem
