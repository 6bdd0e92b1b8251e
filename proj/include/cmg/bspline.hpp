#pragma once

#include <gmpxx.h>

#include <vector>

namespace cmg::fem {

// Polynomial in the element-local coordinate s in [0, 1], coefficient k of s^k.
struct Poly {
  std::vector<mpq_class> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  mpq_class operator()(const mpq_class& s) const;
  Poly derivative(int times = 1) const;
  // p(a*s + b)
  Poly compose_affine(const mpq_class& a, const mpq_class& b) const;
  mpq_class integral01() const;
  void trim();
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(const mpq_class& k, const Poly& a);

// Element e of a uniform open-knot B-spline space with E elements is
// classified by (min(e, p), min(E - 1 - e, p)); elements in the same class
// carry the same local pieces.
struct ElementClass {
  int left = 0;
  int right = 0;
  friend auto operator<=>(const ElementClass&, const ElementClass&) = default;
};

ElementClass classify(long element, long elements, int degree);

// The p + 1 B-splines nonzero on an element of the given class, in global
// order: piece i belongs to global basis function element + i.
std::vector<Poly> local_pieces(int degree, ElementClass cls);

// X with coarse piece a restricted to the fine element equal to
// sum_b X[b][a] * fine piece b. half selects the left (0) or right (1) half of
// the coarse element.
std::vector<std::vector<mpq_class>> local_transfer(int degree, ElementClass fine, ElementClass coarse, int half);

}  // namespace cmg::fem
