#pragma once

#include <cstdint>
#include <span>

#include "cmg/solver.hpp"

namespace cmg::solver::detail {

using softfloat::Accumulator;

// Last column of a row as a signed index; an empty row reads nothing and
// counts as -1.
inline std::int64_t last_col(const StencilOperator& a, std::size_t row) {
  std::size_t c = a.lst_col(row);
  return c == fem::kNoColumn ? -1 : static_cast<std::int64_t>(c);
}

// acc <- sum_k a[row, k] * x_k, left to right in column order, each product
// and each partial sum rounded to the accumulator width.
template <class Get>
void row_dot(Accumulator& acc, const StencilOperator& a, std::size_t row, Get&& get) {
  acc.clear();
  auto v = a.row(row);
  for (std::size_t k = 0; k < v.offsets.size(); ++k) {
    acc.add_product(v.values[k], get(static_cast<std::size_t>(v.base + v.offsets[k])));
  }
}

// Scratch space for one node update at a fixed working width.
struct NodeScratch {
  explicit NodeScratch(int width) : dot(width), d(width), upd(width), tmp(width), read(width) {}
  void reset(int width) {
    dot.reset(width);
    d.reset(width);
    upd.reset(width);
    tmp.reset(width);
  }
  Accumulator dot;
  SoftScalar d, upd, tmp;
  SoftScalar read;    // target for values fetched from encoders
  SoftScalar narrow;  // product rounded to a storage width
};

// Gauss-Seidel node update
//   y_j <- round_store(y_j + M_j (r_j - s_j - (A z)_j - (A y)_j))
// with all arithmetic at the scratch width. s and z may be absent. A store
// width of 0 leaves the result at the scratch width, for callers that round
// it into block floating point storage themselves.
template <class GetZ, class GetY>
void gs_node(NodeScratch& sc, const StencilOperator& a, const SoftScalar& m, std::size_t j, const SoftScalar& r,
             const SoftScalar* s, bool has_z, GetZ&& get_z, GetY&& get_y, int store_width, SoftScalar& out) {
  mpfr_set(sc.d.raw_mut(), r.raw(), MPFR_RNDN);
  if (s != nullptr) mpfr_sub(sc.d.raw_mut(), sc.d.raw(), s->raw(), MPFR_RNDN);
  if (has_z) {
    row_dot(sc.dot, a, j, get_z);
    mpfr_sub(sc.d.raw_mut(), sc.d.raw(), sc.dot.value().raw(), MPFR_RNDN);
  }
  row_dot(sc.dot, a, j, get_y);
  mpfr_sub(sc.d.raw_mut(), sc.d.raw(), sc.dot.value().raw(), MPFR_RNDN);
  mpfr_mul(sc.upd.raw_mut(), m.raw(), sc.d.raw(), MPFR_RNDN);
  const SoftScalar& yj = get_y(j);
  mpfr_add(sc.tmp.raw_mut(), yj.raw(), sc.upd.raw(), MPFR_RNDN);
  out.reset(store_width > 0 ? store_width : sc.tmp.width());
  mpfr_set(out.raw_mut(), sc.tmp.raw(), MPFR_RNDN);
}

// z_i <- round_store((P y)_i + (P z)_i), both products and the sum at the
// scratch width. The z term is absent on level 1.
template <class GetY, class GetZ>
void prolong_node(NodeScratch& sc, const StencilOperator& p, std::size_t i, GetY&& get_y, bool has_z, GetZ&& get_z,
                  int store_width, SoftScalar& out) {
  row_dot(sc.dot, p, i, get_y);
  mpfr_set(sc.d.raw_mut(), sc.dot.value().raw(), MPFR_RNDN);
  if (has_z) {
    row_dot(sc.dot, p, i, get_z);
    mpfr_add(sc.d.raw_mut(), sc.d.raw(), sc.dot.value().raw(), MPFR_RNDN);
  }
  out.reset(store_width);
  mpfr_set(out.raw_mut(), sc.d.raw(), MPFR_RNDN);
}

// u_i <- rnd_ut(rnd_ut(section_i) + rnd_ut((P u)_i)), the product at the
// scratch width.
template <class GetU>
void decode_node(NodeScratch& sc, const StencilOperator& p, std::size_t i, const SoftScalar& section, GetU&& get_u,
                 int ut_width, SoftScalar& out) {
  row_dot(sc.dot, p, i, get_u);
  SoftScalar& a = sc.narrow;
  a.reset(ut_width);
  mpfr_set(a.raw_mut(), sc.dot.value().raw(), MPFR_RNDN);
  out.reset(ut_width);
  mpfr_add(out.raw_mut(), section.raw(), a.raw(), MPFR_RNDN);
}

// t_j <- rnd_ut(f_j - (A u)_j) with the difference at the scratch width.
template <class GetU>
void residual_node(NodeScratch& sc, const StencilOperator& a, std::size_t j, const SoftScalar& f, GetU&& get_u,
                   int ut_width, SoftScalar& out) {
  row_dot(sc.dot, a, j, get_u);
  mpfr_sub(sc.d.raw_mut(), f.raw(), sc.dot.value().raw(), MPFR_RNDN);
  out.reset(ut_width);
  mpfr_set(out.raw_mut(), sc.d.raw(), MPFR_RNDN);
}

// t_j <- rnd_ut((R t)_j) with the product at the scratch width.
template <class GetT>
void restrict_node(NodeScratch& sc, const StencilOperator& r, std::size_t j, GetT&& get_t, int ut_width,
                   SoftScalar& out) {
  row_dot(sc.dot, r, j, get_t);
  out.reset(ut_width);
  mpfr_set(out.raw_mut(), sc.dot.value().raw(), MPFR_RNDN);
}

}  // namespace cmg::solver::detail
