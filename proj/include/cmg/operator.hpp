#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cmg/softfloat.hpp"

namespace cmg::fem {

using Rational = mpq_class;
using softfloat::SoftScalar;

// Row rho of an operator holds entries at columns base(rho) + offsets[k].
// Rows with the same shape share one stencil in a pool.
struct ExactStencil {
  std::vector<std::int64_t> offsets;  // strictly increasing
  std::vector<Rational> values;       // nonzero
};

using SparseRow = std::vector<std::pair<std::size_t, Rational>>;

// fstCol/lstCol of a row without entries.
constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);

class ExactOperator {
 public:
  ExactOperator() = default;
  ExactOperator(std::size_t rows, std::size_t cols, std::vector<ExactStencil> pool,
                std::vector<std::uint32_t> row_stencil, std::vector<std::int64_t> row_base);
  // Entries equal to zero are dropped, so rows may be empty. Rows equal up to
  // a shift share a stencil.
  static ExactOperator from_rows(std::size_t cols, const std::vector<SparseRow>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t pool_size() const { return pool_.size(); }
  const std::vector<ExactStencil>& pool() const { return pool_; }
  std::uint32_t stencil_id(std::size_t row) const { return row_stencil_[row]; }
  std::int64_t base(std::size_t row) const { return row_base_[row]; }
  const ExactStencil& stencil(std::size_t row) const { return pool_[row_stencil_[row]]; }

  std::size_t fst_col(std::size_t row) const;
  std::size_t lst_col(std::size_t row) const;
  Rational entry(std::size_t row, std::size_t col) const;
  SparseRow row(std::size_t r) const;
  std::vector<SparseRow> to_rows() const;

  void scale(const Rational& factor);

  friend bool operator==(const ExactOperator& a, const ExactOperator& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<ExactStencil> pool_;
  std::vector<std::uint32_t> row_stencil_;
  std::vector<std::int64_t> row_base_;
};

ExactOperator transpose(const ExactOperator& a);
ExactOperator multiply(const ExactOperator& a, const ExactOperator& b);
ExactOperator add(const ExactOperator& a, const ExactOperator& b);
// (a kron b)[(ia, ib), (ja, jb)] = a[ia, ja] * b[ib, jb], index (ia, ib) -> ia * rows(b) + ib.
ExactOperator kron(const ExactOperator& a, const ExactOperator& b);

enum class OpKind { stiffness, prolongation, restriction, mass, general };

// Operator entries rounded to a declared width.
class StencilOperator {
 public:
  struct Stencil {
    std::vector<std::int64_t> offsets;
    std::vector<SoftScalar> values;
  };
  struct RowView {
    std::int64_t base;
    std::span<const std::int64_t> offsets;
    std::span<const SoftScalar> values;
  };

  StencilOperator() = default;
  static StencilOperator quantize(const ExactOperator& op, int width, OpKind kind = OpKind::general);
  // Same pattern with every entry converted to another width.
  StencilOperator rounded(int width) const;

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int width() const { return width_; }
  OpKind kind() const { return kind_; }
  std::size_t fst_col(std::size_t row) const { return fst_[row]; }
  std::size_t lst_col(std::size_t row) const { return lst_[row]; }
  RowView row(std::size_t r) const {
    const Stencil& s = pool_[row_stencil_[r]];
    return {row_base_[r], s.offsets, s.values};
  }
  SoftScalar entry(std::size_t row, std::size_t col) const;
  // Diagonal entry of a square operator; zero if absent.
  const SoftScalar& diagonal(std::size_t row) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  int width_ = 0;
  OpKind kind_ = OpKind::general;
  std::vector<Stencil> pool_;
  std::vector<std::uint32_t> row_stencil_;
  std::vector<std::int64_t> row_base_;
  std::vector<std::size_t> fst_;
  std::vector<std::size_t> lst_;
  std::vector<std::int32_t> diag_;  // per row: position of the diagonal entry, -1 if absent
  SoftScalar zero_;
};

// delta(M) = max_rho (lstCol(rho) - min_{sigma >= rho} fstCol(sigma) + 1).
std::size_t delta(const ExactOperator& m);
std::size_t delta(const StencilOperator& m);
// Same quantity by direct scan of the explicit entries, quadratic in rows.
std::size_t delta_brute_force(const ExactOperator& m);
// delta of the sparsity pattern of a * b, cancellation ignored.
std::size_t delta_of_product(const ExactOperator& a, const ExactOperator& b);
// Banded estimate (w - 1) n^((d-1)/d) for stencil width w per direction.
double delta_estimate(int stencil_width, double n, int dim);

}  // namespace cmg::fem
