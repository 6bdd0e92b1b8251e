#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cmg/compact.hpp"
#include "cmg/hierarchy.hpp"

namespace cmg::solver {

using bfp::BfpVector;
using compact::CompactVector;
using fem::GridHierarchy;
using fem::ProblemSpec;
using fem::StencilOperator;
using softfloat::PrecisionSpec;
using softfloat::SoftScalar;

// IR iterations per level and the four base widths.
struct Constants {
  int N = 1;
  int b1 = 2;
  int b2 = 2;
  int b3 = 2;
  int b4 = 2;

  friend bool operator==(const Constants&, const Constants&) = default;
};

// Tuned constants for the supported problems; throws std::invalid_argument
// when no preset exists.
Constants table3(const ProblemSpec& problem);
bool has_table3(const ProblemSpec& problem);

int working_width(int mat_width, int vec_coarsest_width);

// Widths of every quantity. Levels l, L are solver levels (0 = coarsest
// level with unknowns); progressive widths and the width of u, t in the
// residual use the physical level l + offset, so that h = 2^-(l + offset).
class PrecisionPolicy {
 public:
  PrecisionPolicy() = default;
  PrecisionPolicy(const ProblemSpec& problem, Constants constants, int offset);

  const Constants& constants() const { return c_; }
  int offset() const { return offset_; }

  // <+(p+1), b1>
  PrecisionSpec u_spec() const { return PrecisionSpec::regressive(p_ + 1, c_.b1); }
  // <+m, b2>
  PrecisionSpec ry_spec() const { return PrecisionSpec::regressive(m_, c_.b2); }
  // <(p+m+1)+, b3> and <m+, b4> over physical levels.
  PrecisionSpec resid_mat_spec() const { return PrecisionSpec::progressive(p_ + m_ + 1, c_.b3); }
  PrecisionSpec vcycle_mat_spec() const { return PrecisionSpec::progressive(m_, c_.b4); }

  int u_width(int l, int L) const;
  int ry_width(int l, int L) const;
  int resid_mat_width(int l) const;
  int vcycle_mat_width(int l) const;
  // (p+1) * physical(L) + b1.
  int ut_width(int L) const;
  // Arithmetic width for products with the matrix of level l.
  int cfas_work_width(int l, int L) const { return working_width(vcycle_mat_width(l), ry_width(0, L)); }
  int resid_work_width(int l, int L) const { return working_width(resid_mat_width(l), ut_width(L)); }

 private:
  Constants c_;
  int p_ = 1;
  int m_ = 1;
  int offset_ = 0;
};

// Operators of one solver level at both matrix schedules. p_*/r_* map between
// levels l-1 and l and are empty on level 0.
struct LevelOperators {
  StencilOperator a_f, p_f, r_f;
  std::vector<SoftScalar> f_f;
  StencilOperator a_a, p_a, r_a;
  std::vector<SoftScalar> m_a;  // smoother diagonal, 1/A_jj of a_a at its width
  std::size_t delta_a = 0, delta_p = 0, delta_r = 0, delta_ap = 0;
};

class OperatorCache {
 public:
  OperatorCache(const GridHierarchy& hierarchy, const PrecisionPolicy& policy);
  // Explicit operators per solver level: a[l], p[l], r[l] (p[0], r[0]
  // ignored) and rhs[l] at a width no smaller than any matrix width.
  OperatorCache(std::span<const fem::ExactOperator> a, std::span<const fem::ExactOperator> p,
                std::span<const fem::ExactOperator> r, std::span<const std::vector<SoftScalar>> rhs,
                const PrecisionPolicy& policy);

  const PrecisionPolicy& policy() const { return policy_; }
  int physical(int l) const { return l + policy_.offset(); }
  int finest() const { return static_cast<int>(levels_.size()) - 1; }
  std::size_t dofs(int l) const { return levels_.at(static_cast<std::size_t>(l)).a_a.rows(); }
  const LevelOperators& level(int l) const { return levels_.at(static_cast<std::size_t>(l)); }
  // Buffer capacities of the streaming algorithms for a hierarchy with
  // finest level L.
  std::size_t z_capacity(int l, int L) const;
  std::size_t u_capacity(int l, int L) const;
  std::size_t t_capacity(int l) const;

 private:
  PrecisionPolicy policy_;
  std::vector<LevelOperators> levels_;
};

class BufferWindowError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Sliding window over a vector that is produced in index order. Pushing into
// a full buffer evicts the oldest entry; evicted entries are gone for good.
class StreamBuffer {
 public:
  StreamBuffer() = default;
  StreamBuffer(std::size_t capacity, int width);

  std::size_t capacity() const { return slots_.size(); }
  std::size_t begin() const { return lo_; }
  std::size_t end() const { return hi_; }
  std::size_t peak() const { return peak_; }
  int width() const { return width_; }

  void push(const SoftScalar& v);
  const SoftScalar& at(std::size_t i) const;

 private:
  std::vector<SoftScalar> slots_;
  std::size_t lo_ = 0;
  std::size_t hi_ = 0;
  std::size_t peak_ = 0;
  int width_ = 0;
};

struct BufferStats {
  std::vector<std::size_t> capacity;  // per level
  std::vector<std::size_t> peak;
  std::vector<int> width;
  std::uint64_t peak_bits() const;
};

// One forward lexicographic Gauss-Seidel sweep on A y = rhs: at node j,
// y_j <- fix(y_j + M_j (rhs_j - (A y)_j)) with already updated neighbours.
// Arithmetic at work_width, results rounded to store_width.
std::vector<SoftScalar> gs_smooth(const StencilOperator& a, std::span<const SoftScalar> m,
                                  std::span<const SoftScalar> rhs, std::span<const SoftScalar> y, int work_width,
                                  int store_width);

// Smoother diagonal 1/A_jj rounded to the width of a; throws on a zero
// diagonal.
std::vector<SoftScalar> smoother_diagonal(const StencilOperator& a);

// Gaussian elimination with partial pivoting, every operation at width.
std::vector<SoftScalar> dense_solve(const StencilOperator& a, std::span<const SoftScalar> b, int width);

// Compact V(0,1) FAS cycle on levels 0..L. r holds one section per level at
// the ry widths; y is the initial guess in ry_spec.
CompactVector cfas_vcycle(const OperatorCache& ops, int L, const CompactVector& y, std::span<const BfpVector> r);

struct CfasStreamingResult {
  CompactVector y;
  BufferStats z;
};
// Same cycle for a zero initial guess with O(1) correction buffers per level.
CfasStreamingResult cfas_vcycle_streaming(const OperatorCache& ops, int L, std::span<const BfpVector> r);

struct ResidualResult {
  std::vector<BfpVector> r;  // levels 0..L at ry widths
  BufferStats u;
  BufferStats t;
};
ResidualResult fmg_residual(const OperatorCache& ops, int L, const CompactVector& u);
ResidualResult fmg_residual_streaming(const OperatorCache& ops, int L, const CompactVector& u);

// Direct solve on level 0 at the residual working width, rounded to the
// solution width of a one-level hierarchy.
CompactVector coarse_solve(const OperatorCache& ops);

struct LevelRecord {
  int level = 0;  // physical
  std::size_t dofs = 0;
  int iterations = 0;
  std::vector<int> u_widths, ry_widths;
  std::uint64_t u_mantissa_bits = 0, u_total_bits = 0;
  std::uint64_t r_mantissa_bits = 0, y_mantissa_bits = 0;
  std::uint64_t r_total_bits = 0, y_total_bits = 0;
  std::uint64_t peak_buffer_bits = 0;
  std::vector<std::size_t> peak_z, peak_u, peak_t;
  std::vector<std::size_t> cap_z, cap_u, cap_t;
  double seconds = 0;
};

struct CfmgOptions {
  Constants constants;
  bool streaming = true;
  // Called after the IR iterations of every level, including the coarse solve.
  std::function<void(int level, const CompactVector& u, const OperatorCache& ops)> on_level;
};

struct CfmgResult {
  CompactVector u;
  std::vector<LevelRecord> levels;
};

// Compact FMG with IR on the levels of an existing hierarchy.
CfmgResult cfmg(const GridHierarchy& hierarchy, const CfmgOptions& options);
// Builds the hierarchy up to physical level finest_physical first.
CfmgResult cfmg(const ProblemSpec& problem, int finest_physical, const CfmgOptions& options);

// Assembly width large enough for every matrix and right-hand side width of
// the policy up to physical level finest_physical.
int required_assembly_width(const ProblemSpec& problem, const Constants& c, int finest_physical);

// Represented fine-level vector: the sections combined with the prolongations
// of the residual schedule, the ones the solver itself decodes with, at a
// width wide enough to be exact.
std::vector<SoftScalar> decode_exact(const CompactVector& v, const OperatorCache& ops);

}  // namespace cmg::solver
