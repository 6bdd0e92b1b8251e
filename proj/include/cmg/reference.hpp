#pragma once

#include <gmpxx.h>

#include <functional>
#include <span>
#include <vector>

#include "cmg/solver.hpp"

namespace cmg::reference {

using fem::GridHierarchy;
using fem::ProblemSpec;
using softfloat::SoftScalar;

// Textbook FMG with iterative refinement in one floating point format.
// Every correction comes from a V(pre, post) cycle with lexicographic
// Gauss-Seidel that starts from zero; the coarse grid correction scheme is
// used, which for a linear problem is the same as FAS.
struct ReferenceConfig {
  int mantissa_bits = 200;  // significand bits, the leading one included; at least 24
  int cycles_per_level = 30;
  int pre = 2;
  int post = 1;
  // Inside a cycle, level 0 is solved directly; otherwise it gets pre + post
  // sweeps like any other level. The first FMG level is always solved directly.
  bool coarse_direct = true;

  int width() const { return mantissa_bits + 1; }
};

// 200 bits for 1D Poisson, 100 for 2D Poisson, 250 for the biharmonic problem.
ReferenceConfig default_reference(const ProblemSpec& problem);

struct ReferenceLevel {
  int level = 0;  // physical
  std::size_t dofs = 0;
  std::vector<SoftScalar> u;
  SoftScalar error;  // relative H^m error, zero when not computed
};

struct ReferenceResult {
  std::vector<ReferenceLevel> levels;
};

// Runs on every level of the hierarchy, whose assembly width must be at
// least config.width().
ReferenceResult fmg_reference(const GridHierarchy& hierarchy, const ReferenceConfig& config,
                              bool compute_errors = true);
// Builds a hierarchy wide enough for the configuration.
ReferenceResult fmg_reference(const ProblemSpec& problem, int finest_physical, const ReferenceConfig& config,
                              bool compute_errors = true);

// Textbook FMG with every operation at a fixed significand width (24 for
// single, 53 for double precision) and `cycles` V(2,1) cycles per level.
ReferenceResult fmg_fixed_precision(const ProblemSpec& problem, int finest_physical, int significand_bits,
                                    int cycles = 3);

// Settings under which the reference performs the same operations as the
// compact solver with N iterations per level: V(0,1), one sweep on level 0.
ReferenceConfig equivalent_config(int mantissa_bits, int iterations);

using DenseMatrix = std::vector<std::vector<mpq_class>>;

// Blocks of the compact block system on solver levels 0..L, exact, from the
// vcycle-schedule operators of the cache: blocks[l][k] is A_l for k = l,
// A_l P_l ... P_{k+1} for k < l and R_{l+1} ... R_k A_k for k > l. In the
// block system the unknowns are ordered y_L, ..., y_0, so the blocks with
// k > l form the lower triangle. Throws for L > 3.
std::vector<std::vector<DenseMatrix>> block_matrix(const solver::OperatorCache& ops, int L);

// One pointwise Gauss-Seidel sweep in exact arithmetic on the block system,
// blocks in reverse order (level 0 first), nodes in index order within a
// block, with the smoother diagonal of the cache. y is the initial guess,
// r the right-hand side per level. store(l, j, value), when given, returns
// the value kept for unknown j of level l after its update.
using StoreFn = std::function<mpq_class(int, std::size_t, const mpq_class&)>;
std::vector<std::vector<mpq_class>> block_system_gs(const solver::OperatorCache& ops, int L,
                                                    std::span<const std::vector<mpq_class>> r,
                                                    std::span<const std::vector<mpq_class>> y,
                                                    const StoreFn& store = {});

// The same sweep on compact data; updated unknowns are kept exactly as the
// compact cycle keeps its correction, in a block floating point stream at
// the correction width of their level.
compact::CompactVector block_system_gs(const solver::OperatorCache& ops, int L, std::span<const bfp::BfpVector> r,
                                       const compact::CompactVector& y);

}  // namespace cmg::reference
