#pragma once

#include <memory>
#include <random>
#include <vector>

#include "cmg/solver.hpp"

namespace cmg::test_support {

using fem::Pde;
using fem::ProblemSpec;
using softfloat::SoftScalar;

struct Built {
  std::unique_ptr<fem::GridHierarchy> hierarchy;
  std::unique_ptr<solver::OperatorCache> ops;
};

inline Built build(const ProblemSpec& problem, int finest_physical, const solver::Constants& c, int extra_width = 0) {
  Built b;
  int w = solver::required_assembly_width(problem, c, finest_physical) + extra_width;
  b.hierarchy = std::make_unique<fem::GridHierarchy>(problem, finest_physical, w);
  solver::PrecisionPolicy pol(problem, c, b.hierarchy->offset());
  b.ops = std::make_unique<solver::OperatorCache>(*b.hierarchy, pol);
  return b;
}

// A value with `bits` random significant bits near 2^exp2.
inline SoftScalar random_value(std::mt19937_64& rng, int bits, long exp2) {
  mpz_class z = 1;
  for (int k = 1; k < bits; ++k) z = 2 * z + static_cast<int>(rng() & 1);
  if (rng() % 9 == 0) z = 0;
  if (rng() & 1) z = -z;
  return SoftScalar::from_scaled(z, exp2 - bits + 1 - static_cast<long>(rng() % 3), bits + 1);
}

// Sections that shrink by 2^-slope per level, like corrections of a smooth
// solution, stored at the widths of `spec`.
inline std::vector<bfp::BfpVector> random_sections(std::mt19937_64& rng, const solver::OperatorCache& ops, int L,
                                                   softfloat::PrecisionSpec spec, int slope) {
  std::vector<bfp::BfpVector> out;
  for (int l = 0; l <= L; ++l) {
    const int w = softfloat::width_of(spec, l, L);
    bfp::StreamEncoder enc(w, ops.dofs(l));
    for (std::size_t i = 0; i < ops.dofs(l); ++i) enc.push(random_value(rng, w + 4, -slope * l));
    out.push_back(enc.finish());
  }
  return out;
}

inline compact::CompactVector random_solution(std::mt19937_64& rng, const solver::OperatorCache& ops, int L) {
  const auto spec = ops.policy().u_spec();
  return compact::CompactVector(spec, random_sections(rng, ops, L, spec, spec.k));
}

inline std::vector<bfp::BfpVector> random_residual(std::mt19937_64& rng, const solver::OperatorCache& ops, int L) {
  return random_sections(rng, ops, L, ops.policy().ry_spec(), 1);
}

inline compact::CompactVector zero_correction(const solver::OperatorCache& ops, int L) {
  std::vector<std::size_t> lengths;
  for (int l = 0; l <= L; ++l) lengths.push_back(ops.dofs(l));
  return compact::CompactVector::zeros(ops.policy().ry_spec(), lengths);
}

inline const std::vector<ProblemSpec>& all_problems() {
  static const std::vector<ProblemSpec> v = {
      {Pde::poisson, 1, 1},    {Pde::poisson, 1, 2},    {Pde::poisson, 1, 3},    {Pde::poisson, 1, 4},
      {Pde::poisson, 1, 5},    {Pde::poisson, 2, 1},    {Pde::poisson, 2, 2},    {Pde::poisson, 2, 3},
      {Pde::poisson, 2, 4},    {Pde::poisson, 2, 5},    {Pde::biharmonic, 1, 3}, {Pde::biharmonic, 1, 4},
      {Pde::biharmonic, 1, 5}, {Pde::biharmonic, 1, 6}, {Pde::biharmonic, 1, 7}};
  return v;
}

// Fine-level values of a compact vector, exact.
inline std::vector<mpq_class> exact_values(const compact::CompactVector& v, const solver::OperatorCache& ops) {
  std::vector<mpq_class> out;
  for (const auto& x : solver::decode_exact(v, ops)) out.push_back(x.to_rational());
  return out;
}

}  // namespace cmg::test_support
