#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cmg/assembly.hpp"
#include "cmg/reference.hpp"
#include "fixtures.hpp"

using namespace cmg;
using namespace cmg::test_support;
using reference::DenseMatrix;

namespace {

DenseMatrix dense(const fem::StencilOperator& a) {
  DenseMatrix d(a.rows(), std::vector<mpq_class>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    for (std::size_t k = 0; k < row.offsets.size(); ++k)
      d[i][static_cast<std::size_t>(row.base + row.offsets[k])] = row.values[k].to_rational();
  }
  return d;
}

std::vector<mpq_class> matvec(const DenseMatrix& a, const std::vector<mpq_class>& x) {
  std::vector<mpq_class> y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

std::vector<mpq_class> rationals(const bfp::BfpVector& v) {
  std::vector<mpq_class> out;
  for (const auto& x : v.decode()) out.push_back(x.to_rational());
  return out;
}

// Linear interpolation from n coarse to 2n + 1 fine unknowns.
fem::ExactOperator linear_interpolation(std::size_t n) {
  std::vector<fem::SparseRow> rows(2 * n + 1);
  for (std::size_t c = 0; c < n; ++c) {
    rows[2 * c].push_back({c, mpq_class(1, 2)});
    rows[2 * c + 1].push_back({c, mpq_class(1)});
    rows[2 * c + 2].push_back({c, mpq_class(1, 2)});
  }
  return fem::ExactOperator::from_rows(n, rows);
}

fem::ExactOperator tridiagonal(std::size_t n, long off, long diag) {
  std::vector<fem::SparseRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) rows[i].push_back({i - 1, mpq_class(off)});
    rows[i].push_back({i, mpq_class(diag)});
    if (i + 1 < n) rows[i].push_back({i + 1, mpq_class(off)});
  }
  return fem::ExactOperator::from_rows(n, rows);
}

// Short dyadic operators with a power-of-two diagonal, so every product of
// the cycle is exact at the working width.
std::unique_ptr<solver::OperatorCache> dyadic_cache(int levels, const solver::Constants& c) {
  std::vector<fem::ExactOperator> a, p, r;
  std::vector<std::vector<SoftScalar>> rhs;
  std::size_t n = 3;
  for (int l = 0; l < levels; ++l) {
    a.push_back(tridiagonal(n, -1, 4));
    if (l == 0) {
      p.emplace_back();
      r.emplace_back();
    } else {
      p.push_back(linear_interpolation((n - 1) / 2));
      r.push_back(fem::transpose(p.back()));
    }
    rhs.emplace_back(n, SoftScalar(400));
    n = 2 * n + 1;
  }
  solver::PrecisionPolicy pol({Pde::poisson, 1, 1}, c, 1);
  return std::make_unique<solver::OperatorCache>(a, p, r, rhs, pol);
}

const solver::Constants kExact{1, 2, 10, 80, 80};

void expect_cycle_is_block_sweep(const solver::OperatorCache& ops, int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto spec = ops.policy().ry_spec();
  auto r = random_residual(rng, ops, L);
  compact::CompactVector y(spec, random_sections(rng, ops, L, spec, 1));
  EXPECT_EQ(solver::cfas_vcycle(ops, L, y, r), reference::block_system_gs(ops, L, r, y)) << "L=" << L;
  auto zero = zero_correction(ops, L);
  EXPECT_EQ(solver::cfas_vcycle_streaming(ops, L, r).y, reference::block_system_gs(ops, L, r, zero)) << "L=" << L;
}

}  // namespace

TEST(BlockSystem, CycleEqualsBlockSweepOnDyadicOperators) {
  auto ops = dyadic_cache(4, kExact);
  for (int L = 0; L <= 3; ++L)
    for (std::uint64_t seed = 1; seed <= 3; ++seed) expect_cycle_is_block_sweep(*ops, L, seed);
}

TEST(BlockSystem, CycleEqualsBlockSweepOnLinearPoisson) {
  Built b = build({Pde::poisson, 1, 1}, 4, kExact);
  ASSERT_EQ(b.ops->finest(), 3);
  for (int L = 0; L <= 3; ++L) expect_cycle_is_block_sweep(*b.ops, L, 10 + static_cast<std::uint64_t>(L));
}

TEST(BlockSystem, BlocksAreTransferChains) {
  Built b = build({Pde::poisson, 1, 1}, 4, kExact);
  const auto& ops = *b.ops;
  auto blocks = reference::block_matrix(ops, 3);
  // Row L of the block system applied to a compact vector is A_L times the
  // decoded vector; for a Galerkin hierarchy row l is the restricted version.
  std::mt19937_64 rng(4);
  std::vector<std::vector<mpq_class>> y;
  for (const auto& s : random_sections(rng, ops, 3, ops.policy().ry_spec(), 1)) y.push_back(rationals(s));
  std::vector<mpq_class> decoded = y[0];
  for (int l = 1; l <= 3; ++l) {
    decoded = matvec(dense(ops.level(l).p_a), decoded);
    for (std::size_t i = 0; i < decoded.size(); ++i) decoded[i] += y[static_cast<std::size_t>(l)][i];
  }
  std::vector<mpq_class> want = matvec(dense(ops.level(3).a_a), decoded);
  for (int l = 3; l >= 0; --l) {
    if (l < 3) want = matvec(dense(ops.level(l + 1).r_a), want);
    std::vector<mpq_class> got(ops.dofs(l));
    for (std::size_t k = 0; k <= 3; ++k) {
      auto part = matvec(blocks[static_cast<std::size_t>(l)][k], y[k]);
      for (std::size_t i = 0; i < got.size(); ++i) got[i] += part[i];
    }
    EXPECT_EQ(got, want) << "row " << l;
  }
}

TEST(BlockSystem, DeepHierarchiesRejected) {
  Built b = build({Pde::poisson, 1, 1}, 6, kExact);
  EXPECT_THROW(reference::block_matrix(*b.ops, 4), std::invalid_argument);
  EXPECT_NO_THROW(reference::block_matrix(*b.ops, 3));
}

TEST(Reference, ConfigurationChecks) {
  auto c = reference::default_reference({Pde::poisson, 1, 2});
  EXPECT_EQ(c.mantissa_bits, 200);
  EXPECT_EQ(reference::default_reference({Pde::poisson, 2, 2}).mantissa_bits, 100);
  EXPECT_EQ(reference::default_reference({Pde::biharmonic, 1, 3}).mantissa_bits, 250);
  auto e = reference::equivalent_config(80, 7);
  EXPECT_EQ(e.pre, 0);
  EXPECT_EQ(e.post, 1);
  EXPECT_EQ(e.cycles_per_level, 7);
  EXPECT_FALSE(e.coarse_direct);
  reference::ReferenceConfig bad;
  bad.mantissa_bits = 23;
  EXPECT_THROW(reference::fmg_reference({Pde::poisson, 1, 1}, 3, bad), std::invalid_argument);
}

TEST(Reference, LinearPoissonHalvesErrorPerLevel) {
  const ProblemSpec pr{Pde::poisson, 1, 1};
  auto res = reference::fmg_reference(pr, 10, reference::default_reference(pr));
  ASSERT_EQ(res.levels.back().level, 10);
  for (std::size_t i = 1; i < res.levels.size(); ++i) {
    if (res.levels[i].level < 4) continue;
    double ratio = res.levels[i - 1].error.to_double() / res.levels[i].error.to_double();
    EXPECT_NEAR(std::log2(ratio), 1.0, 0.05) << res.levels[i].level;
  }
}

TEST(Reference, OrderMatchesDegree) {
  // Order p - m + 1 in the H^m norm.
  for (auto [pr, lmax] : {std::pair{ProblemSpec{Pde::poisson, 1, 3}, 9}, std::pair{ProblemSpec{Pde::biharmonic, 1, 3}, 9},
                          std::pair{ProblemSpec{Pde::poisson, 2, 2}, 6}}) {
    auto res = reference::fmg_reference(pr, lmax, reference::default_reference(pr));
    const int m = pr.pde == Pde::biharmonic ? 2 : 1;
    for (std::size_t i = 1; i < res.levels.size(); ++i) {
      if (res.levels[i].level < 4) continue;
      double order = std::log2(res.levels[i - 1].error.to_double() / res.levels[i].error.to_double());
      // Preasymptotic levels may converge slightly faster than the rate.
      EXPECT_GE(order, pr.degree - m + 1 - 0.05) << pr.name() << " level " << res.levels[i].level;
      EXPECT_LE(order, pr.degree - m + 1 + 0.1) << pr.name() << " level " << res.levels[i].level;
      EXPECT_LT(res.levels[i].error, res.levels[i - 1].error);
    }
  }
}

TEST(Reference, SingleLevelIsDirectSolve) {
  for (const auto& pr : {ProblemSpec{Pde::poisson, 1, 2}, ProblemSpec{Pde::biharmonic, 1, 4}}) {
    fem::GridHierarchy h(pr, pr.coarsest_level(), 256);
    ASSERT_EQ(h.finest(), 0);
    auto res = reference::fmg_reference(h, reference::default_reference(pr), false);
    ASSERT_EQ(res.levels.size(), 1u);
    auto a = fem::StencilOperator::quantize(h.stiffness(0), 201);
    std::vector<mpq_class> u;
    for (const auto& x : res.levels[0].u) u.push_back(x.to_rational());
    auto au = matvec(dense(a), u);
    mpq_class worst = 0, scale = 0;
    for (std::size_t i = 0; i < au.size(); ++i) {
      mpq_class f = h.rhs(0)[i].to_rational();
      worst = std::max(worst, mpq_class(abs(au[i] - f)));
      scale = std::max(scale, mpq_class(abs(f)));
    }
    EXPECT_LT(mpq_class(worst / scale).get_d(), std::ldexp(1.0, -180)) << pr.name();
  }
}

TEST(Reference, FixedPrecisionFloorsAreOrdered) {
  const ProblemSpec pr{Pde::poisson, 1, 3};
  auto single = reference::fmg_fixed_precision(pr, 12, 24);
  auto dbl = reference::fmg_fixed_precision(pr, 12, 53);
  auto min_error = [](const reference::ReferenceResult& r) {
    double m = 1;
    for (const auto& l : r.levels) m = std::min(m, l.error.to_double());
    return m;
  };
  EXPECT_GT(min_error(single), min_error(dbl));
  // Single precision has stopped improving by the last levels.
  const auto& lv = single.levels;
  EXPECT_GE(lv.back().error.to_double() / lv[lv.size() - 2].error.to_double(), 0.9);
  // Double precision still follows the asymptotic rate at moderate levels.
  for (std::size_t i = 1; i < dbl.levels.size(); ++i) {
    if (dbl.levels[i].level < 4 || dbl.levels[i].level > 8) continue;
    EXPECT_NEAR(std::log2(dbl.levels[i - 1].error.to_double() / dbl.levels[i].error.to_double()), 3.0, 0.1);
  }
}
