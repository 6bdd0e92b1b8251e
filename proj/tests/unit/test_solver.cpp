#include <gtest/gtest.h>

#include <map>
#include <random>

#include "fixtures.hpp"

using namespace cmg;
using namespace cmg::test_support;
using solver::Constants;
using solver::OperatorCache;

namespace {

using Dense = std::vector<std::vector<mpq_class>>;

Dense dense(const fem::StencilOperator& a) {
  Dense m(a.rows(), std::vector<mpq_class>(a.cols()));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto row = a.row(r);
    for (std::size_t k = 0; k < row.offsets.size(); ++k)
      m[r][static_cast<std::size_t>(row.base + row.offsets[k])] = row.values[k].to_rational();
  }
  return m;
}

std::vector<mpq_class> matvec(const Dense& a, const std::vector<mpq_class>& x) {
  std::vector<mpq_class> y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

std::vector<mpq_class> solve(Dense a, std::vector<mpq_class> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (a[piv][c] == 0) ++piv;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      mpq_class f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<mpq_class> x(n);
  for (std::size_t c = n; c-- > 0;) {
    mpq_class s = b[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= a[c][k] * x[k];
    x[c] = s / a[c][c];
  }
  return x;
}

std::vector<mpq_class> rationals(std::span<const SoftScalar> v) {
  std::vector<mpq_class> out;
  for (const auto& x : v) out.push_back(x.to_rational());
  return out;
}

double max_abs(const std::vector<mpq_class>& v) {
  double m = 0;
  for (const auto& x : v) m = std::max(m, std::fabs(x.get_d()));
  return m;
}

double max_diff(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(mpq_class(a[i] - b[i]).get_d()));
  return m;
}

const Constants kWide{1, 200, 200, 200, 200};

void expect_streaming_matches(const ProblemSpec& pr, int L, const Constants& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Built b = build(pr, pr.coarsest_level() + L, c);
  const OperatorCache& ops = *b.ops;
  auto u = random_solution(rng, ops, L);
  auto naive = solver::fmg_residual(ops, L, u);
  auto streamed = solver::fmg_residual_streaming(ops, L, u);
  ASSERT_EQ(naive.r.size(), streamed.r.size());
  for (std::size_t l = 0; l < naive.r.size(); ++l) {
    ASSERT_TRUE(naive.r[l] == streamed.r[l]) << pr.name() << " L=" << L << " residual level " << l;
    EXPECT_EQ(naive.r[l].width(), ops.policy().ry_width(static_cast<int>(l), L));
  }
  for (std::size_t l = 0; l < streamed.u.peak.size(); ++l) {
    EXPECT_LE(streamed.u.peak[l], streamed.u.capacity[l]);
    EXPECT_LE(streamed.t.peak[l], streamed.t.capacity[l]);
  }
  auto r = random_residual(rng, ops, L);
  auto y_naive = solver::cfas_vcycle(ops, L, zero_correction(ops, L), r);
  auto y_stream = solver::cfas_vcycle_streaming(ops, L, r);
  ASSERT_TRUE(y_naive == y_stream.y) << pr.name() << " L=" << L;
  for (std::size_t l = 0; l < y_stream.z.peak.size(); ++l) EXPECT_LE(y_stream.z.peak[l], y_stream.z.capacity[l]);
  // The computed residual as input as well.
  auto y2 = solver::cfas_vcycle(ops, L, zero_correction(ops, L), naive.r);
  ASSERT_TRUE(y2 == solver::cfas_vcycle_streaming(ops, L, naive.r).y);
}

}  // namespace

TEST(Policy, TunedConstants) {
  EXPECT_EQ(solver::table3({Pde::poisson, 1, 1}), (Constants{4, 5, 3, 2, 2}));
  EXPECT_EQ(solver::table3({Pde::poisson, 1, 5}), (Constants{9, 9, 5, 11, 4}));
  EXPECT_EQ(solver::table3({Pde::poisson, 2, 2}), (Constants{2, 5, 4, 3, 2}));
  EXPECT_EQ(solver::table3({Pde::poisson, 2, 5}), (Constants{9, 9, 6, 15, 2}));
  EXPECT_EQ(solver::table3({Pde::biharmonic, 1, 3}), (Constants{6, 4, 4, 2, 3}));
  EXPECT_EQ(solver::table3({Pde::biharmonic, 1, 7}), (Constants{11, 12, 6, 3, 2}));
  for (const auto& pr : all_problems()) EXPECT_TRUE(solver::has_table3(pr));
  EXPECT_FALSE(solver::has_table3({Pde::biharmonic, 1, 2}));
  EXPECT_THROW(solver::table3({Pde::poisson, 3, 1}), std::invalid_argument);
}

TEST(Policy, Widths) {
  solver::PrecisionPolicy pol({Pde::poisson, 1, 1}, {4, 5, 3, 2, 2}, 0);
  EXPECT_EQ(pol.ut_width(8), 21);
  EXPECT_EQ(pol.u_width(8, 8), 5);
  EXPECT_EQ(pol.u_width(5, 8), 11);
  EXPECT_EQ(pol.ry_width(8, 8), 3);
  EXPECT_EQ(pol.ry_width(0, 8), 11);
  EXPECT_EQ(pol.resid_mat_width(3), 3 * 3 + 2);
  EXPECT_EQ(pol.vcycle_mat_width(3), 3 + 2);
  EXPECT_EQ(pol.cfas_work_width(8, 8), 11);
  EXPECT_EQ(pol.cfas_work_width(0, 8), 11);
  // Biharmonic: solver level 0 is physical level 1.
  solver::PrecisionPolicy bh({Pde::biharmonic, 1, 3}, {6, 4, 4, 2, 3}, 1);
  EXPECT_EQ(bh.resid_mat_width(0), 6 * 1 + 2);
  EXPECT_EQ(bh.vcycle_mat_width(2), 2 * 3 + 3);
  EXPECT_EQ(bh.ut_width(2), 4 * 3 + 4);
  EXPECT_EQ(bh.ry_width(0, 2), 2 * 2 + 4);
  EXPECT_THROW(solver::PrecisionPolicy({Pde::poisson, 1, 1}, {4, 1, 3, 2, 2}, 0), softfloat::PrecisionError);
  EXPECT_THROW(solver::PrecisionPolicy({Pde::poisson, 1, 1}, {0, 5, 3, 2, 2}, 0), std::invalid_argument);
}

TEST(Policy, WorkingWidth) {
  EXPECT_EQ(solver::working_width(8, 8), 8);
  EXPECT_EQ(solver::working_width(5, 23), 23);
  EXPECT_EQ(solver::working_width(40, 23), 40);
}

TEST(Kernels, OneByOneSystemSolvedInOneSweep) {
  auto a = fem::StencilOperator::quantize(fem::ExactOperator::from_rows(1, {{{0, mpq_class(4)}}}), 20);
  auto m = solver::smoother_diagonal(a);
  std::vector<SoftScalar> rhs{SoftScalar::from_int(3, 20)}, y{SoftScalar(20)};
  auto out = solver::gs_smooth(a, m, rhs, y, 40, 40);
  EXPECT_EQ(out[0].to_rational(), mpq_class(3, 4));
}

TEST(Kernels, ExactSolutionIsFixedPoint) {
  Built b = build({Pde::poisson, 1, 2}, 4, kWide);
  const auto& lv = b.ops->level(b.ops->finest());
  Dense a = dense(lv.a_a);
  std::vector<mpq_class> x(a.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = mpq_class(static_cast<long>(i % 5) - 2) / 8;
  auto rhs_q = matvec(a, x);
  std::vector<SoftScalar> rhs, y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    rhs.push_back(softfloat::round_to(rhs_q[i], 1000));
    y.push_back(softfloat::round_to(x[i], 1000));
  }
  auto out = solver::gs_smooth(lv.a_a, lv.m_a, rhs, y, 1000, 60);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(out[i].to_rational(), x[i]);
}

TEST(Kernels, SweepMatchesDenseGaussSeidel) {
  // Linear Poisson elements: power-of-two diagonal, dyadic data, so every
  // step is exact at a large width.
  Built b = build({Pde::poisson, 1, 1}, 4, kWide);
  const auto& lv = b.ops->level(b.ops->finest());
  Dense a = dense(lv.a_a);
  std::mt19937_64 rng(4);
  std::vector<SoftScalar> rhs, y;
  std::vector<mpq_class> yq;
  for (std::size_t i = 0; i < a.size(); ++i) {
    rhs.push_back(SoftScalar::from_int(static_cast<long>(rng() % 64) - 32, 20));
    y.push_back(SoftScalar::from_int(static_cast<long>(rng() % 16) - 8, 20));
    yq.push_back(y.back().to_rational());
  }
  for (std::size_t j = 0; j < a.size(); ++j) {
    mpq_class s = rhs[j].to_rational();
    for (std::size_t k = 0; k < a.size(); ++k) s -= a[j][k] * yq[k];
    yq[j] += s / a[j][j];
  }
  auto out = solver::gs_smooth(lv.a_a, lv.m_a, rhs, y, 400, 400);
  EXPECT_EQ(rationals(out), yq);
}

TEST(Kernels, DenseSolveAgainstRationalElimination) {
  Built b = build({Pde::biharmonic, 1, 5}, 4, kWide);
  const auto& lv = b.ops->level(2);
  auto x = solver::dense_solve(lv.a_f, lv.f_f, 300);
  auto exact = solve(dense(lv.a_f), rationals(lv.f_f));
  EXPECT_LT(max_diff(rationals(x), exact), std::ldexp(max_abs(exact), -250));
  EXPECT_THROW(solver::dense_solve(fem::StencilOperator::quantize(fem::ExactOperator::from_rows(2, {{}, {}}), 8),
                                   std::vector<SoftScalar>(2, SoftScalar(8)), 20),
               std::domain_error);
}

TEST(Kernels, ZeroDiagonalRejected) {
  auto a = fem::StencilOperator::quantize(fem::ExactOperator::from_rows(2, {{{1, mpq_class(1)}}, {{0, mpq_class(1)}}}), 8);
  EXPECT_THROW(solver::smoother_diagonal(a), std::domain_error);
}

TEST(StreamBuffer, EvictionIsFinal) {
  solver::StreamBuffer buf(2, 10);
  for (int k = 0; k < 3; ++k) buf.push(SoftScalar::from_int(k, 10));
  EXPECT_EQ(buf.at(2).to_rational(), 2);
  EXPECT_EQ(buf.peak(), 2u);
  EXPECT_THROW(buf.at(0), solver::BufferWindowError);
  EXPECT_THROW(buf.at(3), solver::BufferWindowError);
  EXPECT_THROW(buf.push(SoftScalar::from_int(1, 11)), softfloat::PrecisionError);
}

TEST(Cfas, SingleLevelIsOneSweep) {
  const ProblemSpec pr{Pde::poisson, 2, 3};
  Built b = build(pr, pr.coarsest_level(), kWide);
  const auto& ops = *b.ops;
  std::mt19937_64 rng(7);
  auto r = random_residual(rng, ops, 0);
  auto y = solver::cfas_vcycle(ops, 0, zero_correction(ops, 0), r);
  Dense a = dense(ops.level(0).a_a);
  auto rq = rationals(r[0].decode());
  std::vector<mpq_class> yq(rq.size());
  for (std::size_t j = 0; j < yq.size(); ++j) {
    mpq_class s = rq[j];
    for (std::size_t k = 0; k < yq.size(); ++k) s -= a[j][k] * yq[k];
    yq[j] += s / a[j][j];
  }
  EXPECT_LT(max_diff(rationals(y.section(0).decode()), yq), std::ldexp(max_abs(yq), -190));
}

TEST(Cfas, ZeroStaysZero) {
  for (const auto& pr : {ProblemSpec{Pde::poisson, 1, 2}, ProblemSpec{Pde::biharmonic, 1, 4}}) {
    Built b = build(pr, pr.coarsest_level() + 4, solver::table3(pr));
    const auto& ops = *b.ops;
    auto zero = zero_correction(ops, 4);
    auto y = solver::cfas_vcycle(ops, 4, zero, zero.sections());
    for (const auto& sec : y.sections())
      for (const auto& v : sec.decode()) EXPECT_TRUE(v.is_zero());
  }
}

TEST(Cfas, RejectsWrongWidths) {
  Built b = build({Pde::poisson, 1, 1}, 4, solver::table3({Pde::poisson, 1, 1}));
  const int L = b.ops->finest();
  std::mt19937_64 rng(1);
  auto r = random_residual(rng, *b.ops, L);
  r[1] = bfp::widen(r[1], r[1].width() + 1);
  EXPECT_THROW(solver::cfas_vcycle_streaming(*b.ops, L, r), softfloat::PrecisionError);
  r.pop_back();
  EXPECT_THROW(solver::cfas_vcycle_streaming(*b.ops, L, r), std::invalid_argument);
}

TEST(Streaming, NamedCases) {
  expect_streaming_matches({Pde::poisson, 1, 1}, 6, solver::table3({Pde::poisson, 1, 1}), 1);
  expect_streaming_matches({Pde::poisson, 2, 2}, 4, solver::table3({Pde::poisson, 2, 2}), 2);
  expect_streaming_matches({Pde::poisson, 1, 3}, 6, solver::table3({Pde::poisson, 1, 3}), 3);
  expect_streaming_matches({Pde::biharmonic, 1, 3}, 5, solver::table3({Pde::biharmonic, 1, 3}), 4);
}

TEST(Streaming, RandomizedConfigurations) {
  std::mt19937_64 rng(2024);
  const auto& problems = all_problems();
  for (int trial = 0; trial < 20; ++trial) {
    const auto& pr = problems[rng() % problems.size()];
    const int L = static_cast<int>(rng() % (pr.dim == 1 ? 7 : 4));
    Constants c{1, 2 + static_cast<int>(rng() % 10), 2 + static_cast<int>(rng() % 10),
                2 + static_cast<int>(rng() % 10), 2 + static_cast<int>(rng() % 10)};
    SCOPED_TRACE(pr.name() + " L=" + std::to_string(L));
    expect_streaming_matches(pr, L, c, rng());
  }
}

TEST(Residual, ZeroSolutionGivesRestrictedLoad) {
  const ProblemSpec pr{Pde::poisson, 1, 2};
  const int L = 3;
  Built b = build(pr, L, kWide);
  const auto& ops = *b.ops;
  std::vector<std::size_t> lengths;
  for (int l = 0; l <= L; ++l) lengths.push_back(ops.dofs(l));
  auto u = compact::CompactVector::zeros(ops.policy().u_spec(), lengths);
  auto res = solver::fmg_residual(ops, L, u);
  std::vector<mpq_class> t = rationals(ops.level(L).f_f);
  for (int l = L; l >= 0; --l) {
    auto got = rationals(res.r[static_cast<std::size_t>(l)].decode());
    EXPECT_LT(max_diff(got, t), std::ldexp(max_abs(t), -180)) << "level " << l;
    if (l > 0) t = matvec(dense(ops.level(l).r_f), t);
  }
}

TEST(Residual, RandomSolutionMatchesDenseOracle) {
  for (const auto& pr : {ProblemSpec{Pde::poisson, 1, 3}, ProblemSpec{Pde::biharmonic, 1, 5},
                         ProblemSpec{Pde::poisson, 2, 1}}) {
    const int L = 3;
    Built b = build(pr, pr.coarsest_level() + L, kWide);
    const auto& ops = *b.ops;
    std::mt19937_64 rng(11);
    auto u = random_solution(rng, ops, L);
    auto res = solver::fmg_residual_streaming(ops, L, u);
    auto fine = exact_values(u, ops);
    auto au = matvec(dense(ops.level(L).a_f), fine);
    std::vector<mpq_class> t = rationals(ops.level(L).f_f);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] -= au[i];
    for (int l = L; l >= 0; --l) {
      auto got = rationals(res.r[static_cast<std::size_t>(l)].decode());
      EXPECT_LT(max_diff(got, t), std::ldexp(max_abs(t), -150)) << pr.name() << " level " << l;
      if (l > 0) t = matvec(dense(ops.level(l).r_f), t);
    }
  }
}

TEST(Residual, DiscreteSolutionLeavesNoResidual) {
  const ProblemSpec pr{Pde::biharmonic, 1, 4};
  const int L = 3;
  Built b = build(pr, pr.coarsest_level() + L, kWide);
  const auto& ops = *b.ops;
  auto x = solve(dense(ops.level(L).a_f), rationals(ops.level(L).f_f));
  std::vector<bfp::BfpVector> sec;
  for (int l = 0; l < L; ++l) sec.push_back(bfp::BfpVector::zeros(ops.dofs(l), ops.policy().u_width(l, L)));
  std::vector<SoftScalar> xs;
  for (const auto& v : x) xs.push_back(softfloat::round_to(v, 400));
  sec.push_back(bfp::encode(xs, ops.policy().u_width(L, L)));
  compact::CompactVector u(ops.policy().u_spec(), sec);
  auto res = solver::fmg_residual(ops, L, u);
  double f = max_abs(rationals(ops.level(L).f_f));
  EXPECT_LT(max_abs(rationals(res.r[static_cast<std::size_t>(L)].decode())), std::ldexp(f, -150));
}

TEST(Coarse, DirectSolveOfCoarsestLevel) {
  const ProblemSpec pr{Pde::poisson, 2, 3};
  Built b = build(pr, pr.coarsest_level() + 1, kWide);
  auto u = solver::coarse_solve(*b.ops);
  auto exact = solve(dense(b.ops->level(0).a_f), rationals(b.ops->level(0).f_f));
  EXPECT_EQ(u.finest(), 0);
  EXPECT_EQ(u.section(0).width(), 200);
  EXPECT_LT(max_diff(rationals(u.section(0).decode()), exact), std::ldexp(max_abs(exact), -190));
}

TEST(Cfmg, StreamingAndNaiveRunsAgree) {
  const ProblemSpec pr{Pde::poisson, 1, 2};
  solver::CfmgOptions opt;
  opt.constants = solver::table3(pr);
  auto a = solver::cfmg(pr, 7, opt);
  opt.streaming = false;
  auto b = solver::cfmg(pr, 7, opt);
  EXPECT_TRUE(a.u == b.u);
  ASSERT_EQ(a.levels.size(), 8u);
  const auto& last = a.levels.back();
  EXPECT_EQ(last.level, 7);
  EXPECT_EQ(last.iterations, opt.constants.N);
  for (int l = 0; l <= 7; ++l) {
    EXPECT_EQ(last.u_widths[static_cast<std::size_t>(l)], 3 * (7 - l) + opt.constants.b1);
    EXPECT_EQ(a.u.section(l).width(), last.u_widths[static_cast<std::size_t>(l)]);
  }
  for (std::size_t l = 0; l < last.peak_z.size(); ++l) EXPECT_LE(last.peak_z[l], last.cap_z[l]);
}

TEST(Cfmg, ReachesDiscretizationAccuracyOnSmallProblem) {
  const ProblemSpec pr{Pde::poisson, 1, 1};
  solver::CfmgOptions opt;
  opt.constants = solver::table3(pr);
  std::map<int, double> errors;  // by physical level
  opt.on_level = [&](int L, const compact::CompactVector& u, const OperatorCache& ops) {
    auto v = solver::decode_exact(u, ops);
    errors[ops.physical(L)] = fem::relative_hm_error(pr, ops.physical(L), v).to_double();
  };
  solver::cfmg(pr, 8, opt);
  ASSERT_EQ(errors.rbegin()->first, 8);
  for (int l = 5; l <= 8; ++l) EXPECT_NEAR(errors.at(l - 1) / errors.at(l), 2.0, 0.1) << l;
}
