#include <algorithm>
#include <chrono>

#include "cmg/solver.hpp"

namespace cmg::solver {

namespace {

std::uint64_t mantissa_bits(std::span<const BfpVector> v) {
  std::uint64_t bits = 0;
  for (const auto& s : v) bits += s.mantissa_bits();
  return bits;
}

std::uint64_t total_bits(std::span<const BfpVector> v) {
  std::uint64_t bits = 0;
  for (const auto& s : v) bits += s.total_bits();
  return bits;
}

void keep_max(std::vector<std::size_t>& acc, const std::vector<std::size_t>& v) {
  if (acc.size() < v.size()) acc.resize(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] = std::max(acc[i], v[i]);
}

LevelRecord make_record(const OperatorCache& ops, int L, const CompactVector& u) {
  const auto& pol = ops.policy();
  LevelRecord rec;
  rec.level = ops.physical(L);
  rec.dofs = ops.dofs(L);
  for (int l = 0; l <= L; ++l) {
    rec.u_widths.push_back(pol.u_width(l, L));
    rec.ry_widths.push_back(pol.ry_width(l, L));
  }
  rec.u_mantissa_bits = u.mantissa_bits();
  rec.u_total_bits = u.total_bits();
  return rec;
}

}  // namespace

std::vector<SoftScalar> decode_exact(const CompactVector& v, const OperatorCache& ops) {
  const int w = std::max(768, 2 * ops.policy().ut_width(v.finest()) + 256);
  std::vector<StencilOperator> p;
  for (int l = 0; l <= v.finest(); ++l) p.push_back(ops.level(l).p_f);
  return compact::decode(v, p, w);
}

CfmgResult cfmg(const GridHierarchy& hierarchy, const CfmgOptions& options) {
  using clock = std::chrono::steady_clock;
  PrecisionPolicy pol(hierarchy.problem(), options.constants, hierarchy.offset());
  OperatorCache ops(hierarchy, pol);
  CfmgResult result;

  auto start = clock::now();
  CompactVector u = coarse_solve(ops);
  LevelRecord first = make_record(ops, 0, u);
  first.seconds = std::chrono::duration<double>(clock::now() - start).count();
  result.levels.push_back(std::move(first));
  if (options.on_level) options.on_level(0, u, ops);

  const SoftScalar one = SoftScalar::from_int(1, softfloat::kMinWidth);
  for (int L = 1; L <= hierarchy.finest(); ++L) {
    start = clock::now();
    u = compact::push_level(u, ops.dofs(L));
    LevelRecord rec;
    std::uint64_t r_bits = 0, y_bits = 0, r_total = 0, y_total = 0, peak_bits = 0;
    for (int it = 0; it < options.constants.N; ++it) {
      ResidualResult res = options.streaming ? fmg_residual_streaming(ops, L, u) : fmg_residual(ops, L, u);
      CompactVector y;
      std::uint64_t iter_bits = res.u.peak_bits() + res.t.peak_bits();
      if (options.streaming) {
        CfasStreamingResult c = cfas_vcycle_streaming(ops, L, res.r);
        y = std::move(c.y);
        iter_bits += c.z.peak_bits();
        keep_max(rec.peak_z, c.z.peak);
        rec.cap_z = c.z.capacity;
      } else {
        std::vector<std::size_t> lengths;
        for (int l = 0; l <= L; ++l) lengths.push_back(ops.dofs(l));
        y = cfas_vcycle(ops, L, CompactVector::zeros(pol.ry_spec(), lengths), res.r);
      }
      keep_max(rec.peak_u, res.u.peak);
      keep_max(rec.peak_t, res.t.peak);
      rec.cap_u = res.u.capacity;
      rec.cap_t = res.t.capacity;
      r_bits = std::max(r_bits, mantissa_bits(res.r));
      y_bits = std::max(y_bits, y.mantissa_bits());
      r_total = std::max(r_total, total_bits(res.r));
      y_total = std::max(y_total, y.total_bits());
      peak_bits = std::max(peak_bits, iter_bits);
      u = compact::axpy(one, y, u);
    }
    LevelRecord base = make_record(ops, L, u);
    base.iterations = options.constants.N;
    base.r_mantissa_bits = r_bits;
    base.y_mantissa_bits = y_bits;
    base.r_total_bits = r_total;
    base.y_total_bits = y_total;
    base.peak_buffer_bits = peak_bits;
    base.peak_z = std::move(rec.peak_z);
    base.peak_u = std::move(rec.peak_u);
    base.peak_t = std::move(rec.peak_t);
    base.cap_z = std::move(rec.cap_z);
    base.cap_u = std::move(rec.cap_u);
    base.cap_t = std::move(rec.cap_t);
    base.seconds = std::chrono::duration<double>(clock::now() - start).count();
    result.levels.push_back(std::move(base));
    if (options.on_level) options.on_level(L, u, ops);
  }
  result.u = std::move(u);
  return result;
}

CfmgResult cfmg(const ProblemSpec& problem, int finest_physical, const CfmgOptions& options) {
  GridHierarchy h(problem, finest_physical, required_assembly_width(problem, options.constants, finest_physical));
  return cfmg(h, options);
}

}  // namespace cmg::solver
