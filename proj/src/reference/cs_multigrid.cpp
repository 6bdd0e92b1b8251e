#include <algorithm>
#include <stdexcept>
#include <string>

#include "cmg/reference.hpp"

namespace cmg::reference {

namespace {

using solver::StencilOperator;

struct Level {
  StencilOperator a, p, r;  // p, r empty on level 0
  std::vector<SoftScalar> m, f;
};

class Fmg {
 public:
  Fmg(const GridHierarchy& h, const ReferenceConfig& c) : cfg_(c), w_(c.width()) {
    if (c.mantissa_bits < 24 || c.cycles_per_level < 0 || c.pre < 0 || c.post < 0) {
      throw std::invalid_argument("reference: bad configuration");
    }
    if (h.assembly_width() < w_) {
      throw softfloat::PrecisionError("reference needs an assembly width of at least " + std::to_string(w_));
    }
    for (int l = 0; l <= h.finest(); ++l) {
      Level lv;
      lv.a = StencilOperator::quantize(h.stiffness(l), w_, fem::OpKind::stiffness);
      if (l > 0) {
        lv.p = StencilOperator::quantize(h.prolongation(l), w_, fem::OpKind::prolongation);
        lv.r = StencilOperator::quantize(h.restriction(l), w_, fem::OpKind::restriction);
      }
      lv.m = solver::smoother_diagonal(lv.a);
      for (const auto& v : h.rhs(l)) lv.f.push_back(softfloat::round_to(v, w_));
      levels_.push_back(std::move(lv));
    }
  }

  std::vector<SoftScalar> coarse() const { return solver::dense_solve(levels_[0].a, levels_[0].f, w_); }

  std::vector<SoftScalar> interpolate(int l, std::span<const SoftScalar> coarse) const {
    return apply(levels_[static_cast<std::size_t>(l)].p, coarse);
  }

  // One refinement step: u <- u + V(l, f - A u).
  void refine(int l, std::vector<SoftScalar>& u) const {
    const auto& lv = levels_[static_cast<std::size_t>(l)];
    auto d = vcycle(l, residual(lv.a, lv.f, u));
    for (std::size_t i = 0; i < u.size(); ++i) softfloat::arith_into(u[i], softfloat::Op::add, u[i], d[i], w_);
  }

 private:
  std::vector<SoftScalar> apply(const StencilOperator& a, std::span<const SoftScalar> x) const {
    std::vector<SoftScalar> out;
    out.reserve(a.rows());
    softfloat::Accumulator acc(w_);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      acc.clear();
      auto row = a.row(i);
      for (std::size_t k = 0; k < row.offsets.size(); ++k) {
        acc.add_product(row.values[k], x[static_cast<std::size_t>(row.base + row.offsets[k])]);
      }
      out.push_back(acc.value());
    }
    return out;
  }

  std::vector<SoftScalar> residual(const StencilOperator& a, std::span<const SoftScalar> f,
                                   std::span<const SoftScalar> x) const {
    auto ax = apply(a, x);
    for (std::size_t i = 0; i < ax.size(); ++i) softfloat::arith_into(ax[i], softfloat::Op::sub, f[i], ax[i], w_);
    return ax;
  }

  void sweeps(const Level& lv, std::span<const SoftScalar> rhs, std::vector<SoftScalar>& x, int count) const {
    for (int s = 0; s < count; ++s) x = solver::gs_smooth(lv.a, lv.m, rhs, x, w_, w_);
  }

  std::vector<SoftScalar> vcycle(int l, const std::vector<SoftScalar>& rhs) const {
    const auto& lv = levels_[static_cast<std::size_t>(l)];
    if (l == 0 && cfg_.coarse_direct) return solver::dense_solve(lv.a, rhs, w_);
    std::vector<SoftScalar> x(rhs.size(), SoftScalar::from_int(0, w_));
    if (l == 0) {
      sweeps(lv, rhs, x, cfg_.pre + cfg_.post);
      return x;
    }
    sweeps(lv, rhs, x, cfg_.pre);
    auto rc = apply(lv.r, cfg_.pre > 0 ? residual(lv.a, rhs, x) : rhs);
    auto ec = vcycle(l - 1, rc);
    auto pe = apply(lv.p, ec);
    for (std::size_t i = 0; i < x.size(); ++i) softfloat::arith_into(x[i], softfloat::Op::add, x[i], pe[i], w_);
    sweeps(lv, rhs, x, cfg_.post);
    return x;
  }

  ReferenceConfig cfg_;
  int w_;
  std::vector<Level> levels_;
};

}  // namespace

ReferenceConfig default_reference(const ProblemSpec& problem) {
  ReferenceConfig c;
  if (problem.pde == fem::Pde::biharmonic) {
    c.mantissa_bits = 250;
  } else {
    c.mantissa_bits = problem.dim == 1 ? 200 : 100;
  }
  return c;
}

ReferenceConfig equivalent_config(int mantissa_bits, int iterations) {
  ReferenceConfig c;
  c.mantissa_bits = mantissa_bits;
  c.cycles_per_level = iterations;
  c.pre = 0;
  c.post = 1;
  c.coarse_direct = false;
  return c;
}

ReferenceResult fmg_reference(const GridHierarchy& hierarchy, const ReferenceConfig& config, bool compute_errors) {
  Fmg fmg(hierarchy, config);
  ReferenceResult res;
  std::vector<SoftScalar> u = fmg.coarse();
  for (int l = 0;; ++l) {
    if (l > 0) {
      u = fmg.interpolate(l, u);
      for (int c = 0; c < config.cycles_per_level; ++c) fmg.refine(l, u);
    }
    ReferenceLevel rec;
    rec.level = hierarchy.physical(l);
    rec.dofs = u.size();
    rec.u = u;
    if (compute_errors) rec.error = fem::relative_hm_error(hierarchy.problem(), rec.level, u);
    res.levels.push_back(std::move(rec));
    if (l == hierarchy.finest()) break;
  }
  return res;
}

ReferenceResult fmg_reference(const ProblemSpec& problem, int finest_physical, const ReferenceConfig& config,
                              bool compute_errors) {
  GridHierarchy h(problem, finest_physical, std::max(256, config.width() + 64));
  return fmg_reference(h, config, compute_errors);
}

ReferenceResult fmg_fixed_precision(const ProblemSpec& problem, int finest_physical, int significand_bits,
                                    int cycles) {
  ReferenceConfig c;
  c.mantissa_bits = significand_bits;
  c.cycles_per_level = cycles;
  return fmg_reference(problem, finest_physical, c, true);
}

}  // namespace cmg::reference
