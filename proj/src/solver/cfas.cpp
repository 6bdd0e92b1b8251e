#include <stdexcept>
#include <string>

#include "kernels.hpp"

namespace cmg::solver {

namespace {

void check_residual_shape(const OperatorCache& ops, int L, std::span<const BfpVector> r) {
  if (L < 0 || L > ops.finest()) throw std::invalid_argument("cfas: level " + std::to_string(L) + " not available");
  if (static_cast<int>(r.size()) != L + 1) throw std::invalid_argument("cfas: need one residual section per level");
  const auto& pol = ops.policy();
  for (int l = 0; l <= L; ++l) {
    const auto& sec = r[static_cast<std::size_t>(l)];
    if (sec.size() != ops.dofs(l)) throw std::invalid_argument("cfas: residual length mismatch on level " + std::to_string(l));
    if (sec.width() != pol.ry_width(l, L)) throw softfloat::PrecisionError("cfas: residual width mismatch");
  }
}

bool all_zero(const CompactVector& v) {
  SoftScalar x;
  for (const auto& sec : v.sections()) {
    for (std::size_t i = 0; i < sec.size(); ++i) {
      sec.get_into(x, i);
      if (!x.is_zero()) return false;
    }
  }
  return true;
}

const SoftScalar& no_z(std::size_t) { throw std::logic_error("no z term on this level"); }

}  // namespace

CompactVector cfas_vcycle(const OperatorCache& ops, int L, const CompactVector& y, std::span<const BfpVector> r) {
  check_residual_shape(ops, L, r);
  const auto& pol = ops.policy();
  if (y.finest() != L || !(y.spec() == pol.ry_spec())) throw std::invalid_argument("cfas: initial guess shape");
  for (int l = 0; l <= L; ++l) {
    if (y.section(l).size() != ops.dofs(l)) throw std::invalid_argument("cfas: initial guess length mismatch");
  }
  const auto uL = static_cast<std::size_t>(L);

  // Fine-to-coarse sweep: s_l = R_{l+1}(A_{l+1} y_{l+1} + s_{l+1}), held at
  // the working width of level l+1 and rounded to that of level l on use.
  std::vector<std::vector<SoftScalar>> s(uL + 1);
  const bool zero_guess = all_zero(y);
  if (!zero_guess) {
    s[uL].assign(ops.dofs(L), SoftScalar(pol.cfas_work_width(L, L)));
    for (int l = L - 1; l >= 0; --l) {
      const auto& fine = ops.level(l + 1);
      const int w = pol.cfas_work_width(l + 1, L);
      const int wa = pol.vcycle_mat_width(l + 1);
      const auto& yf = y.section(l + 1);
      std::vector<SoftScalar> ypro(yf.size());
      SoftScalar tmp;
      for (std::size_t k = 0; k < yf.size(); ++k) {
        yf.get_into(tmp, k);
        ypro[k] = softfloat::round_to(tmp, wa);
      }
      detail::NodeScratch sc(w);
      std::vector<SoftScalar> v(yf.size());
      const auto& sf = s[static_cast<std::size_t>(l + 1)];
      for (std::size_t k = 0; k < yf.size(); ++k) {
        detail::row_dot(sc.dot, fine.a_a, k, [&](std::size_t c) -> const SoftScalar& { return ypro[c]; });
        v[k] = SoftScalar(w);
        mpfr_add(v[k].raw_mut(), sc.dot.value().raw(), sf[k].raw(), MPFR_RNDN);
      }
      auto& sl = s[static_cast<std::size_t>(l)];
      sl.resize(ops.dofs(l));
      for (std::size_t i = 0; i < sl.size(); ++i) {
        detail::row_dot(sc.dot, fine.r_a, i, [&](std::size_t c) -> const SoftScalar& { return v[c]; });
        sl[i] = sc.dot.value();
      }
    }
    for (int l = 0; l <= L; ++l) {
      for (auto& e : s[static_cast<std::size_t>(l)]) softfloat::round_into(e, e, pol.cfas_work_width(l, L));
    }
  }

  // Coarse-to-fine sweep.
  std::vector<bfp::StreamEncoder> enc;
  for (int l = 0; l <= L; ++l) enc.emplace_back(pol.ry_width(l, L), ops.dofs(l));
  std::vector<SoftScalar> z_prev, z_cur;
  SoftScalar rj, next;
  for (int l = 0; l <= L; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    const auto& lv = ops.level(l);
    const std::size_t n = ops.dofs(l);
    const int w = pol.cfas_work_width(l, L);
    detail::NodeScratch sc(w);
    if (l > 0) {
      const auto& ycoarse = enc[ul - 1];
      const int wa = pol.vcycle_mat_width(l);
      z_cur.assign(n, SoftScalar());
      auto get_y = [&](std::size_t c) -> const SoftScalar& {
        ycoarse.get_into(sc.read, c);
        return sc.read;
      };
      auto get_z = [&](std::size_t c) -> const SoftScalar& { return z_prev[c]; };
      for (std::size_t i = 0; i < n; ++i) detail::prolong_node(sc, lv.p_a, i, get_y, l > 1, get_z, wa, z_cur[i]);
    }
    const auto& old = y.section(l);
    auto& out = enc[ul];
    std::size_t j = 0;
    auto get_y = [&](std::size_t c) -> const SoftScalar& {
      if (c < j) {
        out.get_into(sc.read, c);
      } else {
        old.get_into(sc.read, c);
      }
      return sc.read;
    };
    auto get_z = [&](std::size_t c) -> const SoftScalar& { return z_cur[c]; };
    for (j = 0; j < n; ++j) {
      r[ul].get_into(rj, j);
      const SoftScalar* sj = zero_guess ? nullptr : &s[ul][j];
      if (l > 0) {
        detail::gs_node(sc, lv.a_a, lv.m_a[j], j, rj, sj, true, get_z, get_y, 0, next);
      } else {
        detail::gs_node(sc, lv.a_a, lv.m_a[j], j, rj, sj, false, no_z, get_y, 0, next);
      }
      out.push(next);
    }
    z_prev = std::move(z_cur);
    z_cur.clear();
  }
  std::vector<BfpVector> sections;
  for (auto& e : enc) sections.push_back(e.finish());
  return CompactVector(pol.ry_spec(), std::move(sections));
}

CfasStreamingResult cfas_vcycle_streaming(const OperatorCache& ops, int L, std::span<const BfpVector> r) {
  check_residual_shape(ops, L, r);
  const auto& pol = ops.policy();
  const auto uL = static_cast<std::size_t>(L);
  std::vector<bfp::StreamEncoder> enc;
  for (int l = 0; l <= L; ++l) enc.emplace_back(pol.ry_width(l, L), ops.dofs(l));
  std::vector<detail::NodeScratch> sc;
  for (int l = 0; l <= L; ++l) sc.emplace_back(pol.cfas_work_width(l, L));
  std::vector<std::size_t> n(uL + 1), i(uL + 1, 0), j(uL + 1, 0);
  for (int l = 0; l <= L; ++l) n[static_cast<std::size_t>(l)] = ops.dofs(l);
  std::vector<StreamBuffer> z(uL + 1);
  for (int l = 1; l <= L; ++l) z[static_cast<std::size_t>(l)] = StreamBuffer(ops.z_capacity(l, L), pol.vcycle_mat_width(l));

  std::vector<SoftScalar> zeros;
  for (int l = 0; l <= L; ++l) zeros.emplace_back(pol.ry_width(l, L));
  SoftScalar rj, next;
  // Smoothing node j on level l; entries of y_l beyond j are still zero.
  auto smooth = [&](int l) {
    const auto ul = static_cast<std::size_t>(l);
    const auto& lv = ops.level(l);
    auto& s = sc[ul];
    const std::size_t jj = j[ul];
    const SoftScalar& zero = zeros[ul];
    auto get_y = [&](std::size_t c) -> const SoftScalar& {
      if (c < jj) {
        enc[ul].get_into(s.read, c);
        return s.read;
      }
      return zero;
    };
    auto get_z = [&](std::size_t c) -> const SoftScalar& { return z[ul].at(c); };
    r[ul].get_into(rj, jj);
    if (l > 0) {
      detail::gs_node(s, lv.a_a, lv.m_a[jj], jj, rj, nullptr, true, get_z, get_y, 0, next);
    } else {
      detail::gs_node(s, lv.a_a, lv.m_a[jj], jj, rj, nullptr, false, no_z, get_y, 0, next);
    }
    enc[ul].push(next);
    ++j[ul];
  };

  while (j[0] < n[0]) smooth(0);
  i[0] = n[0];

  // c2f(l) keeps no state across its recursive call, which is the last
  // statement of its loop body, so the call stack reduces to the current
  // level: descend on a call, ascend when the loop guard fails.
  int lvl = L > 0 ? 1 : 0;
  while (lvl >= 1) {
    const auto ul = static_cast<std::size_t>(lvl);
    const auto& lv = ops.level(lvl);
    bool ready = i[ul] < n[ul];
    if (ready) {
      std::int64_t last = detail::last_col(lv.p_a, i[ul]);
      ready = last < static_cast<std::int64_t>(j[ul - 1]) && last < static_cast<std::int64_t>(i[ul - 1]);
    }
    if (!ready) {
      --lvl;
      continue;
    }
    auto& s = sc[ul];
    auto get_y = [&](std::size_t c) -> const SoftScalar& {
      enc[ul - 1].get_into(s.read, c);
      return s.read;
    };
    auto get_z = [&](std::size_t c) -> const SoftScalar& { return z[ul - 1].at(c); };
    detail::prolong_node(s, lv.p_a, i[ul], get_y, lvl > 1, get_z, pol.vcycle_mat_width(lvl), next);
    z[ul].push(next);
    ++i[ul];
    while (j[ul] < n[ul] && detail::last_col(lv.a_a, j[ul]) < static_cast<std::int64_t>(i[ul])) smooth(lvl);
    if (lvl < L) ++lvl;
  }

  for (int l = 0; l <= L; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    if (j[ul] != n[ul] || (l > 0 && i[ul] != n[ul])) {
      throw std::logic_error("cfas streaming sweep left level " + std::to_string(l) + " incomplete");
    }
  }
  CfasStreamingResult res;
  std::vector<BfpVector> sections;
  for (auto& e : enc) sections.push_back(e.finish());
  res.y = CompactVector(pol.ry_spec(), std::move(sections));
  res.z.capacity.assign(uL + 1, 0);
  res.z.peak.assign(uL + 1, 0);
  res.z.width.assign(uL + 1, 0);
  for (int l = 1; l <= L; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    res.z.capacity[ul] = z[ul].capacity();
    res.z.peak[ul] = z[ul].peak();
    res.z.width[ul] = z[ul].width();
  }
  return res;
}

}  // namespace cmg::solver
