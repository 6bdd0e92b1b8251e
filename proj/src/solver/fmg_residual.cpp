#include <stdexcept>
#include <string>

#include "kernels.hpp"

namespace cmg::solver {

namespace {

void check_solution_shape(const OperatorCache& ops, int L, const CompactVector& u) {
  if (L < 0 || L > ops.finest()) throw std::invalid_argument("fmg residual: level " + std::to_string(L) + " not available");
  const auto& pol = ops.policy();
  if (u.finest() != L || !(u.spec() == pol.u_spec())) throw std::invalid_argument("fmg residual: solution shape");
  for (int l = 0; l <= L; ++l) {
    if (u.section(l).size() != ops.dofs(l)) throw std::invalid_argument("fmg residual: section length mismatch");
  }
}

BufferStats empty_stats(int L) {
  BufferStats b;
  b.capacity.assign(static_cast<std::size_t>(L) + 1, 0);
  b.peak.assign(static_cast<std::size_t>(L) + 1, 0);
  b.width.assign(static_cast<std::size_t>(L) + 1, 0);
  return b;
}

}  // namespace

ResidualResult fmg_residual(const OperatorCache& ops, int L, const CompactVector& u) {
  check_solution_shape(ops, L, u);
  const auto& pol = ops.policy();
  const int ut = pol.ut_width(L);
  SoftScalar sec;

  std::vector<SoftScalar> cur;
  for (std::size_t i = 0; i < ops.dofs(0); ++i) {
    u.section(0).get_into(sec, i);
    cur.push_back(softfloat::round_to(sec, ut));
  }
  for (int l = 1; l <= L; ++l) {
    const auto& lv = ops.level(l);
    detail::NodeScratch sc(pol.resid_work_width(l, L));
    std::vector<SoftScalar> next(ops.dofs(l));
    auto get_u = [&](std::size_t c) -> const SoftScalar& { return cur[c]; };
    for (std::size_t i = 0; i < next.size(); ++i) {
      u.section(l).get_into(sec, i);
      detail::decode_node(sc, lv.p_f, i, sec, get_u, ut, next[i]);
    }
    cur = std::move(next);
  }

  ResidualResult res;
  res.r.resize(static_cast<std::size_t>(L) + 1);
  std::vector<SoftScalar> t(ops.dofs(L));
  {
    const auto& lv = ops.level(L);
    detail::NodeScratch sc(pol.resid_work_width(L, L));
    auto get_u = [&](std::size_t c) -> const SoftScalar& { return cur[c]; };
    for (std::size_t j = 0; j < t.size(); ++j) detail::residual_node(sc, lv.a_f, j, lv.f_f[j], get_u, ut, t[j]);
  }
  for (int l = L;; --l) {
    bfp::StreamEncoder enc(pol.ry_width(l, L), t.size());
    for (const auto& v : t) enc.push(v);
    res.r[static_cast<std::size_t>(l)] = enc.finish();
    if (l == 0) break;
    const auto& lv = ops.level(l);
    detail::NodeScratch sc(pol.resid_work_width(l, L));
    std::vector<SoftScalar> coarse(ops.dofs(l - 1));
    auto get_t = [&](std::size_t c) -> const SoftScalar& { return t[c]; };
    for (std::size_t j = 0; j < coarse.size(); ++j) detail::restrict_node(sc, lv.r_f, j, get_t, ut, coarse[j]);
    t = std::move(coarse);
  }
  res.u = empty_stats(L);
  res.t = empty_stats(L);
  return res;
}

ResidualResult fmg_residual_streaming(const OperatorCache& ops, int L, const CompactVector& u) {
  check_solution_shape(ops, L, u);
  const auto& pol = ops.policy();
  const int ut = pol.ut_width(L);
  const auto uL = static_cast<std::size_t>(L);

  std::vector<std::size_t> n(uL + 1), i(uL + 1, 0), j(uL + 1, 0);
  for (int l = 0; l <= L; ++l) n[static_cast<std::size_t>(l)] = ops.dofs(l);
  i[0] = n[0];
  std::vector<StreamBuffer> ubuf(uL + 1), tbuf(uL + 1);
  for (int l = 1; l <= L; ++l) ubuf[static_cast<std::size_t>(l)] = StreamBuffer(ops.u_capacity(l, L), ut);
  for (int l = 0; l <= L; ++l) tbuf[static_cast<std::size_t>(l)] = StreamBuffer(ops.t_capacity(l), ut);
  std::vector<bfp::StreamEncoder> enc;
  for (int l = 0; l <= L; ++l) enc.emplace_back(pol.ry_width(l, L), ops.dofs(l));
  // Matrix levels: A_L on L, R_{l+1} on l < L, P_l on l.
  std::vector<detail::NodeScratch> sc_c2f, sc_f2c;
  for (int l = 0; l <= L; ++l) {
    sc_c2f.emplace_back(pol.resid_work_width(l, L));
    sc_f2c.emplace_back(pol.resid_work_width(l == L ? L : l + 1, L));
  }
  SoftScalar sec, val;

  // u_0 is the coarsest section itself, widened.
  std::vector<SoftScalar> u0;
  for (std::size_t k = 0; k < n[0]; ++k) {
    u.section(0).get_into(sec, k);
    u0.push_back(softfloat::round_to(sec, ut));
  }
  auto get_u = [&](int l) {
    return [&, l](std::size_t c) -> const SoftScalar& {
      return l == 0 ? u0[c] : ubuf[static_cast<std::size_t>(l)].at(c);
    };
  };

  auto can_apply = [&](int l) {
    const auto ul = static_cast<std::size_t>(l);
    if (j[ul] >= n[ul]) return false;
    if (l == L) return detail::last_col(ops.level(L).a_f, j[ul]) < static_cast<std::int64_t>(i[ul]);
    return detail::last_col(ops.level(l + 1).r_f, j[ul]) < static_cast<std::int64_t>(j[ul + 1]);
  };

  // f2c(L) as an explicit descent: the frames are always L, L-1, ..., lvl
  // and each resumes at its loop guard after its child returns.
  auto f2c = [&]() {
    int lvl = L;
    while (lvl <= L) {
      const auto ul = static_cast<std::size_t>(lvl);
      if (!can_apply(lvl)) {
        ++lvl;
        continue;
      }
      auto& s = sc_f2c[ul];
      if (lvl == L) {
        const auto& lv = ops.level(L);
        detail::residual_node(s, lv.a_f, j[ul], lv.f_f[j[ul]], get_u(L), ut, val);
      } else {
        const auto& t_fine = tbuf[ul + 1];
        auto get_t = [&](std::size_t c) -> const SoftScalar& { return t_fine.at(c); };
        detail::restrict_node(s, ops.level(lvl + 1).r_f, j[ul], get_t, ut, val);
      }
      tbuf[ul].push(val);
      enc[ul].push(val);
      ++j[ul];
      if (lvl > 0) --lvl;
    }
  };

  if (L == 0) {
    f2c();
  } else {
    int lvl = 1;
    while (lvl >= 1) {
      const auto ul = static_cast<std::size_t>(lvl);
      const auto& lv = ops.level(lvl);
      bool ready = i[ul] < n[ul] && detail::last_col(lv.p_f, i[ul]) < static_cast<std::int64_t>(i[ul - 1]);
      if (!ready) {
        --lvl;
        continue;
      }
      u.section(lvl).get_into(sec, i[ul]);
      detail::decode_node(sc_c2f[ul], lv.p_f, i[ul], sec, get_u(lvl - 1), ut, val);
      ubuf[ul].push(val);
      ++i[ul];
      if (lvl == L) {
        f2c();
      } else {
        ++lvl;
      }
    }
  }

  for (int l = 0; l <= L; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    if (j[ul] != n[ul] || i[ul] != n[ul]) {
      throw std::logic_error("fmg residual streaming sweep left level " + std::to_string(l) + " incomplete");
    }
  }
  ResidualResult res;
  for (auto& e : enc) res.r.push_back(e.finish());
  res.u = empty_stats(L);
  res.t = empty_stats(L);
  for (int l = 0; l <= L; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    if (l > 0) {
      res.u.capacity[ul] = ubuf[ul].capacity();
      res.u.peak[ul] = ubuf[ul].peak();
      res.u.width[ul] = ut;
    }
    res.t.capacity[ul] = tbuf[ul].capacity();
    res.t.peak[ul] = tbuf[ul].peak();
    res.t.width[ul] = ut;
  }
  return res;
}

}  // namespace cmg::solver
