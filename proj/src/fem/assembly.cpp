#include "cmg/assembly.hpp"

#include <map>
#include <stdexcept>
#include <tuple>

#include "cmg/bspline.hpp"

namespace cmg::fem {

namespace {

using Matrix = std::vector<std::vector<mpq_class>>;

Rational pow2(int e) {
  Rational r(1);
  if (e >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return r;
}

Matrix local_gram(int p, int deriv, ElementClass cls) {
  auto pieces = local_pieces(p, cls);
  std::vector<Poly> d;
  for (const auto& piece : pieces) d.push_back(piece.derivative(deriv));
  Matrix m(pieces.size(), std::vector<mpq_class>(pieces.size()));
  for (std::size_t a = 0; a < d.size(); ++a) {
    for (std::size_t b = 0; b < d.size(); ++b) m[a][b] = (d[a] * d[b]).integral01();
  }
  return m;
}

// Rows sharing a signature are translates of each other, so the rational work
// is done once per signature.
class RowClassifier {
 public:
  std::uint32_t find(const std::vector<long>& sig, bool& fresh) {
    auto [it, inserted] = ids_.try_emplace(sig, static_cast<std::uint32_t>(ids_.size()));
    fresh = inserted;
    return it->second;
  }

 private:
  std::map<std::vector<long>, std::uint32_t> ids_;
};

}  // namespace

ExactOperator gram_1d(int p, int deriv, int bc_order, int level) {
  const long elements = 1L << level;
  const long nfull = elements + p;
  const long m = bc_order;
  const long n = nfull - 2 * m;
  if (n < 1) throw std::invalid_argument("level has no interior unknowns");
  std::map<ElementClass, Matrix> local;
  RowClassifier classes;
  std::vector<ExactStencil> pool;
  std::vector<std::uint32_t> ids(static_cast<std::size_t>(n));
  std::vector<std::int64_t> bases(static_cast<std::size_t>(n));
  std::vector<long> sig;
  for (long row = 0; row < n; ++row) {
    const long j = row + m;
    const long e_lo = std::max(0L, j - p);
    const long e_hi = std::min(elements - 1, j);
    sig.clear();
    sig.push_back(e_lo - j);
    sig.push_back(e_hi - j);
    for (long e = e_lo; e <= e_hi; ++e) {
      auto cls = classify(e, elements, p);
      sig.push_back(cls.left);
      sig.push_back(cls.right);
    }
    for (long c = e_lo; c <= e_hi + p; ++c) sig.push_back(c >= m && c < nfull - m ? 1 : 0);
    bool fresh = false;
    std::uint32_t id = classes.find(sig, fresh);
    if (fresh) {
      std::map<std::int64_t, Rational> acc;
      for (long e = e_lo; e <= e_hi; ++e) {
        auto cls = classify(e, elements, p);
        auto it = local.find(cls);
        if (it == local.end()) it = local.emplace(cls, local_gram(p, deriv, cls)).first;
        const long a = j - e;
        for (long b = 0; b <= p; ++b) {
          const long c = e + b;
          if (c < m || c >= nfull - m) continue;
          acc[c - j] += it->second[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        }
      }
      ExactStencil s;
      for (auto& [o, v] : acc) {
        if (sgn(v) == 0) continue;
        s.offsets.push_back(o);
        s.values.push_back(v);
      }
      pool.push_back(std::move(s));
    }
    ids[static_cast<std::size_t>(row)] = id;
    bases[static_cast<std::size_t>(row)] = row;
  }
  return ExactOperator(static_cast<std::size_t>(n), static_cast<std::size_t>(n), std::move(pool), std::move(ids),
                       std::move(bases));
}

ExactOperator prolongation_1d(int p, int bc_order, int fine_level) {
  if (fine_level < 1) throw std::invalid_argument("prolongation needs fine_level >= 1");
  const long ef = 1L << fine_level;
  const long ec = ef / 2;
  const long m = bc_order;
  const long nf_full = ef + p;
  const long nc_full = ec + p;
  const long nf = nf_full - 2 * m;
  const long nc = nc_full - 2 * m;
  if (nf < 1 || nc < 1) throw std::invalid_argument("prolongation between empty levels");
  std::map<std::tuple<ElementClass, ElementClass, int>, Matrix> transfers;
  RowClassifier classes;
  std::vector<ExactStencil> pool;
  std::vector<std::uint32_t> ids(static_cast<std::size_t>(nf));
  std::vector<std::int64_t> bases(static_cast<std::size_t>(nf));
  std::vector<long> sig;
  for (long row = 0; row < nf; ++row) {
    const long j = row + m;
    const long e_lo = std::max(0L, j - p);
    const long e_hi = std::min(ef - 1, j);
    const long c_lo = e_lo / 2;
    const long c_hi = e_hi / 2;
    sig.clear();
    sig.push_back(e_lo - j);
    sig.push_back(e_hi - j);
    sig.push_back(e_lo % 2);
    for (long e = e_lo; e <= e_hi; ++e) {
      auto kf = classify(e, ef, p);
      auto kc = classify(e / 2, ec, p);
      sig.insert(sig.end(), {kf.left, kf.right, kc.left, kc.right});
    }
    for (long c = c_lo; c <= c_hi + p; ++c) sig.push_back(c >= m && c < nc_full - m ? 1 : 0);
    bool fresh = false;
    std::uint32_t id = classes.find(sig, fresh);
    const long base = c_lo - m;
    if (fresh) {
      std::map<std::int64_t, Rational> entries;
      for (long e = e_lo; e <= e_hi; ++e) {
        auto kf = classify(e, ef, p);
        auto kc = classify(e / 2, ec, p);
        int half = static_cast<int>(e % 2);
        auto key = std::make_tuple(kf, kc, half);
        auto it = transfers.find(key);
        if (it == transfers.end()) it = transfers.emplace(key, local_transfer(p, kf, kc, half)).first;
        const long b = j - e;
        for (long a = 0; a <= p; ++a) {
          const long c = e / 2 + a;
          if (c < m || c >= nc_full - m) continue;
          const auto& v = it->second[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
          auto [pos, inserted] = entries.try_emplace(c - m - base, v);
          if (!inserted && pos->second != v) throw std::logic_error("inconsistent prolongation entry");
        }
      }
      ExactStencil s;
      for (auto& [o, v] : entries) {
        if (sgn(v) == 0) continue;
        s.offsets.push_back(o);
        s.values.push_back(v);
      }
      pool.push_back(std::move(s));
    }
    ids[static_cast<std::size_t>(row)] = id;
    bases[static_cast<std::size_t>(row)] = base;
  }
  return ExactOperator(static_cast<std::size_t>(nf), static_cast<std::size_t>(nc), std::move(pool), std::move(ids),
                       std::move(bases));
}

ExactOperator stiffness(const ProblemSpec& problem, int level) {
  validate(problem);
  const int m = problem.order();
  if (problem.dim == 1) {
    ExactOperator k = gram_1d(problem.degree, m, m, level);
    k.scale(pow2((2 * m - 1) * level));
    return k;
  }
  ExactOperator k = gram_1d(problem.degree, 1, m, level);
  ExactOperator mm = gram_1d(problem.degree, 0, m, level);
  return add(kron(k, mm), kron(mm, k));
}

ExactOperator mass(const ProblemSpec& problem, int level) {
  validate(problem);
  ExactOperator mm = gram_1d(problem.degree, 0, problem.order(), level);
  if (problem.dim == 1) {
    mm.scale(pow2(-level));
    return mm;
  }
  ExactOperator m2 = kron(mm, mm);
  m2.scale(pow2(-2 * level));
  return m2;
}

ExactOperator prolongation(const ProblemSpec& problem, int fine_level) {
  validate(problem);
  ExactOperator p = prolongation_1d(problem.degree, problem.order(), fine_level);
  return problem.dim == 1 ? p : kron(p, p);
}

ExactOperator galerkin_coarsen(const ExactOperator& a, const ExactOperator& p) {
  return multiply(transpose(p), multiply(a, p));
}

StencilOperator assemble_fine_operator(const ProblemSpec& problem, int level, int assembly_width) {
  if (assembly_width < 256) throw std::invalid_argument("assembly width must be at least 256 bits");
  return StencilOperator::quantize(stiffness(problem, level), assembly_width, OpKind::stiffness);
}

}  // namespace cmg::fem
