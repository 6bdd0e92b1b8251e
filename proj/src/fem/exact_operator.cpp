#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

#include "cmg/operator.hpp"

namespace cmg::fem {

ExactOperator::ExactOperator(std::size_t rows, std::size_t cols, std::vector<ExactStencil> pool,
                             std::vector<std::uint32_t> row_stencil, std::vector<std::int64_t> row_base)
    : rows_(rows), cols_(cols), pool_(std::move(pool)), row_stencil_(std::move(row_stencil)),
      row_base_(std::move(row_base)) {
  if (row_stencil_.size() != rows_ || row_base_.size() != rows_) throw std::invalid_argument("operator row arrays");
  for (std::size_t r = 0; r < rows_; ++r) {
    if (row_stencil_[r] >= pool_.size()) throw std::invalid_argument("operator stencil id");
    const auto& s = pool_[row_stencil_[r]];
    if (s.offsets.empty()) continue;
    std::int64_t lo = row_base_[r] + s.offsets.front();
    std::int64_t hi = row_base_[r] + s.offsets.back();
    if (lo < 0 || hi >= static_cast<std::int64_t>(cols_)) {
      throw std::invalid_argument("operator row " + std::to_string(r) + " has columns out of range");
    }
  }
}

namespace {

std::string stencil_key(const ExactStencil& s) {
  std::string key;
  for (std::size_t k = 0; k < s.offsets.size(); ++k) {
    key += std::to_string(s.offsets[k]);
    key += ':';
    key += s.values[k].get_str();
    key += ';';
  }
  return key;
}

class PoolBuilder {
 public:
  std::uint32_t intern(ExactStencil s) {
    std::string key = stencil_key(s);
    auto [it, fresh] = index_.try_emplace(std::move(key), static_cast<std::uint32_t>(pool_.size()));
    if (fresh) pool_.push_back(std::move(s));
    return it->second;
  }
  std::vector<ExactStencil> take() { return std::move(pool_); }

 private:
  std::vector<ExactStencil> pool_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

}  // namespace

ExactOperator ExactOperator::from_rows(std::size_t cols, const std::vector<SparseRow>& rows) {
  PoolBuilder pool;
  std::vector<std::uint32_t> ids(rows.size());
  std::vector<std::int64_t> bases(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    SparseRow row = rows[r];
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    ExactStencil s;
    std::int64_t base = -1;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k + 1 < row.size() && row[k + 1].first == row[k].first) throw std::invalid_argument("duplicate column");
      if (sgn(row[k].second) == 0) continue;
      if (base < 0) base = static_cast<std::int64_t>(row[k].first);
      s.offsets.push_back(static_cast<std::int64_t>(row[k].first) - base);
      s.values.push_back(row[k].second);
    }
    bases[r] = base < 0 ? 0 : base;
    ids[r] = pool.intern(std::move(s));
  }
  return ExactOperator(rows.size(), cols, pool.take(), std::move(ids), std::move(bases));
}

std::size_t ExactOperator::fst_col(std::size_t row) const {
  if (stencil(row).offsets.empty()) return kNoColumn;
  return static_cast<std::size_t>(row_base_[row] + stencil(row).offsets.front());
}

std::size_t ExactOperator::lst_col(std::size_t row) const {
  if (stencil(row).offsets.empty()) return kNoColumn;
  return static_cast<std::size_t>(row_base_[row] + stencil(row).offsets.back());
}

Rational ExactOperator::entry(std::size_t row, std::size_t col) const {
  const auto& s = stencil(row);
  std::int64_t off = static_cast<std::int64_t>(col) - row_base_[row];
  auto it = std::lower_bound(s.offsets.begin(), s.offsets.end(), off);
  if (it == s.offsets.end() || *it != off) return Rational(0);
  return s.values[static_cast<std::size_t>(it - s.offsets.begin())];
}

SparseRow ExactOperator::row(std::size_t r) const {
  const auto& s = stencil(r);
  SparseRow out;
  out.reserve(s.offsets.size());
  for (std::size_t k = 0; k < s.offsets.size(); ++k) {
    out.emplace_back(static_cast<std::size_t>(row_base_[r] + s.offsets[k]), s.values[k]);
  }
  return out;
}

std::vector<SparseRow> ExactOperator::to_rows() const {
  std::vector<SparseRow> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = row(r);
  return out;
}

void ExactOperator::scale(const Rational& factor) {
  if (sgn(factor) == 0) throw std::invalid_argument("scaling by zero");
  for (auto& s : pool_) {
    for (auto& v : s.values) v *= factor;
  }
}

bool operator==(const ExactOperator& a, const ExactOperator& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t r = 0; r < a.rows_; ++r) {
    const auto& sa = a.stencil(r);
    const auto& sb = b.stencil(r);
    if (sa.offsets.size() != sb.offsets.size()) return false;
    std::int64_t shift = b.row_base_[r] - a.row_base_[r];
    for (std::size_t k = 0; k < sa.offsets.size(); ++k) {
      if (sa.offsets[k] != sb.offsets[k] + shift || sa.values[k] != sb.values[k]) return false;
    }
  }
  return true;
}

ExactOperator transpose(const ExactOperator& a) {
  std::vector<SparseRow> rows(a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto& s = a.stencil(r);
    for (std::size_t k = 0; k < s.offsets.size(); ++k) {
      rows[static_cast<std::size_t>(a.base(r) + s.offsets[k])].emplace_back(r, s.values[k]);
    }
  }
  return ExactOperator::from_rows(a.rows(), rows);
}

ExactOperator multiply(const ExactOperator& a, const ExactOperator& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
  std::vector<SparseRow> rows(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::map<std::size_t, Rational> acc;
    const auto& sa = a.stencil(r);
    for (std::size_t k = 0; k < sa.offsets.size(); ++k) {
      std::size_t mid = static_cast<std::size_t>(a.base(r) + sa.offsets[k]);
      const auto& sb = b.stencil(mid);
      for (std::size_t q = 0; q < sb.offsets.size(); ++q) {
        acc[static_cast<std::size_t>(b.base(mid) + sb.offsets[q])] += sa.values[k] * sb.values[q];
      }
    }
    for (auto& [c, v] : acc) rows[r].emplace_back(c, v);
  }
  return ExactOperator::from_rows(b.cols(), rows);
}

ExactOperator add(const ExactOperator& a, const ExactOperator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("add: shape mismatch");
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::int64_t>, std::uint32_t> seen;
  std::vector<ExactStencil> pool;
  std::vector<std::uint32_t> ids(a.rows());
  std::vector<std::int64_t> bases(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::int64_t shift = b.base(r) - a.base(r);
    auto key = std::make_tuple(a.stencil_id(r), b.stencil_id(r), shift);
    auto it = seen.find(key);
    if (it == seen.end()) {
      std::map<std::int64_t, Rational> merged;
      const auto& sa = a.stencil(r);
      const auto& sb = b.stencil(r);
      for (std::size_t k = 0; k < sa.offsets.size(); ++k) merged[sa.offsets[k]] += sa.values[k];
      for (std::size_t k = 0; k < sb.offsets.size(); ++k) merged[sb.offsets[k] + shift] += sb.values[k];
      ExactStencil s;
      for (auto& [o, v] : merged) {
        if (sgn(v) == 0) continue;
        s.offsets.push_back(o);
        s.values.push_back(v);
      }
      it = seen.emplace(key, static_cast<std::uint32_t>(pool.size())).first;
      pool.push_back(std::move(s));
    }
    ids[r] = it->second;
    bases[r] = a.base(r);
  }
  return ExactOperator(a.rows(), a.cols(), std::move(pool), std::move(ids), std::move(bases));
}

ExactOperator kron(const ExactOperator& a, const ExactOperator& b) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  const auto cb = static_cast<std::int64_t>(b.cols());
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> seen;
  std::vector<ExactStencil> pool;
  std::vector<std::uint32_t> ids(rows);
  std::vector<std::int64_t> bases(rows);
  for (std::size_t ia = 0; ia < a.rows(); ++ia) {
    for (std::size_t ib = 0; ib < b.rows(); ++ib) {
      std::size_t r = ia * b.rows() + ib;
      auto key = std::make_pair(a.stencil_id(ia), b.stencil_id(ib));
      auto it = seen.find(key);
      if (it == seen.end()) {
        const auto& sa = a.stencil(ia);
        const auto& sb = b.stencil(ib);
        std::vector<std::pair<std::int64_t, Rational>> entries;
        for (std::size_t k = 0; k < sa.offsets.size(); ++k) {
          for (std::size_t q = 0; q < sb.offsets.size(); ++q) {
            entries.emplace_back(sa.offsets[k] * cb + sb.offsets[q], sa.values[k] * sb.values[q]);
          }
        }
        std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        ExactStencil s;
        for (auto& [o, v] : entries) {
          s.offsets.push_back(o);
          s.values.push_back(v);
        }
        it = seen.emplace(key, static_cast<std::uint32_t>(pool.size())).first;
        pool.push_back(std::move(s));
      }
      ids[r] = it->second;
      bases[r] = a.base(ia) * cb + b.base(ib);
    }
  }
  return ExactOperator(rows, cols, std::move(pool), std::move(ids), std::move(bases));
}

namespace {

template <class Fst, class Lst>
std::size_t delta_scan(std::size_t rows, Fst fst, Lst lst) {
  std::size_t best = 0;
  std::size_t suffix_min = static_cast<std::size_t>(-1);
  for (std::size_t r = rows; r-- > 0;) {
    std::size_t lo = fst(r);
    if (lo == kNoColumn) continue;
    suffix_min = std::min(suffix_min, lo);
    best = std::max(best, lst(r) - suffix_min + 1);
  }
  return best;
}

}  // namespace

std::size_t delta(const ExactOperator& m) {
  return delta_scan(
      m.rows(), [&](std::size_t r) { return m.fst_col(r); }, [&](std::size_t r) { return m.lst_col(r); });
}

std::size_t delta(const StencilOperator& m) {
  return delta_scan(
      m.rows(), [&](std::size_t r) { return m.fst_col(r); }, [&](std::size_t r) { return m.lst_col(r); });
}

std::size_t delta_brute_force(const ExactOperator& m) {
  const std::size_t n = m.rows();
  std::vector<std::size_t> fst(n), lst(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t lo = static_cast<std::size_t>(-1), hi = 0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (sgn(m.entry(r, c)) == 0) continue;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    fst[r] = lo;
    lst[r] = hi;
  }
  std::size_t best = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (fst[r] == kNoColumn) continue;
    std::size_t lo = static_cast<std::size_t>(-1);
    for (std::size_t s = r; s < n; ++s) lo = std::min(lo, fst[s]);
    best = std::max(best, lst[r] - lo + 1);
  }
  return best;
}

std::size_t delta_of_product(const ExactOperator& a, const ExactOperator& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("delta_of_product: shape mismatch");
  auto span_of = [&](std::size_t r) {
    const auto& s = a.stencil(r);
    std::size_t lo = static_cast<std::size_t>(-1), hi = 0;
    for (auto o : s.offsets) {
      auto k = static_cast<std::size_t>(a.base(r) + o);
      if (b.fst_col(k) == kNoColumn) continue;
      lo = std::min(lo, b.fst_col(k));
      hi = std::max(hi, b.lst_col(k));
    }
    return std::make_pair(lo, hi);
  };
  return delta_scan(
      a.rows(), [&](std::size_t r) { return span_of(r).first; }, [&](std::size_t r) { return span_of(r).second; });
}

double delta_estimate(int stencil_width, double n, int dim) {
  return (stencil_width - 1) * std::pow(n, static_cast<double>(dim - 1) / dim);
}

}  // namespace cmg::fem
