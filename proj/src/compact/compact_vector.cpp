#include "cmg/compact.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace cmg::compact {

CompactVector::CompactVector(PrecisionSpec spec, std::vector<BfpVector> sections)
    : spec_(spec), sections_(std::move(sections)) {
  if (sections_.empty()) throw std::invalid_argument("compact vector needs at least one section");
  const int finest_level = finest();
  for (int l = 0; l <= finest_level; ++l) {
    int want = softfloat::width_of(spec_, l, finest_level);
    if (sections_[static_cast<std::size_t>(l)].width() != want) {
      throw softfloat::PrecisionError("section " + std::to_string(l) + " has width " +
                                      std::to_string(sections_[static_cast<std::size_t>(l)].width()) + ", expected " +
                                      std::to_string(want));
    }
  }
}

CompactVector CompactVector::zeros(PrecisionSpec spec, std::span<const std::size_t> lengths) {
  std::vector<BfpVector> sections;
  const int finest_level = static_cast<int>(lengths.size()) - 1;
  for (int l = 0; l <= finest_level; ++l) {
    sections.push_back(BfpVector::zeros(lengths[static_cast<std::size_t>(l)], softfloat::width_of(spec, l, finest_level)));
  }
  return CompactVector(spec, std::move(sections));
}

std::uint64_t CompactVector::mantissa_bits() const {
  std::uint64_t bits = 0;
  for (const auto& s : sections_) bits += s.mantissa_bits();
  return bits;
}

std::uint64_t CompactVector::total_bits() const {
  std::uint64_t bits = 0;
  for (const auto& s : sections_) bits += s.total_bits();
  return bits;
}

std::vector<SoftScalar> decode(const CompactVector& v, std::span<const StencilOperator> prolongations, int width) {
  const int finest_level = v.finest();
  if (static_cast<int>(prolongations.size()) <= finest_level && finest_level > 0) {
    throw std::invalid_argument("decode needs a prolongation per level");
  }
  std::vector<SoftScalar> cur;
  cur.reserve(v.section(0).size());
  for (std::size_t i = 0; i < v.section(0).size(); ++i) cur.push_back(round_to(v.section(0).get(i), width));
  SoftScalar s(width);
  softfloat::Accumulator acc(width);
  for (int l = 1; l <= finest_level; ++l) {
    const StencilOperator& p = prolongations[static_cast<std::size_t>(l)];
    const BfpVector& sec = v.section(l);
    if (p.rows() != sec.size() || p.cols() != cur.size()) throw std::invalid_argument("decode: shape mismatch");
    std::vector<SoftScalar> next;
    next.reserve(sec.size());
    for (std::size_t i = 0; i < sec.size(); ++i) {
      acc.clear();
      auto row = p.row(i);
      for (std::size_t k = 0; k < row.offsets.size(); ++k) {
        acc.add_product(row.values[k], cur[static_cast<std::size_t>(row.base + row.offsets[k])]);
      }
      sec.get_into(s, i);
      SoftScalar out(width);
      mpfr_add(out.raw_mut(), s.raw(), acc.value().raw(), MPFR_RNDN);
      next.push_back(std::move(out));
    }
    cur = std::move(next);
  }
  return cur;
}

namespace {

// out <- a + b without rounding.
void exact_add(SoftScalar& out, const SoftScalar& a, const SoftScalar& b) {
  if (a.is_zero() || b.is_zero()) {
    const SoftScalar& v = a.is_zero() ? b : a;
    out.reset(v.width());
    mpfr_set(out.raw_mut(), v.raw(), MPFR_RNDN);
    return;
  }
  const long hi = std::max(a.exponent(), b.exponent());
  const long lo = std::min(a.exponent() - (a.width() - 2), b.exponent() - (b.width() - 2));
  out.reset(static_cast<int>(hi - lo + 3));
  mpfr_add(out.raw_mut(), a.raw(), b.raw(), MPFR_RNDN);
}

}  // namespace

CompactVector axpy(const SoftScalar& alpha, const CompactVector& x, const CompactVector& y) {
  if (x.finest() != y.finest()) throw std::invalid_argument("axpy: level mismatch");
  std::vector<BfpVector> out;
  SoftScalar xi, yi, t;
  for (int l = 0; l <= y.finest(); ++l) {
    const BfpVector& xs = x.section(l);
    const BfpVector& ys = y.section(l);
    if (xs.size() != ys.size()) throw std::invalid_argument("axpy: section length mismatch");
    const int w = ys.width();
    bfp::StreamEncoder enc(w, ys.size());
    SoftScalar sum;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      xs.get_into(xi, i);
      ys.get_into(yi, i);
      softfloat::arith_into(t, softfloat::Op::mul, alpha, xi, alpha.width() + xi.width());
      exact_add(sum, yi, t);
      enc.push(sum);
    }
    out.push_back(enc.finish());
  }
  return CompactVector(y.spec(), std::move(out));
}

CompactVector push_level(const CompactVector& v, std::size_t new_length) {
  const int new_finest = v.finest() + 1;
  std::vector<BfpVector> sections;
  for (int l = 0; l < new_finest; ++l) {
    sections.push_back(bfp::widen(v.section(l), softfloat::width_of(v.spec(), l, new_finest)));
  }
  sections.push_back(BfpVector::zeros(new_length, softfloat::width_of(v.spec(), new_finest, new_finest)));
  return CompactVector(v.spec(), std::move(sections));
}

double storage_bound(int dim, int k, int b, double finest_length) {
  const double r = static_cast<double>(1 << dim);
  return (r / (r - 1) * b + r / ((r - 1) * (r - 1)) * k) * finest_length;
}

namespace {

void put_i64(std::ostream& out, std::int64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

std::int64_t get_i64(std::istream& in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    int c = in.get();
    if (c == EOF) throw std::runtime_error("truncated compact vector stream");
    v |= static_cast<std::uint64_t>(c & 0xff) << (8 * i);
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

void write_binary(std::ostream& out, const CompactVector& v) {
  out.write("CMV1", 4);
  put_i64(out, static_cast<std::int64_t>(v.spec().scheme));
  put_i64(out, v.spec().k);
  put_i64(out, v.spec().b);
  put_i64(out, static_cast<std::int64_t>(v.sections().size()));
  for (const auto& s : v.sections()) bfp::write_binary(out, s);
}

CompactVector read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || std::string(magic.data(), 4) != "CMV1") throw std::runtime_error("not a compact vector stream");
  PrecisionSpec spec;
  spec.scheme = static_cast<softfloat::Scheme>(get_i64(in));
  spec.k = static_cast<int>(get_i64(in));
  spec.b = static_cast<int>(get_i64(in));
  std::int64_t count = get_i64(in);
  if (count < 1 || count > 64) throw std::runtime_error("corrupt section count");
  std::vector<BfpVector> sections;
  for (std::int64_t i = 0; i < count; ++i) sections.push_back(bfp::read_binary(in));
  return CompactVector(spec, std::move(sections));
}

}  // namespace cmg::compact
