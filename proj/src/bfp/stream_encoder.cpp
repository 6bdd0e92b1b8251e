#include <algorithm>

#include "cmg/bfp.hpp"

namespace cmg::bfp {

StreamEncoder::StreamEncoder(int width, std::size_t expected) : rounded_(width), scaled_(width) {
  softfloat::check_width(width);
  out_.width_ = width;
  out_.mantissas_ = PackedMantissas(width);
  out_.mantissas_.reserve(expected);
  out_.blocks_.push_back(Block{0, 0, false});
}

void StreamEncoder::push(const SoftScalar& x) {
  const int w = out_.width_;
  if (x.is_zero()) {
    out_.mantissas_.push(false, {});
    ++out_.size_;
    return;
  }
  round_into(rounded_, x, w);
  std::int64_t e = static_cast<std::int64_t>(mpfr_get_exp(rounded_.raw())) - 1;
  if (!have_exponent_) {
    out_.blocks_.back().exponent = e;
    have_exponent_ = true;
  } else if (e > out_.blocks_.back().exponent) {
    out_.blocks_.push_back(Block{out_.size_, e, false});
  }
  long scale = static_cast<long>(out_.blocks_.back().exponent) - w + 2;

  // Fixed-point rounding at the block scale: shift exactly, then round to an
  // integer with ties to even.
  int need = std::max(x.width(), w + 1);
  if (scaled_.width() != need) scaled_.reset(need);
  mpfr_mul_2si(scaled_.raw_mut(), x.raw(), -scale, MPFR_RNDN);
  mpfr_rint(scaled_.raw_mut(), scaled_.raw(), MPFR_RNDN);
  bool neg = mpfr_signbit(scaled_.raw()) != 0 && !mpfr_zero_p(scaled_.raw());
  if (w - 1 <= 64) {
    mpfr_abs(scaled_.raw_mut(), scaled_.raw(), MPFR_RNDN);
    std::uint64_t m = mpfr_get_uj(scaled_.raw(), MPFR_RNDN);
    out_.mantissas_.push(neg, std::span<const std::uint64_t>(&m, 1));
  } else {
    mpfr_get_z(integer_.get_mpz_t(), scaled_.raw(), MPFR_RNDN);
    mpz_srcptr z = integer_.get_mpz_t();
    std::size_t n = mpz_size(z);
    const mp_limb_t* limbs = mpz_limbs_read(z);
    out_.mantissas_.push(neg, std::span<const std::uint64_t>(reinterpret_cast<const std::uint64_t*>(limbs), n));
  }
  ++out_.size_;
}

BfpVector StreamEncoder::finish() {
  BfpVector v = std::move(out_);
  if (v.size_ == 0) {
    v.blocks_.clear();
    return v;
  }
  std::int64_t top = v.blocks_.back().exponent;
  std::size_t keep_from = 0;
  while (keep_from < v.blocks_.size() && v.blocks_[keep_from].exponent <= top - v.width_) ++keep_from;
  if (keep_from > 0) {
    std::size_t end = keep_from < v.blocks_.size() ? v.blocks_[keep_from].start : v.size_;
    for (std::size_t i = 0; i < end; ++i) v.mantissas_.clear_entry(i);
    std::vector<Block> blocks;
    blocks.push_back(Block{0, 0, true});
    blocks.insert(blocks.end(), v.blocks_.begin() + static_cast<std::ptrdiff_t>(keep_from), v.blocks_.end());
    v.blocks_ = std::move(blocks);
  }
  out_ = BfpVector();
  out_.width_ = v.width_;
  return v;
}

}  // namespace cmg::bfp
