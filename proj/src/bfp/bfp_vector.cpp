#include <algorithm>
#include <stdexcept>

#include "cmg/bfp.hpp"

namespace cmg::bfp {

namespace {

int limb_count(int width) { return (width - 1 + 63) / 64; }

}  // namespace

void PackedMantissas::reserve(std::size_t n) {
  words_.reserve((n * static_cast<std::size_t>(width_) + 63) / 64);
}

void PackedMantissas::write_bits(std::size_t pos, int nbits, std::uint64_t value) {
  std::size_t word = pos / 64;
  int off = static_cast<int>(pos % 64);
  std::size_t need = (pos + static_cast<std::size_t>(nbits) + 63) / 64;
  if (words_.size() < need) words_.resize(need, 0);
  std::uint64_t mask = nbits == 64 ? ~0ULL : ((1ULL << nbits) - 1);
  value &= mask;
  words_[word] = (words_[word] & ~(mask << off)) | (value << off);
  if (off + nbits > 64) {
    int spill = off + nbits - 64;
    std::uint64_t hi_mask = (1ULL << spill) - 1;
    words_[word + 1] = (words_[word + 1] & ~hi_mask) | (value >> (64 - off));
  }
}

std::uint64_t PackedMantissas::read_bits(std::size_t pos, int nbits) const {
  std::size_t word = pos / 64;
  int off = static_cast<int>(pos % 64);
  std::uint64_t v = words_[word] >> off;
  if (off + nbits > 64) v |= words_[word + 1] << (64 - off);
  if (nbits < 64) v &= (1ULL << nbits) - 1;
  return v;
}

void PackedMantissas::push(bool negative, std::span<const std::uint64_t> limbs) {
  std::size_t base = size_ * static_cast<std::size_t>(width_);
  int mag_bits = width_ - 1;
  for (int l = 0; l * 64 < mag_bits; ++l) {
    int nb = std::min(64, mag_bits - l * 64);
    std::uint64_t v = static_cast<std::size_t>(l) < limbs.size() ? limbs[static_cast<std::size_t>(l)] : 0;
    write_bits(base + static_cast<std::size_t>(l) * 64, nb, v);
  }
  write_bits(base + static_cast<std::size_t>(mag_bits), 1, negative ? 1 : 0);
  ++size_;
}

void PackedMantissas::clear_entry(std::size_t i) {
  std::size_t base = i * static_cast<std::size_t>(width_);
  for (int done = 0; done < width_;) {
    int nb = std::min(64, width_ - done);
    write_bits(base + static_cast<std::size_t>(done), nb, 0);
    done += nb;
  }
}

bool PackedMantissas::negative(std::size_t i) const {
  return read_bits(i * static_cast<std::size_t>(width_) + static_cast<std::size_t>(width_ - 1), 1) != 0;
}

void PackedMantissas::magnitude(std::size_t i, std::uint64_t* limbs) const {
  std::size_t base = i * static_cast<std::size_t>(width_);
  int mag_bits = width_ - 1;
  for (int l = 0; l * 64 < mag_bits; ++l) {
    int nb = std::min(64, mag_bits - l * 64);
    limbs[l] = read_bits(base + static_cast<std::size_t>(l) * 64, nb);
  }
}

void PackedMantissas::assign_words(std::vector<std::uint64_t> words, std::size_t size) {
  words_ = std::move(words);
  size_ = size;
}

BfpVector BfpVector::zeros(std::size_t n, int width) {
  StreamEncoder enc(width, n);
  SoftScalar zero(width);
  for (std::size_t i = 0; i < n; ++i) enc.push(zero);
  return enc.finish();
}

std::size_t BfpVector::stored_exponents() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.flushed ? 0 : 1;
  return n;
}

std::size_t BfpVector::block_of(std::size_t i) const {
  auto it = std::upper_bound(blocks_.begin(), blocks_.end(), i,
                             [](std::size_t v, const Block& b) { return v < b.start; });
  return static_cast<std::size_t>(it - blocks_.begin()) - 1;
}

void BfpVector::get_into(SoftScalar& out, std::size_t i) const {
  if (i >= size_) throw std::out_of_range("bfp index " + std::to_string(i) + " >= " + std::to_string(size_));
  if (out.width() != width_) out.reset(width_);
  const Block& blk = blocks_[block_of(i)];
  if (blk.flushed) {
    mpfr_set_zero(out.raw_mut(), 1);
    return;
  }
  long scale = static_cast<long>(blk.exponent) - width_ + 2;
  bool neg = mantissas_.negative(i);
  if (width_ - 1 <= 64) {
    std::uint64_t m = 0;
    mantissas_.magnitude(i, &m);
    mpfr_set_uj_2exp(out.raw_mut(), m, scale, MPFR_RNDN);
  } else {
    std::uint64_t limbs[64];
    int nl = limb_count(width_);
    std::vector<std::uint64_t> heap;
    std::uint64_t* dst = limbs;
    if (nl > 64) {
      heap.resize(static_cast<std::size_t>(nl));
      dst = heap.data();
    }
    mantissas_.magnitude(i, dst);
    int used = nl;
    while (used > 0 && dst[used - 1] == 0) --used;
    mpz_t z;
    static_assert(sizeof(mp_limb_t) == sizeof(std::uint64_t));
    mpz_roinit_n(z, reinterpret_cast<const mp_limb_t*>(dst), used);
    mpfr_set_z_2exp(out.raw_mut(), z, scale, MPFR_RNDN);
  }
  if (neg) mpfr_neg(out.raw_mut(), out.raw(), MPFR_RNDN);
}

SoftScalar BfpVector::get(std::size_t i) const {
  SoftScalar out(width_ > 0 ? width_ : softfloat::kMinWidth);
  get_into(out, i);
  return out;
}

std::vector<SoftScalar> BfpVector::decode() const {
  std::vector<SoftScalar> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back(get(i));
  return out;
}

std::uint64_t BfpVector::total_bits() const {
  std::uint64_t bits = mantissa_bits();
  for (const auto& b : blocks_) bits += b.flushed ? 64 : 128;
  return bits;
}

bool operator==(const BfpVector& a, const BfpVector& b) {
  return a.size_ == b.size_ && a.width_ == b.width_ && a.blocks_ == b.blocks_ &&
         a.mantissas_.words() == b.mantissas_.words();
}

BfpVector encode(std::span<const SoftScalar> values, int width) {
  StreamEncoder enc(width, values.size());
  for (const auto& v : values) enc.push(v);
  return enc.finish();
}

BfpVector widen(const BfpVector& v, int new_width) {
  softfloat::check_width(new_width);
  if (new_width < v.width_) throw softfloat::PrecisionError("widen to a smaller width");
  BfpVector out;
  out.size_ = v.size_;
  out.width_ = new_width;
  out.blocks_ = v.blocks_;
  out.mantissas_ = PackedMantissas(new_width);
  out.mantissas_.reserve(v.size_);
  const int shift = new_width - v.width_;
  const int old_limbs = limb_count(v.width_);
  std::vector<std::uint64_t> src(static_cast<std::size_t>(old_limbs));
  std::vector<std::uint64_t> dst(static_cast<std::size_t>(limb_count(new_width)) + 1);
  for (std::size_t i = 0; i < v.size_; ++i) {
    v.mantissas_.magnitude(i, src.data());
    std::fill(dst.begin(), dst.end(), 0);
    const int word_shift = shift / 64;
    const int bit_shift = shift % 64;
    for (int l = 0; l < old_limbs; ++l) {
      auto d = static_cast<std::size_t>(l + word_shift);
      dst[d] |= src[static_cast<std::size_t>(l)] << bit_shift;
      if (bit_shift != 0 && d + 1 < dst.size()) dst[d + 1] |= src[static_cast<std::size_t>(l)] >> (64 - bit_shift);
    }
    out.mantissas_.push(v.mantissas_.negative(i), dst);
  }
  return out;
}

}  // namespace cmg::bfp
