#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cmg/softfloat.hpp"

namespace cmg::bfp {

using softfloat::SoftScalar;

// A run of consecutive entries sharing one exponent. Entry i of the block
// holds mantissa M with value M * 2^(exponent - width + 2), |M| < 2^(width-1).
struct Block {
  std::size_t start = 0;
  std::int64_t exponent = 0;
  bool flushed = false;  // entries are zero and the exponent is not stored

  friend bool operator==(const Block&, const Block&) = default;
};

// Sign-magnitude mantissas, width bits each, packed little-endian: bit k of
// the stream lives in bit (k % 64) of word k / 64. The top bit of an entry is
// its sign, the remaining width-1 bits its magnitude.
class PackedMantissas {
 public:
  PackedMantissas() = default;
  explicit PackedMantissas(int width) : width_(width) {}

  int width() const { return width_; }
  std::size_t size() const { return size_; }
  void reserve(std::size_t n);
  // limbs holds the magnitude, least significant limb first.
  void push(bool negative, std::span<const std::uint64_t> limbs);
  void clear_entry(std::size_t i);
  bool negative(std::size_t i) const;
  // Writes ceil((width-1)/64) limbs.
  void magnitude(std::size_t i, std::uint64_t* limbs) const;
  const std::vector<std::uint64_t>& words() const { return words_; }
  void assign_words(std::vector<std::uint64_t> words, std::size_t size);

 private:
  void write_bits(std::size_t pos, int nbits, std::uint64_t value);
  std::uint64_t read_bits(std::size_t pos, int nbits) const;

  int width_ = 0;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

class BfpVector {
 public:
  BfpVector() = default;
  static BfpVector zeros(std::size_t n, int width);

  std::size_t size() const { return size_; }
  int width() const { return width_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t stored_exponents() const;

  SoftScalar get(std::size_t i) const;
  void get_into(SoftScalar& out, std::size_t i) const;
  std::vector<SoftScalar> decode() const;

  // Mantissas plus one 64-bit exponent and one 64-bit size record per block;
  // a flushed block keeps only its size record.
  std::uint64_t total_bits() const;
  std::uint64_t mantissa_bits() const { return static_cast<std::uint64_t>(size_) * width_; }

  const PackedMantissas& mantissas() const { return mantissas_; }

  friend bool operator==(const BfpVector& a, const BfpVector& b);

 private:
  friend class StreamEncoder;
  friend BfpVector read_binary(std::istream& in);
  friend BfpVector widen(const BfpVector& v, int new_width);

  std::size_t block_of(std::size_t i) const;

  std::size_t size_ = 0;
  int width_ = 0;
  std::vector<Block> blocks_;
  PackedMantissas mantissas_;
};

// Single-pass encoder. A new block opens whenever an entry, rounded to the
// width, has an exponent above every earlier one; earlier entries are never
// rescaled. finish() zeroes the blocks whose exponent is at most
// max_exponent - width and merges them into one flushed prefix block.
class StreamEncoder {
 public:
  explicit StreamEncoder(int width, std::size_t expected = 0);

  int width() const { return out_.width_; }
  std::size_t size() const { return out_.size_; }
  void push(const SoftScalar& x);
  // Entries as stored so far; finish() may still flush some of them to zero.
  SoftScalar get(std::size_t i) const { return out_.get(i); }
  void get_into(SoftScalar& out, std::size_t i) const { out_.get_into(out, i); }
  BfpVector finish();

 private:
  BfpVector out_;
  bool have_exponent_ = false;
  SoftScalar rounded_;
  SoftScalar scaled_;
  mpz_class integer_;
};

BfpVector encode(std::span<const SoftScalar> values, int width);

// Same values at a larger width: blocks are kept and mantissas shifted, so
// the conversion is exact.
BfpVector widen(const BfpVector& v, int new_width);

void write_binary(std::ostream& out, const BfpVector& v);
BfpVector read_binary(std::istream& in);

}  // namespace cmg::bfp
