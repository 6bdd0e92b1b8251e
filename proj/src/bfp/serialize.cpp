#include <array>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "cmg/bfp.hpp"

namespace cmg::bfp {

namespace {

constexpr std::array<char, 4> kMagic{'B', 'F', 'P', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), 8);
  if (!in) throw std::runtime_error("truncated bfp stream");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

// Layout, all integers little-endian u64:
//   "BFP1" length width block_count
//   per block: start exponent(two's complement) flushed
//   mantissa words
void write_binary(std::ostream& out, const BfpVector& v) {
  out.write(kMagic.data(), 4);
  put_u64(out, v.size());
  put_u64(out, static_cast<std::uint64_t>(v.width()));
  put_u64(out, v.blocks().size());
  for (const auto& b : v.blocks()) {
    put_u64(out, b.start);
    put_u64(out, static_cast<std::uint64_t>(b.exponent));
    put_u64(out, b.flushed ? 1 : 0);
  }
  const auto& words = v.mantissas().words();
  std::uint64_t nwords = (static_cast<std::uint64_t>(v.size()) * static_cast<std::uint64_t>(v.width()) + 63) / 64;
  for (std::uint64_t i = 0; i < nwords; ++i) put_u64(out, i < words.size() ? words[i] : 0);
}

BfpVector read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || magic != kMagic) throw std::runtime_error("not a bfp stream");
  BfpVector v;
  v.size_ = get_u64(in);
  v.width_ = static_cast<int>(get_u64(in));
  softfloat::check_width(v.width_);
  std::uint64_t nblocks = get_u64(in);
  if (nblocks > v.size_ + 1) throw std::runtime_error("corrupt bfp block count");
  for (std::uint64_t i = 0; i < nblocks; ++i) {
    Block b;
    b.start = get_u64(in);
    b.exponent = static_cast<std::int64_t>(get_u64(in));
    b.flushed = get_u64(in) != 0;
    v.blocks_.push_back(b);
  }
  std::uint64_t nwords = (static_cast<std::uint64_t>(v.size_) * static_cast<std::uint64_t>(v.width_) + 63) / 64;
  std::vector<std::uint64_t> words(nwords);
  for (auto& w : words) w = get_u64(in);
  v.mantissas_ = PackedMantissas(v.width_);
  v.mantissas_.assign_words(std::move(words), v.size_);
  return v;
}

}  // namespace cmg::bfp
