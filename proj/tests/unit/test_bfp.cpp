#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "cmg/bfp.hpp"

using namespace cmg::bfp;
using cmg::softfloat::SoftScalar;

namespace {

std::vector<SoftScalar> random_stream(std::mt19937_64& rng, std::size_t n, int width, int spread) {
  std::vector<SoftScalar> v;
  std::uniform_int_distribution<long> exp(-spread, spread);
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class z;
    for (int b = 0; b < width + 10; ++b) z = 2 * z + static_cast<int>(rng() & 1);
    if (rng() % 7 == 0) z = 0;
    if (rng() & 1) z = -z;
    v.push_back(SoftScalar::from_scaled(z, exp(rng) - width, width + 10));
  }
  return v;
}

// Two-pass oracle: the largest exponent after rounding to width, then every
// entry rounded to the fixed-point grid of that exponent.
struct SingleExponent {
  long ulp_exp = 0;  // grid spacing 2^ulp_exp
  std::vector<mpq_class> values;
};

mpq_class pow2(long e) {
  mpz_class one = 1;
  if (e >= 0) return mpq_class(mpz_class(one << static_cast<unsigned long>(e)));
  return mpq_class(mpz_class(1), mpz_class(one << static_cast<unsigned long>(-e)));
}

mpq_class round_to_grid(const mpq_class& x, long ulp_exp) {
  mpq_class s = x / pow2(ulp_exp);
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
  mpq_class frac = s - fl;
  if (frac > mpq_class(1, 2) || (frac == mpq_class(1, 2) && mpz_odd_p(fl.get_mpz_t()))) ++fl;
  return mpq_class(fl) * pow2(ulp_exp);
}

SingleExponent single_exponent(const std::vector<SoftScalar>& v, int width) {
  SingleExponent o;
  bool any = false;
  long top = 0;
  for (const auto& x : v) {
    if (x.is_zero()) continue;
    long e = cmg::softfloat::round_to(x, width).exponent();
    top = any ? std::max(top, e) : e;
    any = true;
  }
  o.ulp_exp = top - width + 2;
  for (const auto& x : v) o.values.push_back(any ? round_to_grid(x.to_rational(), o.ulp_exp) : mpq_class(0));
  return o;
}

}  // namespace

TEST(Bfp, SharedExponentGivesOneBlock) {
  std::vector<SoftScalar> v;
  for (int i : {5, 6, -7, 4}) v.push_back(SoftScalar::from_int(i, 8));
  BfpVector b = encode(v, 8);
  EXPECT_EQ(b.blocks().size(), 1u);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(b.get(i), v[i]);
}

TEST(Bfp, GrowingExponentOpensBlock) {
  std::vector<SoftScalar> v{SoftScalar::from_int(1, 3), SoftScalar::from_int(2, 3)};
  BfpVector b = encode(v, 3);
  EXPECT_EQ(b.blocks().size(), 2u);
  EXPECT_EQ(b.get(0).to_rational(), 1);
  EXPECT_EQ(b.get(1).to_rational(), 2);
}

TEST(Bfp, ZeroAndRepresentableRoundTrip) {
  BfpVector z = encode(std::vector<SoftScalar>{SoftScalar(6)}, 6);
  EXPECT_TRUE(z.get(0).is_zero());
  SoftScalar x = SoftScalar::from_double(-0.15625, 6);
  EXPECT_EQ(encode(std::vector<SoftScalar>{x}, 6).get(0), x);
}

TEST(Bfp, FlushedBlockReadsZero) {
  const int w = 5;
  std::vector<SoftScalar> v{SoftScalar::from_int(3, w), SoftScalar::from_int(1, w),
                            SoftScalar::from_int(1 << (w + 1), w), SoftScalar::from_int(1, w)};
  BfpVector b = encode(v, w);
  EXPECT_TRUE(b.blocks().front().flushed);
  EXPECT_TRUE(b.get(0).is_zero());
  EXPECT_TRUE(b.get(1).is_zero());
  EXPECT_EQ(b.get(2), v[2]);
  EXPECT_EQ(b.stored_exponents(), 1u);
}

TEST(Bfp, StorageAccounting) {
  EXPECT_EQ(encode(std::vector<SoftScalar>{}, 7).total_bits(), 0u);
  std::vector<SoftScalar> v(10, SoftScalar::from_int(3, 7));
  BfpVector b = encode(v, 7);
  EXPECT_EQ(b.total_bits(), 10u * 7u + 128u);
  EXPECT_EQ(b.mantissa_bits(), 70u);
}

TEST(Bfp, RetainedExponentsBoundedByWidth) {
  // Every entry one binade above the last maximizes the number of blocks.
  for (int w : {2, 4, 9, 20}) {
    std::vector<SoftScalar> v;
    for (int i = 0; i < 200; ++i) v.push_back(SoftScalar::from_scaled(1, i, w));
    BfpVector b = encode(v, w);
    EXPECT_LE(b.stored_exponents(), static_cast<std::size_t>(w));
    EXPECT_LE(b.total_bits(), 200u * w + 128u * w + 64u);
  }
}

TEST(Bfp, AtLeastAsAccurateAsSingleExponentQuantization) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    int w = 2 + static_cast<int>(rng() % 70);
    auto v = random_stream(rng, 1 + rng() % 60, w, 1 + static_cast<int>(rng() % 12));
    BfpVector b = encode(v, w);
    SingleExponent o = single_exponent(v, w);
    const mpq_class half_ulp = pow2(o.ulp_exp - 1);
    const std::int64_t top = b.blocks().back().exponent;
    for (std::size_t i = 0; i < v.size(); ++i) {
      mpq_class got = b.get(i).to_rational();
      mpq_class x = v[i].to_rational();
      ASSERT_LE(abs(got - x), half_ulp) << "trial " << trial << " entry " << i;
      if (abs(got - x) > abs(o.values[i] - x)) FAIL() << "less accurate than single exponent at " << i;
      // Entries of the top block sit on the same grid as the oracle.
      const auto& blocks = b.blocks();
      std::size_t k = blocks.size() - 1;
      while (blocks[k].start > i) --k;
      if (!blocks[k].flushed && blocks[k].exponent == top) ASSERT_EQ(got, o.values[i]);
    }
  }
}

TEST(Bfp, BlocksCoverInOrder) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    int w = 2 + static_cast<int>(rng() % 30);
    auto v = random_stream(rng, 1 + rng() % 80, w, 40);
    BfpVector b = encode(v, w);
    ASSERT_FALSE(b.blocks().empty());
    EXPECT_EQ(b.blocks().front().start, 0u);
    std::set<std::int64_t> exps;
    for (std::size_t k = 1; k < b.blocks().size(); ++k) {
      EXPECT_LT(b.blocks()[k - 1].start, b.blocks()[k].start);
      if (!b.blocks()[k - 1].flushed) EXPECT_LT(b.blocks()[k - 1].exponent, b.blocks()[k].exponent);
    }
    for (const auto& blk : b.blocks()) {
      if (blk.flushed) continue;
      exps.insert(blk.exponent);
      EXPECT_GT(blk.exponent, b.blocks().back().exponent - w);
    }
    EXPECT_LE(exps.size(), static_cast<std::size_t>(w));
  }
}

TEST(Bfp, StreamingIsDeterministic) {
  std::mt19937_64 rng(8);
  auto v = random_stream(rng, 500, 13, 20);
  EXPECT_EQ(encode(v, 13), encode(v, 13));
}

TEST(Bfp, EncoderReadsBackBeforeFinish) {
  std::mt19937_64 rng(10);
  auto v = random_stream(rng, 50, 11, 3);
  StreamEncoder enc(11);
  for (const auto& x : v) enc.push(x);
  std::vector<SoftScalar> early;
  for (std::size_t i = 0; i < v.size(); ++i) early.push_back(enc.get(i));
  BfpVector b = enc.finish();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!b.get(i).is_zero()) EXPECT_EQ(b.get(i), early[i]);
  }
}

TEST(Bfp, WidenIsExact) {
  std::mt19937_64 rng(12);
  for (int w : {3, 30, 63, 64, 65, 100, 130}) {
    auto v = random_stream(rng, 40, w, 10);
    BfpVector b = encode(v, w);
    for (int extra : {0, 1, 7, 64, 65, 200}) {
      BfpVector wide = widen(b, w + extra);
      ASSERT_EQ(wide.width(), w + extra);
      for (std::size_t i = 0; i < v.size(); ++i) ASSERT_EQ(wide.get(i).to_rational(), b.get(i).to_rational());
    }
  }
  EXPECT_THROW(widen(BfpVector::zeros(2, 8), 7), cmg::softfloat::PrecisionError);
}

TEST(Bfp, BinaryRoundTrip) {
  std::mt19937_64 rng(14);
  for (int w : {2, 17, 64, 90}) {
    BfpVector b = encode(random_stream(rng, 33, w, 90), w);
    std::stringstream s;
    write_binary(s, b);
    EXPECT_EQ(read_binary(s), b);
  }
  std::stringstream bad("XXXX");
  EXPECT_THROW(read_binary(bad), std::runtime_error);
}
