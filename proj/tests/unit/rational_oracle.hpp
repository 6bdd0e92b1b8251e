#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <random>

#include "cmg/softfloat.hpp"

namespace cmg::test_support {

namespace bmp = boost::multiprecision;
using softfloat::SoftScalar;

// Independent oracle: exact rationals from Boost.Multiprecision and a
// hand-written round to nearest, ties to even, with width - 1 significand bits.
struct Decoded {
  int sign = 0;
  bmp::cpp_int significand;  // width - 1 bits when nonzero
  long exponent = 0;
  friend bool operator==(const Decoded&, const Decoded&) = default;
};

inline bmp::cpp_rational pow2(long e) {
  bmp::cpp_int one = 1;
  if (e >= 0) return bmp::cpp_rational(one << e);
  return bmp::cpp_rational(bmp::cpp_int(1), one << -e);
}

inline Decoded oracle_round(const bmp::cpp_rational& q, int width) {
  Decoded d;
  if (q == 0) return d;
  d.sign = q < 0 ? -1 : 1;
  bmp::cpp_rational a = bmp::abs(q);
  const bmp::cpp_int& n = bmp::numerator(a);
  const bmp::cpp_int& m = bmp::denominator(a);
  long e = static_cast<long>(bmp::msb(n)) - static_cast<long>(bmp::msb(m));
  if (a < pow2(e)) --e;
  const int bits = width - 1;
  bmp::cpp_rational scaled = a * pow2(bits - 1 - e);
  bmp::cpp_int fl = bmp::numerator(scaled) / bmp::denominator(scaled);
  bmp::cpp_rational frac = scaled - bmp::cpp_rational(fl);
  bmp::cpp_rational half(1, 2);
  if (frac > half || (frac == half && bmp::bit_test(fl, 0))) ++fl;
  if (fl == (bmp::cpp_int(1) << bits)) {
    fl >>= 1;
    ++e;
  }
  d.significand = fl;
  d.exponent = e;
  return d;
}

inline Decoded decode(const SoftScalar& x) {
  Decoded d;
  d.sign = x.sign();
  if (d.sign == 0) return d;
  d.significand = bmp::cpp_int(x.significand().get_str());
  d.exponent = x.exponent();
  return d;
}

inline bmp::cpp_rational exact(const SoftScalar& x) {
  Decoded d = decode(x);
  if (d.sign == 0) return 0;
  bmp::cpp_rational v = bmp::cpp_rational(d.significand) * pow2(d.exponent - (x.width() - 2));
  return d.sign < 0 ? bmp::cpp_rational(-v) : v;
}

inline SoftScalar random_scalar(std::mt19937_64& rng, int width) {
  std::uniform_int_distribution<int> bits(1, width + 20);
  std::uniform_int_distribution<long> exp(-80, 80);
  mpz_class z;
  int nb = bits(rng);
  for (int i = 0; i < nb; ++i) z = 2 * z + static_cast<int>(rng() & 1);
  if (z == 0) z = 1;
  if (rng() & 1) z = -z;
  return SoftScalar::from_scaled(z, exp(rng), width);
}

}  // namespace cmg::test_support
