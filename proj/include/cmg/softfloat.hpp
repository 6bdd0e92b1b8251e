#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cmg::softfloat {

// Widths count every stored bit: one sign bit plus (width - 1) significand
// bits, the leading one included. Exponents are unbounded in practice.
constexpr int kMinWidth = 2;
constexpr int kMaxWidth = 1 << 20;

class PrecisionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void check_width(int width);

class SoftScalar {
 public:
  SoftScalar();
  explicit SoftScalar(int width);
  SoftScalar(const SoftScalar& other);
  SoftScalar(SoftScalar&& other) noexcept;
  SoftScalar& operator=(const SoftScalar& other);
  SoftScalar& operator=(SoftScalar&& other) noexcept;
  ~SoftScalar();

  static SoftScalar from_double(double v, int width);
  static SoftScalar from_int(std::int64_t v, int width);
  // value = significand * 2^exp2, rounded to width.
  static SoftScalar from_scaled(const mpz_class& significand, long exp2, int width);
  static SoftScalar from_rational(const mpq_class& q, int width);

  int width() const { return width_; }
  bool is_zero() const { return mpfr_zero_p(&v_) != 0; }
  bool is_negative() const { return mpfr_signbit(&v_) != 0 && !is_zero(); }
  int sign() const { return is_zero() ? 0 : (is_negative() ? -1 : 1); }

  // Exponent e of a nonzero value: 2^e <= |x| < 2^(e+1).
  long exponent() const;
  // |x| * 2^(width - 2 - exponent), an integer of exactly width-1 bits.
  mpz_class significand() const;

  double to_double() const { return mpfr_get_d(&v_, MPFR_RNDN); }
  mpq_class to_rational() const;

  // "<sign>0b<significand bits>e<exponent>", e.g. 1.5 at width 4 is "+0b110e0".
  std::string debug_string() const;
  static SoftScalar parse_debug(std::string_view text);

  // Mutable access for kernels that drive MPFR directly. Callers must leave
  // the value rounded to width().
  mpfr_srcptr raw() const { return &v_; }
  mpfr_ptr raw_mut() { return &v_; }
  // Changes the declared width without rounding; the value becomes 0.
  void reset(int width);

  friend bool operator==(const SoftScalar& a, const SoftScalar& b);
  friend bool operator<(const SoftScalar& a, const SoftScalar& b);

 private:
  __mpfr_struct v_;
  int width_ = 0;
  bool live_ = false;
};

enum class Op { add, sub, mul, div };

SoftScalar round_to(const SoftScalar& x, int width);
SoftScalar round_to(const mpq_class& x, int width);
// Exact operation on the operands followed by a single rounding to width.
SoftScalar arith(Op op, const SoftScalar& a, const SoftScalar& b, int width);
inline SoftScalar add(const SoftScalar& a, const SoftScalar& b, int w) { return arith(Op::add, a, b, w); }
inline SoftScalar sub(const SoftScalar& a, const SoftScalar& b, int w) { return arith(Op::sub, a, b, w); }
inline SoftScalar mul(const SoftScalar& a, const SoftScalar& b, int w) { return arith(Op::mul, a, b, w); }
inline SoftScalar div(const SoftScalar& a, const SoftScalar& b, int w) { return arith(Op::div, a, b, w); }

// In-place forms reuse the limb storage of out. out may alias a or b.
void round_into(SoftScalar& out, const SoftScalar& x, int width);
void arith_into(SoftScalar& out, Op op, const SoftScalar& a, const SoftScalar& b, int width);

// Left-to-right dot product: acc = rnd(acc + rnd(a*b)) at a fixed width.
class Accumulator {
 public:
  explicit Accumulator(int width);
  void reset(int width);
  void clear();
  void add_product(const SoftScalar& a, const SoftScalar& b);
  void add(const SoftScalar& a);
  void sub(const SoftScalar& a);
  const SoftScalar& value() const { return acc_; }
  int width() const { return acc_.width(); }

 private:
  SoftScalar acc_;
  SoftScalar prod_;
};

std::string to_string(const SoftScalar& x, int digits = 24);

}  // namespace cmg::softfloat
