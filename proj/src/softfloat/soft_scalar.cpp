#include "cmg/softfloat.hpp"

#include <cstring>
#include <stdexcept>
#include <utility>

namespace cmg::softfloat {

namespace {

void widen_exponent_range() {
  thread_local bool done = [] {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
    return true;
  }();
  (void)done;
}

mpfr_prec_t prec_of(int width) { return static_cast<mpfr_prec_t>(width - 1); }

}  // namespace

void check_width(int width) {
  if (width < kMinWidth || width > kMaxWidth) {
    throw PrecisionError("width " + std::to_string(width) + " outside [" + std::to_string(kMinWidth) +
                         ", " + std::to_string(kMaxWidth) + "]");
  }
}

SoftScalar::SoftScalar() : SoftScalar(kMinWidth) {}

SoftScalar::SoftScalar(int width) : width_(width), live_(true) {
  check_width(width);
  widen_exponent_range();
  mpfr_init2(&v_, prec_of(width));
  mpfr_set_zero(&v_, 1);
}

SoftScalar::SoftScalar(const SoftScalar& other) : width_(other.width_), live_(true) {
  widen_exponent_range();
  mpfr_init2(&v_, prec_of(width_));
  mpfr_set(&v_, &other.v_, MPFR_RNDN);
}

SoftScalar::SoftScalar(SoftScalar&& other) noexcept : v_(other.v_), width_(other.width_), live_(other.live_) {
  other.live_ = false;
}

SoftScalar& SoftScalar::operator=(const SoftScalar& other) {
  if (this == &other) return *this;
  if (!live_) {
    widen_exponent_range();
    mpfr_init2(&v_, prec_of(other.width_));
    live_ = true;
  } else if (width_ != other.width_) {
    mpfr_set_prec(&v_, prec_of(other.width_));
  }
  width_ = other.width_;
  mpfr_set(&v_, &other.v_, MPFR_RNDN);
  return *this;
}

SoftScalar& SoftScalar::operator=(SoftScalar&& other) noexcept {
  std::swap(v_, other.v_);
  std::swap(width_, other.width_);
  std::swap(live_, other.live_);
  return *this;
}

SoftScalar::~SoftScalar() {
  if (live_) mpfr_clear(&v_);
}

void SoftScalar::reset(int width) {
  check_width(width);
  if (!live_) {
    widen_exponent_range();
    mpfr_init2(&v_, prec_of(width));
    live_ = true;
  } else if (width != width_) {
    mpfr_set_prec(&v_, prec_of(width));
  }
  width_ = width;
  mpfr_set_zero(&v_, 1);
}

SoftScalar SoftScalar::from_double(double v, int width) {
  SoftScalar r(width);
  mpfr_set_d(&r.v_, v, MPFR_RNDN);
  return r;
}

SoftScalar SoftScalar::from_int(std::int64_t v, int width) {
  SoftScalar r(width);
  mpfr_set_sj(&r.v_, v, MPFR_RNDN);
  return r;
}

SoftScalar SoftScalar::from_scaled(const mpz_class& significand, long exp2, int width) {
  SoftScalar r(width);
  mpfr_set_z_2exp(&r.v_, significand.get_mpz_t(), exp2, MPFR_RNDN);
  return r;
}

SoftScalar SoftScalar::from_rational(const mpq_class& q, int width) {
  SoftScalar r(width);
  mpfr_set_q(&r.v_, q.get_mpq_t(), MPFR_RNDN);
  return r;
}

long SoftScalar::exponent() const {
  if (is_zero()) throw std::domain_error("exponent of zero");
  return static_cast<long>(mpfr_get_exp(&v_)) - 1;
}

mpz_class SoftScalar::significand() const {
  mpz_class z;
  if (is_zero()) return z;
  mpfr_get_z_2exp(z.get_mpz_t(), &v_);
  return abs(z);
}

mpq_class SoftScalar::to_rational() const {
  mpq_class q;
  if (is_zero()) return q;
  mpz_class z;
  long e = mpfr_get_z_2exp(z.get_mpz_t(), &v_);
  q = z;
  if (e >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return q;
}

std::string SoftScalar::debug_string() const {
  if (is_zero()) return "+0b0e0";
  std::string out = is_negative() ? "-0b" : "+0b";
  std::string bits = significand().get_str(2);
  bits.resize(static_cast<std::size_t>(width_ - 1), '0');
  out += bits;
  out += 'e';
  out += std::to_string(exponent());
  return out;
}

SoftScalar SoftScalar::parse_debug(std::string_view text) {
  auto bad = [&] { return std::invalid_argument("malformed scalar: " + std::string(text)); };
  if (text.size() < 5 || (text[0] != '+' && text[0] != '-') || text.substr(1, 2) != "0b") throw bad();
  auto epos = text.find('e', 3);
  if (epos == std::string_view::npos) throw bad();
  std::string bits(text.substr(3, epos - 3));
  std::string expo(text.substr(epos + 1));
  if (bits.empty() || bits.find_first_not_of("01") != std::string::npos) throw bad();
  long e = 0;
  try {
    std::size_t used = 0;
    e = std::stol(expo, &used);
    if (used != expo.size()) throw bad();
  } catch (const std::logic_error&) {
    throw bad();
  }
  if (bits == "0") return SoftScalar(kMinWidth);
  int width = static_cast<int>(bits.size()) + 1;
  mpz_class sig(bits, 2);
  if (text[0] == '-') sig = -sig;
  return from_scaled(sig, e - static_cast<long>(bits.size() - 1), width);
}

bool operator==(const SoftScalar& a, const SoftScalar& b) { return mpfr_equal_p(&a.v_, &b.v_) != 0; }

bool operator<(const SoftScalar& a, const SoftScalar& b) { return mpfr_less_p(&a.v_, &b.v_) != 0; }

void round_into(SoftScalar& out, const SoftScalar& x, int width) {
  if (&out == &x) {
    check_width(width);
    if (width == out.width()) return;
    SoftScalar tmp(width);
    mpfr_set(tmp.raw_mut(), x.raw(), MPFR_RNDN);
    out = std::move(tmp);
    return;
  }
  out.reset(width);
  mpfr_set(out.raw_mut(), x.raw(), MPFR_RNDN);
}

SoftScalar round_to(const SoftScalar& x, int width) {
  SoftScalar r(width);
  mpfr_set(r.raw_mut(), x.raw(), MPFR_RNDN);
  return r;
}

SoftScalar round_to(const mpq_class& x, int width) { return SoftScalar::from_rational(x, width); }

namespace {

void apply(mpfr_ptr out, Op op, mpfr_srcptr a, mpfr_srcptr b) {
  switch (op) {
    case Op::add:
      mpfr_add(out, a, b, MPFR_RNDN);
      break;
    case Op::sub:
      mpfr_sub(out, a, b, MPFR_RNDN);
      break;
    case Op::mul:
      mpfr_mul(out, a, b, MPFR_RNDN);
      break;
    case Op::div:
      if (mpfr_zero_p(b)) throw std::domain_error("division by zero");
      mpfr_div(out, a, b, MPFR_RNDN);
      break;
  }
}

}  // namespace

void arith_into(SoftScalar& out, Op op, const SoftScalar& a, const SoftScalar& b, int width) {
  if (out.width() == width) {
    apply(out.raw_mut(), op, a.raw(), b.raw());
    return;
  }
  if (&out == &a || &out == &b) {
    SoftScalar tmp(width);
    apply(tmp.raw_mut(), op, a.raw(), b.raw());
    out = std::move(tmp);
    return;
  }
  out.reset(width);
  apply(out.raw_mut(), op, a.raw(), b.raw());
}

SoftScalar arith(Op op, const SoftScalar& a, const SoftScalar& b, int width) {
  SoftScalar r(width);
  apply(r.raw_mut(), op, a.raw(), b.raw());
  return r;
}

Accumulator::Accumulator(int width) : acc_(width), prod_(width) {}

void Accumulator::reset(int width) {
  acc_.reset(width);
  prod_.reset(width);
}

void Accumulator::clear() { mpfr_set_zero(acc_.raw_mut(), 1); }

void Accumulator::add_product(const SoftScalar& a, const SoftScalar& b) {
  // A zero product adds an exact zero; skipping it leaves the result unchanged.
  if (a.is_zero() || b.is_zero()) return;
  mpfr_mul(prod_.raw_mut(), a.raw(), b.raw(), MPFR_RNDN);
  mpfr_add(acc_.raw_mut(), acc_.raw(), prod_.raw(), MPFR_RNDN);
}

void Accumulator::add(const SoftScalar& a) {
  if (a.is_zero()) return;
  mpfr_add(acc_.raw_mut(), acc_.raw(), a.raw(), MPFR_RNDN);
}

void Accumulator::sub(const SoftScalar& a) {
  if (a.is_zero()) return;
  mpfr_sub(acc_.raw_mut(), acc_.raw(), a.raw(), MPFR_RNDN);
}

std::string to_string(const SoftScalar& x, int digits) {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, x.raw());
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

}  // namespace cmg::softfloat
