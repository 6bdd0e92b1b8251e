#pragma once

// Small value-semantic wrapper over mpfr_t for quadrature and error norms.
// Every result uses the precision of the innermost active Precision guard.

#include <gmpxx.h>
#include <mpfr.h>

#include <utility>

#include "cmg/softfloat.hpp"

namespace cmg::fem::mp {

inline thread_local mpfr_prec_t current_prec = 256;

class Precision {
 public:
  explicit Precision(mpfr_prec_t prec) : saved_(current_prec) { current_prec = prec; }
  ~Precision() { current_prec = saved_; }
  Precision(const Precision&) = delete;
  Precision& operator=(const Precision&) = delete;

 private:
  mpfr_prec_t saved_;
};

class Real {
 public:
  Real() {
    mpfr_init2(v_, current_prec);
    mpfr_set_zero(v_, 1);
  }
  Real(long x) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, current_prec);
    mpfr_set_si(v_, x, MPFR_RNDN);
  }
  explicit Real(const mpq_class& q) {
    mpfr_init2(v_, current_prec);
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
  }
  explicit Real(const softfloat::SoftScalar& s) {
    mpfr_init2(v_, current_prec);
    mpfr_set(v_, s.raw(), MPFR_RNDN);
  }
  explicit Real(double d) {
    mpfr_init2(v_, current_prec);
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  softfloat::SoftScalar to_scalar(int width) const {
    softfloat::SoftScalar s(width);
    mpfr_set(s.raw_mut(), v_, MPFR_RNDN);
    return s;
  }

  Real& operator+=(const Real& o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator-=(const Real& o) {
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator*=(const Real& o) {
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }

  friend Real operator+(const Real& a, const Real& b) {
    Real r;
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator-(const Real& a, const Real& b) {
    Real r;
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator*(const Real& a, const Real& b) {
    Real r;
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator/(const Real& a, const Real& b) {
    Real r;
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator-(const Real& a) {
    Real r;
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real cos(const Real& a) {
    Real r;
    mpfr_cos(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real sin(const Real& a) {
    Real r;
    mpfr_sin(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend void sin_cos(Real& s, Real& c, const Real& a) { mpfr_sin_cos(s.v_, c.v_, a.v_, MPFR_RNDN); }
  friend Real sqrt(const Real& a) {
    Real r;
    mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real abs(const Real& a) {
    Real r;
    mpfr_abs(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real ldexp(const Real& a, long e) {
    Real r;
    mpfr_mul_2si(r.v_, a.v_, e, MPFR_RNDN);
    return r;
  }
  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }

  static Real pi() {
    Real r;
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }

 private:
  mpfr_t v_;
};

}  // namespace cmg::fem::mp
