#pragma once

#include <mpfr.h>

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "tvr/error.hpp"

namespace tvr {

// Arbitrary-precision binary float with explicit mantissa width. Binary
// operations produce the wider of the two operand widths.
class BigReal {
 public:
  explicit BigReal(mpfr_prec_t bits = 64) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  BigReal(double x, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  BigReal(long x, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_si(v_, x, MPFR_RNDN);
  }
  BigReal(const BigReal& o) {
    mpfr_init2(v_, o.bits());
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigReal(BigReal&& o) noexcept {
    mpfr_init2(v_, o.bits());
    mpfr_swap(v_, o.v_);
  }
  BigReal& operator=(const BigReal& o) {
    if (this != &o) {
      mpfr_set_prec(v_, o.bits());
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigReal& operator=(BigReal&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigReal() { mpfr_clear(v_); }

  mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  std::string to_string() const;  // normalized decimal, reproducible

  bool is_zero() const { return mpfr_zero_p(v_); }
  int sgn() const { return mpfr_sgn(v_); }

  BigReal& operator+=(const BigReal& o) { return apply2(mpfr_add, o); }
  BigReal& operator-=(const BigReal& o) { return apply2(mpfr_sub, o); }
  BigReal& operator*=(const BigReal& o) { return apply2(mpfr_mul, o); }
  BigReal& operator/=(const BigReal& o) { return apply2(mpfr_div, o); }

  friend BigReal operator+(BigReal a, const BigReal& b) { return a += b; }
  friend BigReal operator-(BigReal a, const BigReal& b) { return a -= b; }
  friend BigReal operator*(BigReal a, const BigReal& b) { return a *= b; }
  friend BigReal operator/(BigReal a, const BigReal& b) { return a /= b; }

  BigReal operator-() const {
    BigReal r(bits());
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }
  BigReal abs() const {
    BigReal r(bits());
    mpfr_abs(r.v_, v_, MPFR_RNDN);
    return r;
  }

  friend int cmp(const BigReal& a, const BigReal& b) {
    return mpfr_cmp(a.v_, b.v_);
  }
  friend bool operator<(const BigReal& a, const BigReal& b) {
    return cmp(a, b) < 0;
  }

  friend BigReal log(const BigReal& x) {
    BigReal r(x.bits());
    mpfr_log(r.v_, x.v_, MPFR_RNDN);
    return r;
  }

  static BigReal pi(mpfr_prec_t bits) {
    BigReal r(bits);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }
  friend BigReal sin(const BigReal& x) {
    BigReal r(x.bits());
    mpfr_sin(r.v_, x.v_, MPFR_RNDN);
    return r;
  }

  // Relative difference |a-b| / max(|a|,|b|); 0 when both are zero.
  static double relative_difference(const BigReal& a, const BigReal& b);

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

 private:
  using Op2 = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
  BigReal& apply2(Op2 op, const BigReal& o) {
    if (o.bits() > bits()) {
      BigReal tmp(o.bits());
      op(tmp.v_, v_, o.v_, MPFR_RNDN);
      *this = std::move(tmp);
    } else {
      op(v_, v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }

  mpfr_t v_;
};

// Quantum-algebra primitives at the root exp(2*pi*i/r) (the Chen-Yang
// evaluation): [n] = sin(2*pi*n/r) / sin(2*pi/r).
BigReal quantum_integer(int n, int r, mpfr_prec_t bits);

// Caches quantum integers, factorials and inverse factorials for a fixed
// order r (odd, >= 3) at a fixed width. Immutable after construction.
struct WeightSystem {
  WeightSystem(int r, mpfr_prec_t bits);

  int r;
  mpfr_prec_t bits;
  std::vector<BigReal> qint;       // [n], 0 <= n <= r-1
  std::vector<BigReal> qfact;      // [n]!, 0 <= n <= r-1
  std::vector<BigReal> qfact_inv;  // 1/[n]!
  std::vector<BigReal> edge_w;     // (-1)^a [a+1], doubled color a <= r-2
  BigReal eta2;                    // vertex weight (2/r) sin^2(2*pi/r)
};

BigReal edge_weight(int a, const WeightSystem& ws);
BigReal triangle_weight(int a, int b, int c, const WeightSystem& ws);
// Six doubled edge colors of a tetrahedron; (a,d), (b,e), (c,f) are opposite
// pairs and (a,b,c), (a,e,f), (d,b,f), (d,e,c) are the faces.
BigReal tet_weight(int a, int b, int c, int d, int e, int f,
                   const WeightSystem& ws);
// The Racah sum as a function of the four face half-sums t and the three
// quad half-sums q; symmetric in each group, so sorted arguments give a
// canonical rounding.
BigReal tet_weight_params(const std::array<int, 4>& t,
                          const std::array<int, 3>& q,
                          const WeightSystem& ws);
BigReal vertex_weight(const WeightSystem& ws);

bool admissible_triple(int a, int b, int c, int r);

struct PrecisionPolicy {
  mpfr_prec_t initial_bits = 128;
  double tau = 1e-6;    // relative agreement threshold
  double zeta = 1e-10;  // zero threshold, relative to the term-magnitude sum
  mpfr_prec_t max_bits = 1 << 16;
};

void validate(const PrecisionPolicy& policy);

// A value together with the magnitude scale against which "zero" is judged
// (for TV sums, the accumulated term-magnitude sum).
struct Evaluation {
  BigReal value;
  BigReal magnitude;
};

struct DoublingResult {
  BigReal value;
  mpfr_prec_t bits_used = 0;
  bool declared_zero = false;
  int escalations = 0;
};

// Evaluates `compute` at b and 2b bits. Accepts the 2b value when the
// relative difference is within tau; declares zero when both results are
// below zeta * magnitude and the residue collapses as the width doubles
// (the signature of exact cancellation); otherwise doubles the width and
// repeats.
DoublingResult with_precision_doubling(
    const std::function<Evaluation(mpfr_prec_t)>& compute,
    const PrecisionPolicy& policy, mpfr_prec_t starting_bits);

}  // namespace tvr
