#include "tvr/arith.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace tvr {

std::string BigReal::to_string() const {
  // Enough digits to make the printed form injective at this width.
  long digits = static_cast<long>(bits() * 0.30103) + 3;
  char* s = nullptr;
  mpfr_asprintf(&s, "%.*Re", static_cast<int>(digits), v_);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

double BigReal::relative_difference(const BigReal& a, const BigReal& b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  mpfr_prec_t p = std::max(a.bits(), b.bits());
  BigReal diff(p), scale(p);
  mpfr_sub(diff.v_, a.v_, b.v_, MPFR_RNDN);
  mpfr_abs(diff.v_, diff.v_, MPFR_RNDN);
  BigReal aa = a.abs(), ab = b.abs();
  mpfr_max(scale.v_, aa.v_, ab.v_, MPFR_RNDN);
  mpfr_div(diff.v_, diff.v_, scale.v_, MPFR_RNDN);
  return diff.to_double();
}

BigReal quantum_integer(int n, int r, mpfr_prec_t bits) {
  if (r < 3 || r % 2 == 0)
    fail(ErrorCode::EvenOrderUnsupported,
         "quantum integers require odd r >= 3");
  if (n < 0 || n > r) fail(ErrorCode::Internal, "quantum integer out of range");
  BigReal two_pi_over_r = BigReal::pi(bits) * BigReal(2L, bits) / BigReal(long{r}, bits);
  return sin(BigReal(long{n}, bits) * two_pi_over_r) / sin(two_pi_over_r);
}

WeightSystem::WeightSystem(int r_in, mpfr_prec_t bits_in)
    : r(r_in), bits(bits_in) {
  if (r < 3 || r % 2 == 0)
    fail(ErrorCode::EvenOrderUnsupported,
         "the q=2 weight system is defined for odd r >= 3 only");
  BigReal two_pi_over_r =
      BigReal::pi(bits) * BigReal(2L, bits) / BigReal(long{r}, bits);
  BigReal sin1 = sin(two_pi_over_r);

  qint.reserve(r);
  for (int n = 0; n < r; ++n)
    qint.push_back(sin(BigReal(long{n}, bits) * two_pi_over_r) / sin1);

  qfact.reserve(r);
  qfact_inv.reserve(r);
  qfact.emplace_back(1L, bits);
  for (int n = 1; n < r; ++n) qfact.push_back(qfact.back() * qint[n]);
  BigReal one(1L, bits);
  for (int n = 0; n < r; ++n) qfact_inv.push_back(one / qfact[n]);

  edge_w.reserve(r - 1);
  for (int a = 0; a <= r - 2; ++a)
    edge_w.push_back(a % 2 ? -qint[a + 1] : qint[a + 1]);

  eta2 = BigReal(2L, bits) / BigReal(long{r}, bits) * sin1 * sin1;
}

BigReal edge_weight(int a, const WeightSystem& ws) {
  if (a < 0 || a > ws.r - 2)
    fail(ErrorCode::Internal, "edge color out of range");
  return ws.edge_w[a];
}

bool admissible_triple(int a, int b, int c, int r) {
  return (a + b + c) % 2 == 0 && a <= b + c && b <= a + c && c <= a + b &&
         a + b + c <= 2 * (r - 2);
}

BigReal triangle_weight(int a, int b, int c, const WeightSystem& ws) {
  if (!admissible_triple(a, b, c, ws.r))
    fail(ErrorCode::InadmissibleTriple, "triangle colors are not admissible");
  int s = (a + b + c) / 2;
  BigReal w = ws.qfact[(a + b - c) / 2] * ws.qfact[(b + c - a) / 2] *
              ws.qfact[(c + a - b) / 2] * ws.qfact_inv[s + 1];
  return s % 2 ? -w : w;
}

BigReal tet_weight(int a, int b, int c, int d, int e, int f,
                   const WeightSystem& ws) {
  const std::array<std::array<int, 3>, 4> faces = {
      {{a, b, c}, {a, e, f}, {d, b, f}, {d, e, c}}};
  std::array<int, 4> t{};
  for (int i = 0; i < 4; ++i) {
    if (!admissible_triple(faces[i][0], faces[i][1], faces[i][2], ws.r))
      fail(ErrorCode::InadmissibleFace, "tetrahedron face is not admissible");
    t[i] = (faces[i][0] + faces[i][1] + faces[i][2]) / 2;
  }
  std::array<int, 3> q = {(a + d + b + e) / 2, (a + d + c + f) / 2,
                          (b + e + c + f) / 2};
  return tet_weight_params(t, q, ws);
}

BigReal tet_weight_params(const std::array<int, 4>& t,
                          const std::array<int, 3>& q,
                          const WeightSystem& ws) {
  int z_lo = *std::max_element(t.begin(), t.end());
  int z_hi = std::min(*std::min_element(q.begin(), q.end()), ws.r - 2);

  BigReal sum(0L, ws.bits);
  for (int z = z_lo; z <= z_hi; ++z) {
    BigReal term = ws.qfact[z + 1];
    for (int i = 0; i < 4; ++i) term *= ws.qfact_inv[z - t[i]];
    for (int j = 0; j < 3; ++j) term *= ws.qfact_inv[q[j] - z];
    if (z % 2)
      sum -= term;
    else
      sum += term;
  }
  return sum;
}

BigReal vertex_weight(const WeightSystem& ws) { return ws.eta2; }

void validate(const PrecisionPolicy& policy) {
  if (policy.tau <= 0 || policy.zeta <= 0)
    fail(ErrorCode::MalformedInput, "tau and zeta must be positive");
  if (policy.initial_bits < 32)
    fail(ErrorCode::MalformedInput, "initial precision below 32 bits");
  if (policy.max_bits < policy.initial_bits)
    fail(ErrorCode::MalformedInput, "max_bits below initial_bits");
}

DoublingResult with_precision_doubling(
    const std::function<Evaluation(mpfr_prec_t)>& compute,
    const PrecisionPolicy& policy, mpfr_prec_t starting_bits) {
  validate(policy);
  mpfr_prec_t b = std::max<mpfr_prec_t>(starting_bits, 32);
  int escalations = 0;
  for (;;) {
    if (2 * b > policy.max_bits)
      fail(ErrorCode::PrecisionCapExceeded,
           "needed more than " + std::to_string(policy.max_bits) + " bits");
    Evaluation lo = compute(b);
    Evaluation hi = compute(2 * b);
    // An exactly cancelling sum leaves pure rounding noise: both widths sit
    // below the zeta threshold and the residue collapses by a factor ~2^-b
    // when the width doubles. A genuinely tiny value does not collapse, so
    // it falls through to the agreement check instead of being misdeclared
    // zero.
    BigReal zeta_b(policy.zeta, 64);
    bool lo_zero = !(zeta_b * lo.magnitude < lo.value.abs());
    bool hi_zero = !(zeta_b * hi.magnitude < hi.value.abs());
    BigReal collapse = lo.value.abs();
    mpfr_mul_2si(collapse.raw(), collapse.raw(), -static_cast<long>(b / 2),
                 MPFR_RNDN);
    if (lo_zero && hi_zero && !(collapse < hi.value.abs()))
      return {std::move(hi.value), b, true, escalations};
    double rel = BigReal::relative_difference(lo.value, hi.value);
    if (rel <= policy.tau) return {std::move(hi.value), b, false, escalations};
    b *= 2;
    ++escalations;
  }
}

}  // namespace tvr
