#include "tvr/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace tvr {

AdmissibilityPolytope build_polytope(const Skeleton& sk) {
  AdmissibilityPolytope poly;
  poly.dim = sk.e;
  std::set<std::pair<std::vector<int>, int>> seen;
  auto add = [&](std::vector<int> coeffs, int rhs2) {
    if (!seen.insert({coeffs, rhs2}).second) return;
    // Lemma: (1/4,...,1/4) lies strictly inside every half-space.
    int lhs4 = std::accumulate(coeffs.begin(), coeffs.end(), 0);
    if (lhs4 >= 2 * rhs2)
      fail(ErrorCode::Internal, "interior point violates a polytope row");
    poly.rows.push_back({std::move(coeffs), rhs2});
  };
  for (int i = 0; i < sk.e; ++i) {
    std::vector<int> lo(sk.e, 0), hi(sk.e, 0);
    lo[i] = -1;
    hi[i] = 1;
    add(std::move(lo), 0);
    add(std::move(hi), 1);
  }
  for (const auto& tri : sk.triangles) {
    for (int i = 0; i < 3; ++i) {
      std::vector<int> row(sk.e, 0);
      for (int j = 0; j < 3; ++j) row[tri.edge[j]] += (j == i) ? 1 : -1;
      add(std::move(row), 0);
    }
    std::vector<int> sum(sk.e, 0);
    for (int side : tri.edge) sum[side] += 1;
    add(std::move(sum), 2);
  }
  return poly;
}

uint64_t count_lattice_points(const AdmissibilityPolytope& poly, long k) {
  if (k < 1) fail(ErrorCode::MalformedInput, "dilation must be >= 1");
  const int d = poly.dim;
  const long cap = k / 2;  // x_i <= k/2 from the box rows
  const int m = static_cast<int>(poly.rows.size());

  std::vector<long> rhs(m);
  for (int i = 0; i < m; ++i) {
    long num = k * poly.rows[i].rhs2;
    rhs[i] = (num >= 0) ? num / 2 : -((-num + 1) / 2);
  }
  // Most negative possible contribution of coordinates >= j, per row.
  std::vector<std::vector<long>> suffix_min(m, std::vector<long>(d + 1, 0));
  for (int i = 0; i < m; ++i)
    for (int j = d - 1; j >= 0; --j)
      suffix_min[i][j] = suffix_min[i][j + 1] +
                         std::min(0L, static_cast<long>(poly.rows[i].coeffs[j]) * cap);
  std::vector<std::vector<std::pair<int, int>>> touching(d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j)
      if (poly.rows[i].coeffs[j] != 0) touching[j].emplace_back(i, poly.rows[i].coeffs[j]);

  std::vector<long> partial(m, 0);
  uint64_t count = 0;
  std::vector<long> x(d, -1);

  // Depth-first over coordinates; prune when a row cannot recover.
  std::vector<long> next(d + 1, 0);
  int depth = 0;
  next[0] = 0;
  while (depth >= 0) {
    long c = next[depth];
    if (c > cap) {
      --depth;
      if (depth >= 0) {
        for (auto [i, co] : touching[depth]) partial[i] -= co * x[depth];
        x[depth] = -1;
      }
      continue;
    }
    next[depth] = c + 1;
    if (x[depth] >= 0)
      for (auto [i, co] : touching[depth]) partial[i] -= co * x[depth];
    x[depth] = c;
    bool ok = true;
    for (auto [i, co] : touching[depth]) {
      partial[i] += co * c;
      if (partial[i] + suffix_min[i][depth + 1] > rhs[i]) ok = false;
    }
    if (!ok) {
      for (auto [i, co] : touching[depth]) partial[i] -= co * c;
      x[depth] = -1;
      continue;
    }
    if (depth + 1 == d) {
      ++count;
      for (auto [i, co] : touching[depth]) partial[i] -= co * c;
      x[depth] = -1;
    } else {
      ++depth;
      next[depth] = 0;
    }
  }
  return count;
}

std::vector<long> default_dilations(int dim) {
  // Multiples of 12 clear the vertex denominators seen in practice (2, 3, 4),
  // so the counts behave polynomially and the leading coefficient is clean.
  long kmax = dim <= 4 ? 96 : dim <= 6 ? 60 : dim <= 8 ? 48 : 36;
  std::vector<long> ks;
  for (long k = 12; k <= kmax; k += 12) ks.push_back(k);
  return ks;
}

std::vector<EhrhartSample> ehrhart_samples(const AdmissibilityPolytope& poly,
                                           const std::vector<long>& dilations) {
  std::vector<EhrhartSample> out;
  for (long k : dilations) out.push_back({k, count_lattice_points(poly, k)});
  return out;
}

VolumeEstimate ehrhart_volume_fit(int dim,
                                  const std::vector<EhrhartSample>& samples) {
  if (samples.size() < 3)
    fail(ErrorCode::InsufficientSamples,
         "ehrhart fit needs at least 3 even dilations");
  for (const auto& s : samples)
    if (s.k < 2 || s.k % 2)
      fail(ErrorCode::InsufficientSamples, "dilations must be positive even");

  const int m = static_cast<int>(samples.size());
  // Monomials k^d, k^(d-1), k^(d-2) — truncated in low dimension, where a
  // zero column would make the normal equations singular.
  const int p = std::min(3, dim + 1);
  std::vector<std::array<double, 3>> X(m);
  std::vector<double> y(m);
  std::array<double, 3> col_norm{};
  for (int i = 0; i < m; ++i) {
    double kd = std::pow(static_cast<double>(samples[i].k), dim);
    X[i] = {kd, kd / samples[i].k, dim >= 2 ? kd / samples[i].k / samples[i].k : 0.0};
    y[i] = static_cast<double>(samples[i].count);
    for (int j = 0; j < p; ++j) col_norm[j] += X[i][j] * X[i][j];
  }
  for (int j = 0; j < p; ++j)
    col_norm[j] = col_norm[j] > 0 ? std::sqrt(col_norm[j]) : 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j) X[i][j] /= col_norm[j];

  // Normal equations with the inverse kept for the leading-term variance.
  double xtx[3][3] = {}, xty[3] = {};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j) {
      xty[j] += X[i][j] * y[i];
      for (int l = 0; l < p; ++l) xtx[j][l] += X[i][j] * X[i][l];
    }
  double aug[3][6] = {};
  for (int j = 0; j < p; ++j) {
    for (int l = 0; l < p; ++l) aug[j][l] = xtx[j][l];
    aug[j][3 + j] = 1.0;
  }
  for (int col = 0; col < p; ++col) {
    int piv = col;
    for (int rr = col + 1; rr < p; ++rr)
      if (std::fabs(aug[rr][col]) > std::fabs(aug[piv][col])) piv = rr;
    if (std::fabs(aug[piv][col]) < 1e-14)
      fail(ErrorCode::DegenerateFit, "singular normal equations");
    std::swap(aug[piv], aug[col]);
    for (int rr = 0; rr < p; ++rr) {
      if (rr == col) continue;
      double fct = aug[rr][col] / aug[col][col];
      for (int cc = 0; cc < 6; ++cc) aug[rr][cc] -= fct * aug[col][cc];
    }
  }
  // After Gauss-Jordan, row j holds pivot aug[j][j] and the inverse is
  // aug[j][3+l] / aug[j][j].
  double beta[3];
  for (int j = 0; j < p; ++j) {
    beta[j] = 0;
    for (int l = 0; l < p; ++l) beta[j] += aug[j][3 + l] / aug[j][j] * xty[l];
  }
  double inv00 = aug[0][3] / aug[0][0];
  double rss = 0;
  for (int i = 0; i < m; ++i) {
    double pred = 0;
    for (int j = 0; j < p; ++j) pred += X[i][j] * beta[j];
    rss += (pred - y[i]) * (pred - y[i]);
  }
  double sigma2 = m > p ? rss / (m - p) : 0.0;

  VolumeEstimate est;
  est.value = beta[0] / col_norm[0];
  est.std_error = std::sqrt(std::max(0.0, sigma2 * inv00)) / col_norm[0];
  est.method = VolumeEstimate::Method::ehrhart_fit;
  std::ostringstream prov;
  prov << "dilations";
  for (const auto& s : samples) prov << ' ' << s.k;
  est.provenance = prov.str();
  return est;
}

VolumeEstimate ehrhart_volume_fit(const AdmissibilityPolytope& poly,
                                  const std::vector<long>& dilations) {
  return ehrhart_volume_fit(poly.dim, ehrhart_samples(poly, dilations));
}

VolumeEstimate mc_volume(const AdmissibilityPolytope& poly, uint64_t samples,
                         uint64_t seed) {
  if (samples < 10000)
    fail(ErrorCode::InsufficientSamples, "at least 10^4 samples required");
  std::mt19937_64 rng(seed);
  const int d = poly.dim;
  std::vector<double> x(d);
  uint64_t hits = 0;
  for (uint64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < d; ++i)
      x[i] = static_cast<double>(rng() >> 11) * 0x1p-54;  // uniform [0, 1/2)
    bool inside = true;
    for (const auto& row : poly.rows) {
      double lhs = 0;
      for (int i = 0; i < d; ++i)
        if (row.coeffs[i]) lhs += row.coeffs[i] * x[i];
      if (lhs > 0.5 * row.rhs2) {
        inside = false;
        break;
      }
    }
    if (inside) ++hits;
  }
  double box = std::pow(0.5, d);
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  VolumeEstimate est;
  est.value = p * box;
  est.std_error = box * std::sqrt(p * (1 - p) / static_cast<double>(samples));
  est.method = VolumeEstimate::Method::monte_carlo;
  est.provenance =
      "samples " + std::to_string(samples) + " seed " + std::to_string(seed);
  est.degenerate = (hits == 0);
  return est;
}

double coloring_estimator(double volume, int r, int dim) {
  return volume * std::pow(static_cast<double>(r - 2), dim);
}

}  // namespace tvr
