#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvr/triangulation.hpp"

namespace tvr {

// One inequality sum(coeffs[i] * x_i) <= rhs2 / 2, integer coefficients in
// {-3..3}, rhs2 in {0, 1, 2}.
struct PolytopeRow {
  std::vector<int> coeffs;
  int rhs2 = 0;

  bool operator==(const PolytopeRow&) const = default;
};

// The admissibility polytope P_T in edge space, scaled to [0,1/2] per edge.
struct AdmissibilityPolytope {
  int dim = 0;
  std::vector<PolytopeRow> rows;  // deduplicated
};

AdmissibilityPolytope build_polytope(const Skeleton& skeleton);

// Number of integer points x with Ax <= k*b, by pruned backtracking over
// coordinates.
uint64_t count_lattice_points(const AdmissibilityPolytope& polytope, long k);

struct EhrhartSample {
  long k = 0;  // even dilation
  uint64_t count = 0;
};

std::vector<long> default_dilations(int dim);
std::vector<EhrhartSample> ehrhart_samples(const AdmissibilityPolytope& polytope,
                                           const std::vector<long>& dilations);

struct VolumeEstimate {
  double value = 0;
  double std_error = 0;
  enum class Method { monte_carlo, ehrhart_fit } method = Method::monte_carlo;
  std::string provenance;
  bool degenerate = false;  // Monte-Carlo estimate with zero hits
};

// Least-squares fit of count(k) against k^d, k^(d-1), k^(d-2) on even
// dilations; returns the leading coefficient (the volume).
VolumeEstimate ehrhart_volume_fit(const AdmissibilityPolytope& polytope,
                                  const std::vector<long>& dilations);
VolumeEstimate ehrhart_volume_fit(int dim,
                                  const std::vector<EhrhartSample>& samples);

// Rejection sampling over the bounding box [0,1/2]^dim; deterministic for a
// fixed seed.
VolumeEstimate mc_volume(const AdmissibilityPolytope& polytope,
                         uint64_t samples, uint64_t seed);

// The search-space complexity estimator vol(P_T) * (r-2)^dim.
double coloring_estimator(double volume, int r, int dim);

}  // namespace tvr
