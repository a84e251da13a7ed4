#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tvr/arith.hpp"
#include "tvr/coloring.hpp"
#include "tvr/polytope.hpp"
#include "tvr/triangulation.hpp"

namespace tvr {

struct TVRecord {
  int r = 0;
  BigReal value;  // 0 when declared_zero
  std::string tv_str;
  double tv_double = 0;
  bool declared_zero = false;
  mpfr_prec_t bits_used = 0;
  uint64_t admissible_count = 0;
  uint64_t nodes_visited = 0;
  double wall_ms = 0;
};

struct TVSeries {
  std::vector<TVRecord> records;  // strictly increasing odd r
  std::string manifold_label;
  std::optional<double> target_limit;  // v3 * ||M||, user supplied
};

// The full Turaev-Viro state sum at odd order r. Enumeration is partitioned
// over first-edge colors; partial sums are reduced in ascending partition
// order, so results are identical for any thread count.
TVRecord tv_invariant(const GluingTable& table, int r,
                      const PrecisionPolicy& policy,
                      mpfr_prec_t starting_bits = 0, int threads = 1);

// Records for every odd r in [r_min, r_max]; the width that sufficed at one
// order seeds the next. Records already present in `existing` are reused
// untouched.
TVSeries tv_sequence(const GluingTable& table, int r_min, int r_max,
                     const PrecisionPolicy& policy, int threads = 1,
                     const std::vector<TVRecord>& existing = {});

// (2*pi/r) * log TV_r; absent for declared-zero records.
std::optional<double> log_quantity(const TVRecord& record);

// Convergence diagnostic: S_r = max over k >= r with TV_k != 0 of
// |log_quantity(k) - target|.
std::vector<std::pair<int, double>> s_r(const TVSeries& series);

struct FitResult {
  int model = 0;  // 1: a*log(x+b)/(x+b); 2: a/(x+b)+c
  double a = 0, b = 0, c = 0;
  double rss = 0;
  int points_used = 0;
};

using FitPoints = std::vector<std::pair<double, double>>;

FitResult fit_model1(const FitPoints& points);
FitResult fit_model2(const FitPoints& points);

struct OptimizeEntry {
  int step = 0;  // 0 is the input triangulation
  int size = 0;
  std::optional<double> volume;  // estimated when size matches the minimum
};

struct OptimizeReport {
  std::vector<OptimizeEntry> visited;
  int best_step = 0;
};

// Random walk over 2-3 / 3-2 moves (seeded, size-capped at 3x the input);
// returns the smallest triangulation seen with the smallest estimated
// polytope volume.
std::pair<GluingTable, OptimizeReport> optimize_triangulation(
    const GluingTable& table, int steps, uint64_t seed, uint64_t mc_samples);

struct EstimatorRow {
  int r = 0;
  uint64_t admissible = 0;
  double estimator = 0;
  double estimator_ratio = 0;  // max(est/#Adm, #Adm/est)
  uint64_t nodes_visited = 0;
  double nodes_ratio = 0;  // nodes visited / #Adm
};

struct EstimatorReport {
  double volume = 0;
  int dim = 0;
  std::vector<EstimatorRow> rows;
};

EstimatorReport estimator_report(const GluingTable& table,
                                 const std::vector<int>& r_list);

// JSON-lines persistence, one record per line.
std::string to_jsonl(const TVRecord& record);
TVRecord record_from_jsonl(const std::string& line);
std::vector<TVRecord> series_from_jsonl(const std::string& text);

// CSV export: columns r, tv, log_quantity, s_r.
std::string series_to_csv(const TVSeries& series);

}  // namespace tvr
