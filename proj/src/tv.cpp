#include "tvr/tv.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"

namespace tvr {

namespace {

// Local edge indices of a tetrahedron in (a,b,c,d,e,f) order: (a,d), (b,e),
// (c,f) are opposite pairs and (a,b,c) is the face omitting vertex 3.
constexpr std::array<int, 6> kTet6jOrder = {0, 3, 1, 5, 2, 4};

// Memoizes triangle and tetrahedron weights for one weight system. Both are
// symmetric functions; keys and evaluations are canonicalized by sorting, so
// every cache holds bit-identical values no matter which colorings it saw
// first. That keeps results independent of partitioning and thread count.
class WeightCache {
 public:
  explicit WeightCache(const WeightSystem& ws)
      : ws_(ws), packable_(2 * (ws.r - 2) < 512) {}

  const WeightSystem& ws() const { return ws_; }

  const BigReal& triangle(int a, int b, int c) {
    std::array<int, 3> s = {a, b, c};
    std::sort(s.begin(), s.end());
    uint64_t key = (uint64_t(s[0]) << 32) | (uint64_t(s[1]) << 16) | s[2];
    auto it = tri_.find(key);
    if (it == tri_.end())
      it = tri_.emplace(key, triangle_weight(s[0], s[1], s[2], ws_)).first;
    return it->second;
  }

  const BigReal& tet(const std::array<int, 6>& x) {
    std::array<int, 4> t = {(x[0] + x[1] + x[2]) / 2, (x[0] + x[4] + x[5]) / 2,
                            (x[3] + x[1] + x[5]) / 2, (x[3] + x[4] + x[2]) / 2};
    std::array<int, 3> q = {(x[0] + x[3] + x[1] + x[4]) / 2,
                            (x[0] + x[3] + x[2] + x[5]) / 2,
                            (x[1] + x[4] + x[2] + x[5]) / 2};
    std::sort(t.begin(), t.end());
    std::sort(q.begin(), q.end());
    if (!packable_) {
      scratch_ = tet_weight_params(t, q, ws_);
      return scratch_;
    }
    uint64_t key = 0;
    for (int v : t) key = (key << 9) | v;
    for (int v : q) key = (key << 9) | v;
    auto it = tet_.find(key);
    if (it == tet_.end())
      it = tet_.emplace(key, tet_weight_params(t, q, ws_)).first;
    return it->second;
  }

 private:
  const WeightSystem& ws_;
  bool packable_;
  BigReal scratch_;
  std::unordered_map<uint64_t, BigReal> tri_, tet_;
};

struct TermShape {
  std::vector<std::array<int, 3>> triangles;       // edge classes per triangle
  std::vector<std::array<int, 6>> tets;            // edge classes, 6j order
};

TermShape term_shape(const Skeleton& sk) {
  TermShape shape;
  for (const auto& tri : sk.triangles) shape.triangles.push_back(tri.edge);
  for (int t = 0; t < sk.n; ++t) {
    std::array<int, 6> cls{};
    for (int i = 0; i < 6; ++i) cls[i] = sk.tet_edges[t][kTet6jOrder[i]];
    shape.tets.push_back(cls);
  }
  return shape;
}

// Sum over one first-edge-color subtree.
struct PartitionSum {
  BigReal sum;
  BigReal magnitude;
  EnumStats stats;
};

PartitionSum sum_partition(const AdmissibilityContext& ctx,
                           const TermShape& shape, WeightCache& cache,
                           int first_color) {
  const WeightSystem& ws = cache.ws();
  PartitionSum out{BigReal(0L, ws.bits), BigReal(0L, ws.bits), {}};
  std::array<int, 6> tet_colors{};
  out.stats = enumerate_subtree(ctx, first_color, [&](const std::vector<int>& col) {
    BigReal term(1L, ws.bits);
    for (int c : col) term *= ws.edge_w[c];
    for (const auto& tri : shape.triangles)
      term *= cache.triangle(col[tri[0]], col[tri[1]], col[tri[2]]);
    for (const auto& tet : shape.tets) {
      for (int i = 0; i < 6; ++i) tet_colors[i] = col[tet[i]];
      term *= cache.tet(tet_colors);
    }
    out.sum += term;
    out.magnitude += term.abs();
  });
  return out;
}

}  // namespace

TVRecord tv_invariant(const GluingTable& table, int r,
                      const PrecisionPolicy& policy,
                      mpfr_prec_t starting_bits, int threads) {
  auto t_start = std::chrono::steady_clock::now();
  if (r < 3 || r % 2 == 0)
    fail(ErrorCode::EvenOrderUnsupported, "TV_r requires odd r >= 3");
  Skeleton sk = compute_skeleton(table);
  HomologyInfo hom = homology_z2(sk);
  AdmissibilityContext ctx =
      make_context(sk, r, hom.integer_fast_path_allowed());
  TermShape shape = term_shape(sk);

  std::vector<int> first_colors;
  for (int c = 0; c <= r - 2; c += ctx.integer_only ? 2 : 1)
    first_colors.push_back(c);

  EnumStats last_stats;
  auto compute = [&](mpfr_prec_t bits) -> Evaluation {
    WeightSystem ws(r, bits);
    const int np = static_cast<int>(first_colors.size());
    std::vector<PartitionSum> parts;
    parts.reserve(np);
    int workers = std::max(1, std::min(threads, np));
    if (workers == 1) {
      WeightCache cache(ws);
      for (int c : first_colors)
        parts.push_back(sum_partition(ctx, shape, cache, c));
    } else {
      parts.resize(np, PartitionSum{BigReal(0L, bits), BigReal(0L, bits), {}});
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          WeightCache cache(ws);
          for (int i = w; i < np; i += workers)
            parts[i] = sum_partition(ctx, shape, cache, first_colors[i]);
        });
      }
      for (auto& th : pool) th.join();
    }
    // Fixed ascending reduction keeps exports byte-identical for any thread
    // count.
    Evaluation ev{BigReal(0L, bits), BigReal(0L, bits)};
    EnumStats stats;
    for (const auto& p : parts) {
      ev.value += p.sum;
      ev.magnitude += p.magnitude;
      stats += p.stats;
    }
    for (int i = 0; i < sk.v; ++i) {
      ev.value *= ws.eta2;
      ev.magnitude *= ws.eta2;
    }
    last_stats = stats;
    return ev;
  };

  DoublingResult res = with_precision_doubling(
      compute, policy, starting_bits > 0 ? starting_bits : policy.initial_bits);

  TVRecord rec;
  rec.r = r;
  rec.declared_zero = res.declared_zero;
  rec.bits_used = res.bits_used;
  rec.admissible_count = last_stats.admissible_count;
  rec.nodes_visited = last_stats.nodes_visited;
  if (res.declared_zero) {
    rec.value = BigReal(0L, res.value.bits());
  } else {
    if (res.value.sgn() < 0)
      fail(ErrorCode::ConventionViolation,
           "negative TV value above the zero threshold at r=" +
               std::to_string(r));
    rec.value = std::move(res.value);
  }
  rec.tv_str = rec.value.to_string();
  rec.tv_double = rec.value.to_double();
  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t_start)
                    .count();
  return rec;
}

TVSeries tv_sequence(const GluingTable& table, int r_min, int r_max,
                     const PrecisionPolicy& policy, int threads,
                     const std::vector<TVRecord>& existing) {
  if (r_min % 2 == 0 || r_max % 2 == 0)
    fail(ErrorCode::EvenOrderUnsupported, "sequence bounds must be odd");
  TVSeries series;
  mpfr_prec_t carry = 0;
  for (int r = r_min; r <= r_max; r += 2) {
    auto it = std::find_if(existing.begin(), existing.end(),
                           [r](const TVRecord& rec) { return rec.r == r; });
    if (it != existing.end()) {
      series.records.push_back(*it);
      carry = it->bits_used;
      continue;
    }
    TVRecord rec = tv_invariant(table, r, policy, carry, threads);
    carry = rec.bits_used;
    series.records.push_back(std::move(rec));
  }
  return series;
}

std::optional<double> log_quantity(const TVRecord& rec) {
  if (rec.declared_zero) return std::nullopt;
  if (rec.value.sgn() <= 0)
    fail(ErrorCode::ConventionViolation,
         "log of a non-positive TV value at r=" + std::to_string(rec.r));
  BigReal lq = log(rec.value) * BigReal(2L, rec.value.bits()) *
               BigReal::pi(rec.value.bits()) / BigReal(long{rec.r}, rec.value.bits());
  return lq.to_double();
}

std::vector<std::pair<int, double>> s_r(const TVSeries& series) {
  if (!series.target_limit)
    fail(ErrorCode::MissingTarget, "S_r needs a target limit");
  double target = *series.target_limit;
  std::vector<std::pair<int, double>> out;
  bool have = false;
  double running = 0;
  for (auto it = series.records.rbegin(); it != series.records.rend(); ++it) {
    if (auto lq = log_quantity(*it)) {
      double dev = std::fabs(*lq - target);
      running = have ? std::max(running, dev) : dev;
      have = true;
    }
    if (have) out.emplace_back(it->r, running);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

struct LinearFit {
  double a = 0, c = 0, rss = 0;
  bool ok = false;
};

LinearFit fit_linear_model1(const FitPoints& pts, double b) {
  double spp = 0, spy = 0;
  for (auto [x, y] : pts) {
    double phi = std::log(x + b) / (x + b);
    spp += phi * phi;
    spy += phi * y;
  }
  LinearFit f;
  if (spp < 1e-300) return f;
  f.a = spy / spp;
  for (auto [x, y] : pts) {
    double r = y - f.a * std::log(x + b) / (x + b);
    f.rss += r * r;
  }
  f.ok = true;
  return f;
}

LinearFit fit_linear_model2(const FitPoints& pts, double b) {
  double s11 = 0, s1c = 0, scc = static_cast<double>(pts.size());
  double s1y = 0, scy = 0;
  for (auto [x, y] : pts) {
    double phi = 1.0 / (x + b);
    s11 += phi * phi;
    s1c += phi;
    s1y += phi * y;
    scy += y;
  }
  double det = s11 * scc - s1c * s1c;
  LinearFit f;
  if (std::fabs(det) < 1e-300) return f;
  f.a = (s1y * scc - s1c * scy) / det;
  f.c = (s11 * scy - s1c * s1y) / det;
  for (auto [x, y] : pts) {
    double r = y - f.a / (x + b) - f.c;
    f.rss += r * r;
  }
  f.ok = true;
  return f;
}

FitResult fit_model(const FitPoints& pts, int model) {
  size_t need = model == 1 ? 4 : 5;
  if (pts.size() < need)
    fail(ErrorCode::InsufficientPoints,
         "model " + std::to_string(model) + " needs at least " +
             std::to_string(need) + " points");
  double minx = pts.front().first, maxx = pts.front().first;
  for (auto [x, y] : pts) {
    minx = std::min(minx, x);
    maxx = std::max(maxx, x);
  }
  auto solve = [&](double b) {
    return model == 1 ? fit_linear_model1(pts, b) : fit_linear_model2(pts, b);
  };
  // b is scanned through the shift u = b + min(x) on a geometric grid, then
  // refined by golden section.
  double u_lo = 1e-6 * std::max(1.0, std::fabs(maxx));
  double u_hi = 10.0 * maxx + minx;
  if (u_hi <= u_lo) u_hi = u_lo * 10;
  const int grid = 256;
  double best_rss = 0;
  int bi = -1;
  std::vector<double> us(grid);
  for (int i = 0; i < grid; ++i) {
    us[i] = u_lo * std::pow(u_hi / u_lo, i / double(grid - 1));
    LinearFit f = solve(us[i] - minx);
    if (f.ok && (bi < 0 || f.rss < best_rss)) {
      best_rss = f.rss;
      bi = i;
    }
  }
  if (bi < 0) fail(ErrorCode::DegenerateFit, "no feasible b on the grid");
  double best_u = us[bi];
  double lo = us[std::max(0, bi - 1)], hi = us[std::min(grid - 1, bi + 1)];
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = solve(x1 - minx).rss, f2 = solve(x2 - minx).rss;
  while ((hi - lo) > 1e-6 * (0.5 * (hi + lo))) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = solve(x1 - minx).rss;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = solve(x2 - minx).rss;
    }
  }
  double u_star = 0.5 * (lo + hi);
  if (solve(best_u - minx).rss < solve(u_star - minx).rss) u_star = best_u;
  LinearFit f = solve(u_star - minx);
  if (!f.ok) fail(ErrorCode::DegenerateFit, "singular linear solve");
  FitResult res;
  res.model = model;
  res.a = f.a;
  res.b = u_star - minx;
  res.c = model == 2 ? f.c : 0.0;
  res.rss = f.rss;
  res.points_used = static_cast<int>(pts.size());
  return res;
}

}  // namespace

FitResult fit_model1(const FitPoints& pts) { return fit_model(pts, 1); }
FitResult fit_model2(const FitPoints& pts) { return fit_model(pts, 2); }

namespace {

struct Move {
  bool expand = false;  // true: 2-3 on a triangle, false: 3-2 on an edge
  int index = 0;
};

std::vector<Move> applicable_moves(const GluingTable& table, int size_cap) {
  Skeleton sk = compute_skeleton(table);
  std::vector<Move> moves;
  if (table.n + 1 <= size_cap) {
    for (int c = 0; c < sk.f; ++c)
      if (sk.triangles[c].embedding[0].first != sk.triangles[c].embedding[1].first)
        moves.push_back({true, c});
  }
  for (int c = 0; c < sk.e; ++c) {
    if (sk.edge_embeddings[c].size() != 3) continue;
    try {
      pachner_32(table, c);
      moves.push_back({false, c});
    } catch (const Error& err) {
      if (err.code() != ErrorCode::MoveNotApplicable) throw;
    }
  }
  return moves;
}

}  // namespace

std::pair<GluingTable, OptimizeReport> optimize_triangulation(
    const GluingTable& table, int steps, uint64_t seed, uint64_t mc_samples) {
  std::mt19937_64 rng(seed);
  const int cap = 3 * table.n;
  GluingTable current = table;
  GluingTable best = table;
  OptimizeReport report;
  int min_size = table.n;
  double best_volume = 0;

  auto record = [&](int step) {
    OptimizeEntry entry{step, current.n, std::nullopt};
    if (current.n <= min_size) {
      min_size = current.n;
      Skeleton sk = compute_skeleton(current);
      VolumeEstimate vol =
          mc_volume(build_polytope(sk), mc_samples, seed + step + 1);
      entry.volume = vol.value;
      if (current.n < best.n ||
          (current.n == best.n && vol.value < best_volume) ||
          (step == 0)) {
        best = current;
        best_volume = vol.value;
        report.best_step = step;
      }
    }
    report.visited.push_back(entry);
  };
  record(0);
  for (int step = 1; step <= steps; ++step) {
    std::vector<Move> moves = applicable_moves(current, cap);
    if (moves.empty()) break;
    const Move& mv = moves[rng() % moves.size()];
    current = mv.expand ? pachner_23(current, mv.index)
                        : pachner_32(current, mv.index);
    record(step);
  }
  return {std::move(best), std::move(report)};
}

EstimatorReport estimator_report(const GluingTable& table,
                                 const std::vector<int>& r_list) {
  Skeleton sk = compute_skeleton(table);
  HomologyInfo hom = homology_z2(sk);
  AdmissibilityPolytope poly = build_polytope(sk);
  VolumeEstimate vol = ehrhart_volume_fit(poly, default_dilations(poly.dim));

  EstimatorReport report;
  report.volume = vol.value;
  report.dim = poly.dim;
  for (int r : r_list) {
    AdmissibilityContext ctx =
        make_context(sk, r, hom.integer_fast_path_allowed());
    EnumStats stats = enumerate_admissible(ctx, [](const std::vector<int>&) {});
    EstimatorRow row;
    row.r = r;
    row.admissible = stats.admissible_count;
    row.nodes_visited = stats.nodes_visited;
    row.estimator = coloring_estimator(vol.value, r, poly.dim);
    if (stats.admissible_count > 0) {
      double adm = static_cast<double>(stats.admissible_count);
      row.estimator_ratio = std::max(row.estimator / adm, adm / row.estimator);
      row.nodes_ratio = static_cast<double>(stats.nodes_visited) / adm;
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string to_jsonl(const TVRecord& rec) {
  nlohmann::json doc = {{"r", rec.r},          {"tv", rec.tv_str},
                        {"zero", rec.declared_zero},
                        {"bits", static_cast<long>(rec.bits_used)},
                        {"adm", rec.admissible_count},
                        {"nodes", rec.nodes_visited},
                        {"ms", rec.wall_ms}};
  return doc.dump();
}

TVRecord record_from_jsonl(const std::string& line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
    TVRecord rec;
    rec.r = doc.at("r").get<int>();
    rec.tv_str = doc.at("tv").get<std::string>();
    rec.declared_zero = doc.at("zero").get<bool>();
    rec.bits_used = doc.at("bits").get<long>();
    rec.admissible_count = doc.at("adm").get<uint64_t>();
    rec.nodes_visited = doc.at("nodes").get<uint64_t>();
    rec.wall_ms = doc.at("ms").get<double>();
    mpfr_prec_t bits = std::max<mpfr_prec_t>(64, 2 * rec.bits_used);
    rec.value = BigReal(bits);
    if (mpfr_set_str(rec.value.raw(), rec.tv_str.c_str(), 10, MPFR_RNDN) != 0)
      fail(ErrorCode::MalformedInput, "bad decimal value: " + rec.tv_str);
    rec.tv_double = rec.value.to_double();
    return rec;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::MalformedInput,
         std::string("bad series record: ") + ex.what());
  }
}

std::vector<TVRecord> series_from_jsonl(const std::string& text) {
  std::vector<TVRecord> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(record_from_jsonl(line));
  }
  return out;
}

std::string series_to_csv(const TVSeries& series) {
  std::vector<std::pair<int, double>> tails;
  if (series.target_limit) tails = s_r(series);
  auto tail_of = [&](int r) -> std::optional<double> {
    for (auto [rr, s] : tails)
      if (rr == r) return s;
    return std::nullopt;
  };
  std::ostringstream out;
  out << "r,tv,log_quantity,s_r\n";
  out.precision(17);
  for (const auto& rec : series.records) {
    out << rec.r << ',' << rec.tv_str << ',';
    if (auto lq = log_quantity(rec)) out << *lq;
    out << ',';
    if (auto s = tail_of(rec.r)) out << *s;
    out << '\n';
  }
  return out.str();
}

}  // namespace tvr
