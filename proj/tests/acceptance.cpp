// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tvr/tv.hpp"

using namespace tvr;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

GluingTable load(const std::string& name) {
  std::ifstream in(std::string(TVR_DATA_DIR) + "/" + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_triangulation(buf.str());
}

const std::vector<std::string> kSmall = {
    "s3_1tet.json",    "s3_2tet.json",   "s2xs1_2tet.json",
    "rp3_2tet.json",   "lens5_2tet.json", "lens5_3tet.json"};
const std::vector<std::string> kAll = {
    "s3_1tet.json",    "s3_2tet.json",   "s2xs1_2tet.json",
    "rp3_2tet.json",   "lens5_2tet.json", "lens5_3tet.json",
    "lens5_5tet.json"};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Full-enumeration state sum at a fixed width, independent of the pruned
// production path.
BigReal naive_tv(const GluingTable& table, int r, mpfr_prec_t bits,
                 uint64_t* terms = nullptr) {
  Skeleton sk = compute_skeleton(table);
  WeightSystem ws(r, bits);
  BigReal sum(0L, bits);
  uint64_t count = 0;
  std::vector<int> col(sk.e, 0);
  for (;;) {
    bool ok = true;
    for (const auto& tri : sk.triangles)
      if (!admissible_triple(col[tri.edge[0]], col[tri.edge[1]],
                             col[tri.edge[2]], r)) {
        ok = false;
        break;
      }
    if (ok) {
      ++count;
      BigReal term(1L, bits);
      for (int c : col) term *= ws.edge_w[c];
      for (const auto& tri : sk.triangles)
        term *= triangle_weight(col[tri.edge[0]], col[tri.edge[1]],
                                col[tri.edge[2]], ws);
      for (int t = 0; t < sk.n; ++t) {
        const auto& te = sk.tet_edges[t];
        term *= tet_weight(col[te[0]], col[te[3]], col[te[1]], col[te[5]],
                           col[te[2]], col[te[4]], ws);
      }
      sum += term;
    }
    int i = 0;
    while (i < sk.e && ++col[i] > r - 2) col[i++] = 0;
    if (i == sk.e) break;
  }
  for (int i = 0; i < sk.v; ++i) sum *= ws.eta2;
  if (terms) *terms = count;
  return sum;
}

void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  PrecisionPolicy pol;
  bool ok = true;
  std::string detail;
  for (const auto& name : kSmall) {
    GluingTable t = load(name);
    for (int r : {5, 7, 9}) {
      uint64_t terms = 0;
      BigReal ref = naive_tv(t, r, 512, &terms);
      TVRecord rec = tv_invariant(t, r, pol);
      double rel = BigReal::relative_difference(rec.value, ref);
      if (rel > 1e-10 || rec.admissible_count != terms) {
        ok = false;
        detail = name + " r=" + std::to_string(r);
      }
    }
  }
  double secs = seconds_since(t0);
  if (secs >= 10.0) ok = false;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "pruned sum vs 512-bit naive oracle, 6 inputs, r<=9, rel "
                "1e-10, counts exact (%.1fs)%s%s",
                secs, detail.empty() ? "" : " first failure ", detail.c_str());
  report(1, ok, buf);
}

void criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  PrecisionPolicy pol;
  GluingTable s3 = load("s3_1tet.json");
  GluingTable prod = load("s2xs1_2tet.json");
  bool ok = true;
  for (int r = 5; r <= 51; r += 2) {
    double want = 2.0 / r * std::pow(std::sin(2 * M_PI / r), 2);
    TVRecord a = tv_invariant(s3, r, pol);
    TVRecord b = tv_invariant(prod, r, pol);
    if (a.declared_zero || std::fabs(a.tv_double - want) > 1e-9 * want)
      ok = false;
    if (b.declared_zero || std::fabs(b.tv_double - 1.0) > 1e-9) ok = false;
  }
  double secs = seconds_since(t0);
  if (secs >= 60.0) ok = false;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "closed forms (2/r)sin^2(2pi/r) and 1 for odd r<=51, rel 1e-9 "
                "(%.1fs)",
                secs);
  report(2, ok, buf);
}

GluingTable random_moves(GluingTable t, int count, std::mt19937_64& rng) {
  for (int i = 0; i < count; ++i) {
    Skeleton sk = compute_skeleton(t);
    struct Mv {
      bool expand;
      int index;
    };
    std::vector<Mv> moves;
    if (t.n + 1 <= 6)
      for (int c = 0; c < sk.f; ++c)
        if (sk.triangles[c].embedding[0].first !=
            sk.triangles[c].embedding[1].first)
          moves.push_back({true, c});
    for (int c = 0; c < sk.e; ++c) {
      if (sk.edge_embeddings[c].size() != 3) continue;
      try {
        pachner_32(t, c);
        moves.push_back({false, c});
      } catch (const Error&) {
      }
    }
    if (moves.empty()) break;
    const Mv& mv = moves[rng() % moves.size()];
    t = mv.expand ? pachner_23(t, mv.index) : pachner_32(t, mv.index);
  }
  return t;
}

void criterion3() {
  auto t0 = std::chrono::steady_clock::now();
  PrecisionPolicy pol;
  bool ok = true;
  std::string detail;
  for (const auto& name :
       {"s3_1tet.json", "s3_2tet.json", "s2xs1_2tet.json", "rp3_2tet.json",
        "lens5_2tet.json"}) {
    GluingTable base = load(name);
    std::vector<double> ref;
    for (int r : {5, 7, 9, 11}) ref.push_back(tv_invariant(base, r, pol).tv_double);
    for (uint64_t seq = 0; seq < 5; ++seq) {
      std::mt19937_64 rng(1000 + seq);
      GluingTable moved = random_moves(base, 4, rng);
      int i = 0;
      for (int r : {5, 7, 9, 11}) {
        double got = tv_invariant(moved, r, pol).tv_double;
        double scale = std::max(std::fabs(ref[i]), 1e-30);
        if (std::fabs(got - ref[i]) > 1e-8 * scale) {
          ok = false;
          detail = std::string(name) + " seq=" + std::to_string(seq) +
                   " r=" + std::to_string(r);
        }
        ++i;
      }
    }
  }
  double secs = seconds_since(t0);
  if (secs >= 120.0) ok = false;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "5 random Pachner sequences x 5 inputs, r in {5,7,9,11}, rel "
                "1e-8 (%.1fs)%s%s",
                secs, detail.empty() ? "" : " first failure ", detail.c_str());
  report(3, ok, buf);
}

void criterion4() {
  bool ok = true;
  int checked = 0;
  for (const auto& name : kAll) {
    GluingTable t = load(name);
    Skeleton sk = compute_skeleton(t);
    if (!homology_z2(sk).integer_fast_path_allowed()) continue;
    AdmissibilityPolytope p = build_polytope(sk);
    for (int r = 3; r <= 21; r += 2) {
      ++checked;
      if (count_lattice_points(p, r - 2) !=
          count_admissible(make_context(sk, r, true)))
        ok = false;
    }
  }
  report(4, ok,
         "lattice points of (r-2)P_T equal integer-mode admissible counts, "
         "fast-path inputs, odd r<=21 (" +
             std::to_string(checked) + " checks)");
}

void criterion5() {
  bool ok = true;
  std::string detail;
  for (const auto& name : kAll) {
    AdmissibilityPolytope p = build_polytope(compute_skeleton(load(name)));
    VolumeEstimate fit = ehrhart_volume_fit(p, default_dilations(p.dim));
    VolumeEstimate mc = mc_volume(p, 400000, 20230 + p.dim);
    double tol = std::max(0.05 * std::max(fit.value, mc.value),
                          3 * (fit.std_error + mc.std_error));
    if (mc.degenerate || std::fabs(fit.value - mc.value) > tol) {
      ok = false;
      detail = " bundled " + name;
    }
  }
  for (int d = 1; d <= 4; ++d) {
    AdmissibilityPolytope bx;
    bx.dim = d;
    for (int i = 0; i < d; ++i) {
      std::vector<int> lo(d, 0), hi(d, 0);
      lo[i] = -1;
      hi[i] = 1;
      bx.rows.push_back({lo, 0});
      bx.rows.push_back({hi, 1});
    }
    AdmissibilityPolytope sx = bx;
    sx.rows.push_back({std::vector<int>(d, 1), 1});
    double vol_box = std::pow(0.5, d);
    double vol_sx = vol_box;
    for (int i = 2; i <= d; ++i) vol_sx /= i;
    VolumeEstimate fb = ehrhart_volume_fit(bx, default_dilations(d));
    VolumeEstimate fs = ehrhart_volume_fit(sx, default_dilations(d));
    if (std::fabs(fb.value - vol_box) >
        std::max(0.01 * vol_box, 3 * fb.std_error)) {
      ok = false;
      detail = " box d=" + std::to_string(d);
    }
    if (std::fabs(fs.value - vol_sx) >
        std::max(0.01 * vol_sx, 3 * fs.std_error)) {
      ok = false;
      detail = " simplex d=" + std::to_string(d);
    }
  }
  report(5, ok,
         "Monte Carlo vs Ehrhart-fit volumes within max(5%,3sigma); box and "
         "simplex recovered within 1%/3sigma" +
             detail);
}

void criterion6() {
  bool ok = true;
  std::string detail;
  std::vector<int> rs;
  for (int r = 11; r <= 41; r += 2) rs.push_back(r);
  for (const auto& name : kAll) {
    GluingTable t = load(name);
    if (!homology_z2(compute_skeleton(t)).integer_fast_path_allowed())
      continue;
    EstimatorReport rep = estimator_report(t, rs);
    double at11 = rep.rows.front().estimator_ratio;
    double at41 = rep.rows.back().estimator_ratio;
    if (!(at41 < at11)) {
      ok = false;
      detail = " ratio trend " + name;
    }
    for (const auto& row : rep.rows)
      if (row.nodes_ratio < 1.0) {
        ok = false;
        detail = " nodes ratio " + name;
      }
  }
  report(6, ok,
         "estimator/count ratio shrinks from r=11 to r=41 and visited nodes "
         ">= admissible count on fast-path inputs" +
             detail);
}

void criterion7() {
  GluingTable t = load("s3_2tet.json");
  PrecisionPolicy pol;
  pol.initial_bits = 32;
  TVRecord rec = tv_invariant(t, 33, pol);
  BigReal ref = naive_tv(t, 33, 256);
  double rel = BigReal::relative_difference(rec.value, ref);
  bool escalated = rec.bits_used > 32;
  bool close = rel <= 0.05 && rel <= pol.tau;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "32-bit start at r=33 escalates (accepted at %ld bits) and "
                "matches a 256-bit reference (rel %.2e <= tau)",
                static_cast<long>(rec.bits_used), rel);
  report(7, escalated && close, buf);
}

void criterion8() {
  auto t0 = std::chrono::steady_clock::now();
  PrecisionPolicy pol;
  GluingTable t = load("lens5_5tet.json");
  TVSeries series = tv_sequence(t, 5, 51, pol);
  series.target_limit = 0.0;  // graph manifold: zero simplicial volume
  auto tail = s_r(series);
  double s11 = 0, s51 = 0;
  for (auto [r, s] : tail) {
    if (r == 11) s11 = s;
    if (r == 51) s51 = s;
  }
  FitPoints pts;
  for (const auto& rec : series.records)
    if (auto lq = log_quantity(rec))
      pts.emplace_back(static_cast<double>(rec.r), *lq);
  FitResult f1 = fit_model1(pts);
  double mean = 0;
  for (auto [x, y] : pts) mean += y;
  mean /= static_cast<double>(pts.size());
  double const_rss = 0;
  for (auto [x, y] : pts) const_rss += (y - mean) * (y - mean);
  double secs = seconds_since(t0);
  bool ok = s51 <= 0.5 * s11 && f1.rss < const_rss && secs < 1800.0;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "5-tet graph manifold, target 0: S_51=%.4f <= S_11/2=%.4f, "
                "model-1 rss %.3e < constant rss %.3e (%.0fs)",
                s51, 0.5 * s11, f1.rss, const_rss, secs);
  report(8, ok, buf);
}

void criterion10() {
  // Exported values (everything except wall time) must be identical for any
  // thread count.
  PrecisionPolicy pol;
  bool ok = true;
  auto strip_ms = [](TVRecord rec) {
    rec.wall_ms = 0;
    return to_jsonl(rec);
  };
  for (const auto& name : kSmall) {
    GluingTable t = load(name);
    for (int r : {9, 21}) {
      std::string a = strip_ms(tv_invariant(t, r, pol, 0, 1));
      std::string b = strip_ms(tv_invariant(t, r, pol, 0, 3));
      std::string c = strip_ms(tv_invariant(t, r, pol, 0, 8));
      if (a != b || a != c) ok = false;
    }
    AdmissibilityPolytope p = build_polytope(compute_skeleton(t));
    VolumeEstimate v1 = ehrhart_volume_fit(p, default_dilations(p.dim));
    VolumeEstimate v2 = ehrhart_volume_fit(p, default_dilations(p.dim));
    if (v1.value != v2.value || v1.std_error != v2.std_error) ok = false;
    if (mc_volume(p, 50000, 7).value != mc_volume(p, 50000, 7).value)
      ok = false;
  }
  report(10, ok,
         "records (minus wall time) byte-identical across 1/3/8 threads; "
         "volume estimates reproducible");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::printf("SKIP criterion 9: optional Weeks-manifold run; needs a "
              "user-supplied 9-tet triangulation and hours of runtime\n");
  criterion10();
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
