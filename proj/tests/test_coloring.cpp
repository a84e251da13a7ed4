#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "tvr/coloring.hpp"

using namespace tvr;

namespace {

GluingTable load(const std::string& name) {
  std::ifstream in(std::string(TVR_DATA_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_triangulation(buf.str());
}

// Exhaustive reference: every coloring in {0..r-2}^e checked directly.
std::set<std::vector<int>> brute_force(const Skeleton& sk, int r,
                                       bool integer_only) {
  std::set<std::vector<int>> out;
  std::vector<int> col(sk.e, 0);
  for (;;) {
    bool ok = true;
    if (integer_only)
      for (int c : col)
        if (c % 2) ok = false;
    if (ok)
      for (const auto& tri : sk.triangles) {
        int a = col[tri.edge[0]], b = col[tri.edge[1]], c = col[tri.edge[2]];
        if ((a + b + c) % 2 || a > b + c || b > a + c || c > a + b ||
            a + b + c > 2 * (r - 2)) {
          ok = false;
          break;
        }
      }
    if (ok) out.insert(col);
    int i = 0;
    while (i < sk.e && ++col[i] > r - 2) col[i++] = 0;
    if (i == sk.e) break;
  }
  return out;
}

}  // namespace

TEST_CASE("edge order is a permutation") {
  for (const auto& name : {"s3_1tet.json", "lens5_5tet.json", "rp3_2tet.json"}) {
    Skeleton sk = compute_skeleton(load(name));
    std::vector<int> order = order_edges(sk);
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < sk.e; ++i) CHECK(sorted[i] == i);
  }
}

TEST_CASE("enumeration matches exhaustive search") {
  for (const auto& name :
       {"s3_1tet.json", "s3_2tet.json", "s2xs1_2tet.json", "rp3_2tet.json",
        "lens5_2tet.json"}) {
    Skeleton sk = compute_skeleton(load(name));
    for (int r : {3, 5, 7, 9}) {
      for (bool integer_only : {false, true}) {
        AdmissibilityContext ctx = make_context(sk, r, integer_only);
        std::set<std::vector<int>> seen;
        EnumStats stats = enumerate_admissible(
            ctx, [&](const std::vector<int>& col) { seen.insert(col); });
        std::set<std::vector<int>> want = brute_force(sk, r, integer_only);
        CHECK(seen == want);
        CHECK(stats.admissible_count == want.size());
        CHECK(stats.nodes_visited >= stats.admissible_count);
      }
    }
  }
}

TEST_CASE("r=3 integer mode admits only the zero coloring") {
  for (const auto& name : {"s3_1tet.json", "lens5_5tet.json"}) {
    Skeleton sk = compute_skeleton(load(name));
    CHECK(count_admissible(make_context(sk, 3, true)) == 1);
  }
}

TEST_CASE("all-zero coloring is always admissible") {
  Skeleton sk = compute_skeleton(load("lens5_5tet.json"));
  for (int r : {3, 5, 11}) {
    AdmissibilityContext ctx = make_context(sk, r, false);
    Coloring zero{std::vector<int>(sk.e, 0)};
    CHECK(check_admissible(zero, ctx));
  }
}

TEST_CASE("fast-path inputs only admit even colors") {
  for (const auto& name : {"s3_1tet.json", "lens5_2tet.json", "lens5_3tet.json"}) {
    Skeleton sk = compute_skeleton(load(name));
    REQUIRE(homology_z2(sk).integer_fast_path_allowed());
    for (int r : {5, 9, 13}) {
      uint64_t all = count_admissible(make_context(sk, r, false));
      uint64_t even = count_admissible(make_context(sk, r, true));
      CHECK(all == even);
      enumerate_admissible(make_context(sk, r, false),
                           [&](const std::vector<int>& col) {
                             for (int c : col) CHECK(c % 2 == 0);
                           });
    }
  }
}

TEST_CASE("subtree partition is exact and deterministic") {
  Skeleton sk = compute_skeleton(load("rp3_2tet.json"));
  for (int r : {7, 11}) {
    AdmissibilityContext ctx = make_context(sk, r, false);
    std::vector<std::vector<int>> whole, pieces;
    EnumStats total = enumerate_admissible(
        ctx, [&](const std::vector<int>& col) { whole.push_back(col); });
    EnumStats merged;
    for (int c = 0; c <= r - 2; ++c)
      merged += enumerate_subtree(ctx, c, [&](const std::vector<int>& col) {
        pieces.push_back(col);
      });
    CHECK(whole == pieces);  // same colorings in the same order
    CHECK(merged.admissible_count == total.admissible_count);
    CHECK(merged.nodes_visited == total.nodes_visited);

    std::vector<std::vector<int>> again;
    enumerate_admissible(ctx, [&](const std::vector<int>& col) {
      again.push_back(col);
    });
    CHECK(again == whole);
  }
}

TEST_CASE("check_admissible rejects bad input") {
  Skeleton sk = compute_skeleton(load("s3_1tet.json"));
  AdmissibilityContext ctx = make_context(sk, 5, false);
  CHECK_FALSE(check_admissible(Coloring{{0}}, ctx));          // wrong length
  CHECK_FALSE(check_admissible(Coloring{{0, 99}}, ctx));      // out of range
  CHECK_FALSE(check_admissible(Coloring{{0, 1}}, ctx));       // parity
  AdmissibilityContext ictx = make_context(sk, 5, true);
  CHECK_FALSE(check_admissible(Coloring{{1, 2}}, ictx));      // odd color
}
