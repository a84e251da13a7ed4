#include "tvr/coloring.hpp"

#include <algorithm>

namespace tvr {

std::vector<int> order_edges(const Skeleton& sk) {
  std::vector<bool> ordered(sk.e, false);
  std::vector<int> order;
  order.reserve(sk.e);
  while (static_cast<int>(order.size()) < sk.e) {
    int best = -1, best_count = -1;
    for (int cand = 0; cand < sk.e; ++cand) {
      if (ordered[cand]) continue;
      int count = 0;
      for (const auto& tri : sk.triangles) {
        bool uses = false, others_ordered = true;
        for (int side : tri.edge) {
          if (side == cand)
            uses = true;
          else if (!ordered[side])
            others_ordered = false;
        }
        if (uses && others_ordered) ++count;
      }
      if (count > best_count) {
        best = cand;
        best_count = count;
      }
    }
    ordered[best] = true;
    order.push_back(best);
  }
  return order;
}

AdmissibilityContext make_context(const Skeleton& sk, int r,
                                  bool integer_only) {
  if (r < 3) fail(ErrorCode::MalformedInput, "order r must be >= 3");
  AdmissibilityContext ctx;
  ctx.r = r;
  ctx.integer_only = integer_only;
  ctx.e = sk.e;
  for (const auto& tri : sk.triangles) ctx.triangles.push_back(tri.edge);
  ctx.edge_order = order_edges(sk);
  ctx.pos_of_edge.assign(sk.e, -1);
  for (int k = 0; k < sk.e; ++k) ctx.pos_of_edge[ctx.edge_order[k]] = k;

  ctx.full_by_pos.resize(sk.e);
  ctx.partial_by_pos.resize(sk.e);
  for (const auto& tri : ctx.triangles) {
    std::array<int, 3> pos = {ctx.pos_of_edge[tri[0]], ctx.pos_of_edge[tri[1]],
                              ctx.pos_of_edge[tri[2]]};
    std::array<int, 3> sorted = pos;
    std::sort(sorted.begin(), sorted.end());
    ctx.full_by_pos[sorted[2]].push_back(tri);
    if (sorted[1] < sorted[2]) {
      // Two slots colored, one pending: their sum is already bounded by the
      // triangle budget.
      std::array<int, 2> colored{};
      int k = 0;
      for (int i = 0; i < 3; ++i)
        if (pos[i] <= sorted[1] && k < 2) colored[k++] = tri[i];
      ctx.partial_by_pos[sorted[1]].push_back(colored);
    }
  }
  return ctx;
}

bool check_admissible(const Coloring& coloring,
                      const AdmissibilityContext& ctx) {
  if (static_cast<int>(coloring.doubled.size()) != ctx.e) return false;
  for (int c : coloring.doubled)
    if (c < 0 || c > ctx.r - 2 || (ctx.integer_only && c % 2)) return false;
  for (const auto& tri : ctx.triangles) {
    int a = coloring.doubled[tri[0]];
    int b = coloring.doubled[tri[1]];
    int c = coloring.doubled[tri[2]];
    if ((a + b + c) % 2 != 0 || a > b + c || b > a + c || c > a + b ||
        a + b + c > 2 * (ctx.r - 2))
      return false;
  }
  return true;
}

uint64_t count_admissible(const AdmissibilityContext& ctx) {
  return enumerate_admissible(ctx, [](const std::vector<int>&) {})
      .admissible_count;
}

}  // namespace tvr
