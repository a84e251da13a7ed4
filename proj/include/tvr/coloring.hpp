#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <vector>

#include "tvr/triangulation.hpp"

namespace tvr {

// An assignment of doubled colors (0 .. r-2) to the edge classes; the color
// of edge i is doubled[i] / 2.
struct Coloring {
  std::vector<int> doubled;
};

// Greedy backtracking order: repeatedly pick the edge completing the most
// triangles whose other edges are already ordered, ties by smallest index.
std::vector<int> order_edges(const Skeleton& skeleton);

struct AdmissibilityContext {
  int r = 0;
  bool integer_only = false;
  int e = 0;
  std::vector<std::array<int, 3>> triangles;  // edge-class triples
  std::vector<int> edge_order;                // position -> edge
  std::vector<int> pos_of_edge;               // edge -> position

  // Triangles fully colored once the edge at position k is assigned.
  std::vector<std::vector<std::array<int, 3>>> full_by_pos;
  // Two-edge budget checks active at position k (partial sum-bound pruning).
  std::vector<std::vector<std::array<int, 2>>> partial_by_pos;
};

AdmissibilityContext make_context(const Skeleton& skeleton, int r,
                                  bool integer_only);

bool check_admissible(const Coloring& coloring,
                      const AdmissibilityContext& ctx);

struct EnumStats {
  uint64_t nodes_visited = 0;
  uint64_t admissible_count = 0;
  double wall_ms = 0;

  EnumStats& operator+=(const EnumStats& o) {
    nodes_visited += o.nodes_visited;
    admissible_count += o.admissible_count;
    wall_ms += o.wall_ms;
    return *this;
  }
};

namespace detail {

// Depth-first enumeration over the (r-1)-ary color tree, colors ascending at
// each depth. A node is counted when its partial assignment survives every
// check active at its depth. `fixed_first` < 0 enumerates the whole tree;
// otherwise only the subtree below that first-edge color.
template <class Visitor>
void enumerate_impl(const AdmissibilityContext& ctx, int fixed_first,
                    EnumStats& stats, Visitor&& visit) {
  const int e = ctx.e;
  const int budget = 2 * (ctx.r - 2);
  const int step = ctx.integer_only ? 2 : 1;
  std::vector<int> color(e, 0);
  std::vector<int> next_color(e + 1, 0);
  int k = 0;
  next_color[0] = (fixed_first >= 0) ? fixed_first : 0;
  while (k >= 0) {
    int c = next_color[k];
    if (c > ctx.r - 2 || (k == 0 && fixed_first >= 0 && c != fixed_first)) {
      --k;
      continue;
    }
    next_color[k] = c + step;
    const int edge = ctx.edge_order[k];
    color[edge] = c;
    bool ok = true;
    for (const auto& pair : ctx.partial_by_pos[k]) {
      if (color[pair[0]] + color[pair[1]] > budget) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (const auto& tri : ctx.full_by_pos[k]) {
        int a = color[tri[0]], b = color[tri[1]], cc = color[tri[2]];
        if ((a + b + cc) % 2 != 0 || a > b + cc || b > a + cc || cc > a + b ||
            a + b + cc > budget) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;
    ++stats.nodes_visited;
    if (k + 1 == e) {
      ++stats.admissible_count;
      visit(static_cast<const std::vector<int>&>(color));
    } else {
      ++k;
      next_color[k] = 0;
    }
  }
}

}  // namespace detail

// Visits every admissible coloring exactly once, in deterministic order.
// The visitor receives the doubled colors indexed by edge class.
template <class Visitor>
EnumStats enumerate_admissible(const AdmissibilityContext& ctx,
                               Visitor&& visit) {
  auto t0 = std::chrono::steady_clock::now();
  EnumStats stats;
  detail::enumerate_impl(ctx, -1, stats, visit);
  stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return stats;
}

// Enumerates only the subtree with the given first-edge color; partitions for
// distinct first colors are disjoint and their union is the full enumeration.
template <class Visitor>
EnumStats enumerate_subtree(const AdmissibilityContext& ctx, int first_color,
                            Visitor&& visit) {
  EnumStats stats;
  detail::enumerate_impl(ctx, first_color, stats, visit);
  return stats;
}

uint64_t count_admissible(const AdmissibilityContext& ctx);

}  // namespace tvr
