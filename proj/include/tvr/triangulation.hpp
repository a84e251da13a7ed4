#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tvr/error.hpp"

namespace tvr {

// Permutation of the vertex labels {0,1,2,3} of a tetrahedron.
class Perm4 {
 public:
  Perm4() : img_{0, 1, 2, 3} {}
  Perm4(int a, int b, int c, int d) : img_{a, b, c, d} {}

  int operator[](int i) const { return img_[i]; }

  Perm4 inverse() const {
    Perm4 p;
    for (int i = 0; i < 4; ++i) p.img_[img_[i]] = i;
    return p;
  }

  // (p.after(q))(x) = p(q(x))
  Perm4 after(const Perm4& q) const {
    return Perm4(img_[q[0]], img_[q[1]], img_[q[2]], img_[q[3]]);
  }

  int sign() const;
  bool is_identity() const { return img_ == std::array<int, 4>{0, 1, 2, 3}; }

  bool operator==(const Perm4&) const = default;

 private:
  std::array<int, 4> img_;
};

struct Gluing {
  int tet = -1;
  int face = -1;
  Perm4 perm;  // vertex labels of the source tet -> labels of `tet`

  bool operator==(const Gluing&) const = default;
};

// A generalized triangulation of a closed 3-manifold: n tetrahedra whose 4n
// triangular faces are identified in pairs. Face f of a tetrahedron is the
// triangle omitting vertex f.
struct GluingTable {
  int n = 0;
  std::vector<std::array<Gluing, 4>> gluings;  // [tet][face]

  const Gluing& gluing(int tet, int face) const { return gluings[tet][face]; }
};

// Checks involution, no face glued to itself, and closedness. Throws on
// violation.
void validate(const GluingTable& table);

GluingTable parse_triangulation(const std::string& text);
std::string to_json(const GluingTable& table);

// Local edges of a tetrahedron, indexed 0..5; edge i and edge 5-i are
// opposite.
inline constexpr std::array<std::array<int, 2>, 6> kEdgeVertices = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

int edge_index(int u, int v);  // u != v, order-insensitive

struct EdgeEmbedding {
  int tet;
  int u, v;  // local vertices, u < v
};

struct TriangleClass {
  std::array<int, 3> edge;  // edge classes of the sides (repetitions allowed)
  std::array<std::pair<int, int>, 2> embedding;  // (tet, face), lexicographic
};

struct Skeleton {
  int n = 0, v = 0, e = 0, f = 0;
  std::vector<int> vertex_class;  // 4n corners -> vertex class
  std::vector<int> edge_class;    // 6n local edges -> edge class
  std::vector<std::vector<EdgeEmbedding>> edge_embeddings;  // per edge class
  std::vector<TriangleClass> triangles;                     // 2n classes
  std::vector<std::array<int, 6>> tet_edges;  // per tet, local edge -> class
  bool orientation_consistent = true;  // best-effort check only
};

// Union-find closure of the identifications induced by the gluings. Class
// indices are canonical: ordered by smallest embedded (tet, local index).
// Throws NotClosedManifoldLike when e != n + v.
Skeleton compute_skeleton(const GluingTable& table);

struct HomologyInfo {
  int h1_z2_rank = 0;
  bool is_one_vertex = false;

  bool integer_fast_path_allowed() const {
    return h1_z2_rank == 0 && is_one_vertex;
  }
};

HomologyInfo homology_z2(const Skeleton& skeleton);

// Bistellar 2-3 move: replaces the two tetrahedra adjacent to the given
// triangle class by three around a new edge. The new tetrahedra are appended
// after the remaining ones.
GluingTable pachner_23(const GluingTable& table, int triangle_class);

// Bistellar 3-2 move on an edge class of degree 3 embedded in three distinct
// tetrahedra.
GluingTable pachner_32(const GluingTable& table, int edge_class);

// Isomorphism of gluing tables up to relabeling, via canonical BFS encodings.
bool isomorphic(const GluingTable& a, const GluingTable& b);

}  // namespace tvr
