#include "tvr/triangulation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace tvr {

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) { parent_[find(a)] = find(b); }

  // Canonical class indices, ordered by smallest member.
  std::vector<int> canonical_classes(int* count) {
    const int n = static_cast<int>(parent_.size());
    std::vector<int> cls(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
      int r = find(i);
      if (cls[r] < 0) cls[r] = next++;
      cls[i] = cls[r];
    }
    *count = next;
    return cls;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

int Perm4::sign() const {
  int s = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (img_[i] > img_[j]) s = -s;
  return s;
}

int edge_index(int u, int v) {
  if (u > v) std::swap(u, v);
  for (int i = 0; i < 6; ++i)
    if (kEdgeVertices[i][0] == u && kEdgeVertices[i][1] == v) return i;
  fail(ErrorCode::Internal, "bad edge vertices");
}

void validate(const GluingTable& table) {
  if (table.n <= 0 || static_cast<int>(table.gluings.size()) != table.n)
    fail(ErrorCode::MalformedInput, "gluing table size mismatch");
  for (int t = 0; t < table.n; ++t) {
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = table.gluing(t, f);
      if (g.tet < 0 || g.tet >= table.n || g.face < 0 || g.face > 3)
        fail(ErrorCode::UngluedFace,
             "face (" + std::to_string(t) + "," + std::to_string(f) +
                 ") is not glued");
      if (g.tet == t && g.face == f)
        fail(ErrorCode::SelfGluedFace,
             "face (" + std::to_string(t) + "," + std::to_string(f) +
                 ") glued to itself");
      if (g.perm[f] != g.face)
        fail(ErrorCode::NonInvolutiveGluing,
             "gluing of (" + std::to_string(t) + "," + std::to_string(f) +
                 ") does not map the face index correctly");
      const Gluing& back = table.gluing(g.tet, g.face);
      if (back.tet != t || back.face != f || !(back.perm == g.perm.inverse()))
        fail(ErrorCode::NonInvolutiveGluing,
             "gluings of (" + std::to_string(t) + "," + std::to_string(f) +
                 ") and its partner are not mutually inverse");
    }
  }
}

GluingTable parse_triangulation(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::MalformedInput, std::string("invalid JSON: ") + ex.what());
  }
  GluingTable table;
  try {
    table.n = doc.at("tetrahedra").get<int>();
    const auto& rows = doc.at("gluings");
    if (table.n <= 0 || static_cast<int>(rows.size()) != table.n)
      fail(ErrorCode::MalformedInput, "tetrahedra count and gluings disagree");
    table.gluings.resize(table.n);
    for (int t = 0; t < table.n; ++t) {
      const auto& row = rows.at(t);
      if (static_cast<int>(row.size()) != 4)
        fail(ErrorCode::MalformedInput,
             "tetrahedron " + std::to_string(t) + " needs 4 gluing entries");
      for (int f = 0; f < 4; ++f) {
        const auto& entry = row.at(f);
        if (entry.is_null())
          fail(ErrorCode::UngluedFace,
               "face (" + std::to_string(t) + "," + std::to_string(f) +
                   ") is unglued; closed triangulations required");
        Gluing g;
        g.tet = entry.at("tet").get<int>();
        g.face = entry.at("face").get<int>();
        const auto& perm = entry.at("perm");
        if (perm.size() != 4)
          fail(ErrorCode::MalformedInput, "perm must have 4 entries");
        std::array<int, 4> img{};
        std::array<bool, 4> seen{};
        for (int i = 0; i < 4; ++i) {
          int x = perm.at(i).get<int>();
          if (x < 0 || x > 3 || seen[x])
            fail(ErrorCode::MalformedInput, "perm is not a permutation");
          seen[x] = true;
          img[i] = x;
        }
        g.perm = Perm4(img[0], img[1], img[2], img[3]);
        table.gluings[t][f] = g;
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::MalformedInput, std::string("bad schema: ") + ex.what());
  }
  validate(table);
  return table;
}

std::string to_json(const GluingTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (int t = 0; t < table.n; ++t) {
    nlohmann::json row = nlohmann::json::array();
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = table.gluing(t, f);
      row.push_back({{"tet", g.tet},
                     {"face", g.face},
                     {"perm", {g.perm[0], g.perm[1], g.perm[2], g.perm[3]}}});
    }
    rows.push_back(row);
  }
  nlohmann::json doc = {{"tetrahedra", table.n}, {"gluings", rows}};
  return doc.dump();
}

Skeleton compute_skeleton(const GluingTable& table) {
  validate(table);
  const int n = table.n;
  Skeleton sk;
  sk.n = n;

  UnionFind corners(4 * n);
  UnionFind edges(6 * n);
  for (int t = 0; t < n; ++t) {
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = table.gluing(t, f);
      for (int v = 0; v < 4; ++v)
        if (v != f) corners.unite(4 * t + v, 4 * g.tet + g.perm[v]);
      for (int i = 0; i < 6; ++i) {
        auto [u, v] = std::pair(kEdgeVertices[i][0], kEdgeVertices[i][1]);
        if (u == f || v == f) continue;
        edges.unite(6 * t + i, 6 * g.tet + edge_index(g.perm[u], g.perm[v]));
      }
    }
  }
  sk.vertex_class = corners.canonical_classes(&sk.v);
  sk.edge_class = edges.canonical_classes(&sk.e);

  sk.edge_embeddings.resize(sk.e);
  sk.tet_edges.resize(n);
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < 6; ++i) {
      int cls = sk.edge_class[6 * t + i];
      sk.tet_edges[t][i] = cls;
      sk.edge_embeddings[cls].push_back(
          {t, kEdgeVertices[i][0], kEdgeVertices[i][1]});
    }
  }

  // Triangle classes: faces identified in pairs.
  UnionFind faces(4 * n);
  for (int t = 0; t < n; ++t)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = table.gluing(t, f);
      faces.unite(4 * t + f, 4 * g.tet + g.face);
    }
  std::vector<int> face_class = faces.canonical_classes(&sk.f);
  sk.triangles.resize(sk.f);
  std::vector<int> fill(sk.f, 0);
  for (int t = 0; t < n; ++t) {
    for (int f = 0; f < 4; ++f) {
      int cls = face_class[4 * t + f];
      if (fill[cls] < 2) sk.triangles[cls].embedding[fill[cls]] = {t, f};
      ++fill[cls];
    }
  }
  if (sk.f != 2 * n)
    fail(ErrorCode::Internal, "expected exactly 2n triangle classes");
  for (int c = 0; c < sk.f; ++c) {
    if (fill[c] != 2)
      fail(ErrorCode::Internal, "triangle class without exactly 2 embeddings");
    auto [t, f] = sk.triangles[c].embedding[0];
    std::array<int, 3> w{};
    int k = 0;
    for (int v = 0; v < 4; ++v)
      if (v != f) w[k++] = v;
    // side i is opposite triangle vertex i
    sk.triangles[c].edge = {sk.edge_class[6 * t + edge_index(w[1], w[2])],
                            sk.edge_class[6 * t + edge_index(w[0], w[2])],
                            sk.edge_class[6 * t + edge_index(w[0], w[1])]};
  }

  if (sk.e != sk.n + sk.v)
    fail(ErrorCode::NotClosedManifoldLike,
         "Euler relation e = n + v violated: e=" + std::to_string(sk.e) +
             " n=" + std::to_string(sk.n) + " v=" + std::to_string(sk.v));

  // Best-effort orientation check: try to orient tetrahedra so that every
  // gluing is orientation-reversing on the shared triangle.
  std::vector<int> orient(n, 0);
  orient[0] = 1;
  std::vector<int> stack = {0};
  while (!stack.empty() && sk.orientation_consistent) {
    int t = stack.back();
    stack.pop_back();
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = table.gluing(t, f);
      int want = -orient[t] * g.perm.sign();
      if (orient[g.tet] == 0) {
        orient[g.tet] = want;
        stack.push_back(g.tet);
      } else if (orient[g.tet] != want) {
        sk.orientation_consistent = false;
        break;
      }
    }
  }
  return sk;
}

namespace {

// Rank of a GF(2) matrix given as bitmask rows.
int gf2_rank(std::vector<uint64_t> rows) {
  int rank = 0;
  for (int bit = 0; bit < 64; ++bit) {
    uint64_t mask = uint64_t{1} << bit;
    auto pivot = std::find_if(rows.begin() + rank, rows.end(),
                              [&](uint64_t r) { return r & mask; });
    if (pivot == rows.end()) continue;
    std::swap(*pivot, rows[rank]);
    for (auto& r : rows)
      if (&r != &rows[rank] && (r & mask)) r ^= rows[rank];
    ++rank;
  }
  return rank;
}

}  // namespace

HomologyInfo homology_z2(const Skeleton& sk) {
  if (sk.v > 64 || sk.e > 64)
    fail(ErrorCode::Internal, "skeleton too large for GF(2) bitmask rank");
  // d1: edges -> vertices; an edge with equal endpoints contributes 0.
  std::vector<uint64_t> d1(sk.e, 0);
  for (int c = 0; c < sk.e; ++c) {
    const EdgeEmbedding& emb = sk.edge_embeddings[c].front();
    int a = sk.vertex_class[4 * emb.tet + emb.u];
    int b = sk.vertex_class[4 * emb.tet + emb.v];
    if (a != b) d1[c] = (uint64_t{1} << a) | (uint64_t{1} << b);
  }
  // d2: triangles -> edges; a repeated edge cancels mod 2.
  std::vector<uint64_t> d2(sk.f, 0);
  for (int c = 0; c < sk.f; ++c)
    for (int side : sk.triangles[c].edge) d2[c] ^= uint64_t{1} << side;

  int rank_d1 = gf2_rank(d1);
  int rank_d2 = gf2_rank(d2);
  HomologyInfo info;
  info.h1_z2_rank = (sk.e - rank_d1) - rank_d2;
  info.is_one_vertex = (sk.v == 1);
  return info;
}

namespace {

// Half-face relabeling used when rewriting a gluing table around a move:
// old half-face (tet, face) -> (new tet, label map old labels -> new labels).
struct HalfFaceImage {
  int tet = -1;
  Perm4 label_map;
  bool removed = false;
};

GluingTable rewrite(const GluingTable& old,
                    const std::vector<std::array<HalfFaceImage, 4>>& image,
                    int new_n,
                    const std::vector<std::tuple<int, int, int, int, Perm4>>&
                        extra_gluings) {
  GluingTable out;
  out.n = new_n;
  out.gluings.resize(new_n);
  for (int t = 0; t < old.n; ++t) {
    for (int f = 0; f < 4; ++f) {
      const HalfFaceImage& a = image[t][f];
      if (a.removed) continue;
      const Gluing& g = old.gluing(t, f);
      const HalfFaceImage& b = image[g.tet][g.face];
      if (b.removed) fail(ErrorCode::Internal, "inconsistent half-face map");
      Gluing ng;
      ng.tet = b.tet;
      ng.perm = b.label_map.after(g.perm).after(a.label_map.inverse());
      ng.face = ng.perm[a.label_map[f]];
      out.gluings[a.tet][a.label_map[f]] = ng;
    }
  }
  for (const auto& [t1, f1, t2, f2, p] : extra_gluings) {
    out.gluings[t1][f1] = {t2, f2, p};
    out.gluings[t2][f2] = {t1, f1, p.inverse()};
  }
  validate(out);
  return out;
}

Perm4 perm_from_map(const std::array<int, 4>& src, const std::array<int, 4>& dst) {
  std::array<int, 4> img{};
  for (int i = 0; i < 4; ++i) img[src[i]] = dst[i];
  return Perm4(img[0], img[1], img[2], img[3]);
}

}  // namespace

GluingTable pachner_23(const GluingTable& table, int triangle_class) {
  Skeleton sk = compute_skeleton(table);
  if (triangle_class < 0 || triangle_class >= sk.f)
    fail(ErrorCode::MoveNotApplicable, "no such triangle class");
  auto [t1, f1] = sk.triangles[triangle_class].embedding[0];
  auto [t2, f2] = sk.triangles[triangle_class].embedding[1];
  if (t1 == t2)
    fail(ErrorCode::MoveNotApplicable,
         "triangle embedded twice in the same tetrahedron");
  const Perm4& p = table.gluing(t1, f1).perm;

  std::array<int, 3> u{};
  int k = 0;
  for (int v = 0; v < 4; ++v)
    if (v != f1) u[k++] = v;

  // Surviving tets keep their relative order; the three new ones follow.
  std::vector<int> remap(table.n, -1);
  int next = 0;
  for (int t = 0; t < table.n; ++t)
    if (t != t1 && t != t2) remap[t] = next++;
  const int base = table.n - 2;  // new tets base, base+1, base+2

  std::vector<std::array<HalfFaceImage, 4>> image(
      table.n, std::array<HalfFaceImage, 4>{});
  for (int t = 0; t < table.n; ++t)
    for (int f = 0; f < 4; ++f)
      if (t != t1 && t != t2) image[t][f] = {remap[t], Perm4(), false};
  image[t1][f1].removed = true;
  image[t2][f2].removed = true;

  // New tet i: 0 = apex of t1, 1 = apex of t2, 2,3 = the two equator
  // vertices other than u[i].
  std::array<Perm4, 3> sigma, tau;
  for (int i = 0; i < 3; ++i) {
    int j = (i == 0) ? 1 : 0;
    int l = (i == 2) ? 1 : 2;
    sigma[i] = perm_from_map({f1, u[j], u[l], u[i]}, {0, 2, 3, 1});
    tau[i] = perm_from_map({f2, p[u[j]], p[u[l]], p[u[i]]}, {1, 2, 3, 0});
    image[t1][u[i]] = {base + i, sigma[i], false};
    image[t2][p[u[i]]] = {base + i, tau[i], false};
  }

  // Internal faces between the new tets, around the new edge 0-1.
  std::vector<std::tuple<int, int, int, int, Perm4>> extra;
  auto loc = [&](int i, int a) {  // local label of equator vertex u[a] in tet i
    int j = (i == 0) ? 1 : 0;
    return (a == j) ? 2 : 3;
  };
  for (int i = 0; i < 3; ++i) {
    for (int i2 = i + 1; i2 < 3; ++i2) {
      int m = 3 - i - i2;  // shared equator vertex index
      std::array<int, 4> src = {0, 1, loc(i, m), loc(i, i2)};
      std::array<int, 4> dst = {0, 1, loc(i2, m), loc(i2, i)};
      extra.emplace_back(base + i, loc(i, i2), base + i2, loc(i2, i),
                         perm_from_map(src, dst));
    }
  }
  return rewrite(table, image, table.n + 1, extra);
}

GluingTable pachner_32(const GluingTable& table, int edge_class) {
  Skeleton sk = compute_skeleton(table);
  if (edge_class < 0 || edge_class >= sk.e)
    fail(ErrorCode::MoveNotApplicable, "no such edge class");
  const auto& embeddings = sk.edge_embeddings[edge_class];
  if (embeddings.size() != 3)
    fail(ErrorCode::MoveNotApplicable, "edge degree is not 3");

  // Walk around the edge through the three tetrahedra.
  std::array<int, 3> S{}, A{}, B{}, C{}, D{};
  S[0] = embeddings[0].tet;
  A[0] = embeddings[0].u;
  B[0] = embeddings[0].v;
  {
    std::array<int, 2> eq{};
    int k = 0;
    for (int v = 0; v < 4; ++v)
      if (v != A[0] && v != B[0]) eq[k++] = v;
    C[0] = eq[0];
    D[0] = eq[1];
  }
  for (int m = 0; m < 3; ++m) {
    const Gluing& g = table.gluing(S[m], D[m]);
    int nt = g.tet;
    const Perm4& p = g.perm;
    if (m == 2) {
      if (nt != S[0] || p[A[2]] != A[0] || p[B[2]] != B[0] ||
          p[C[2]] != D[0] || p[D[2]] != C[0])
        fail(ErrorCode::MoveNotApplicable,
             "edge link does not close into a triangular bipyramid");
      break;
    }
    S[m + 1] = nt;
    A[m + 1] = p[A[m]];
    B[m + 1] = p[B[m]];
    C[m + 1] = p[D[m]];
    D[m + 1] = p[C[m]];
  }
  if (S[0] == S[1] || S[0] == S[2] || S[1] == S[2])
    fail(ErrorCode::MoveNotApplicable,
         "edge embeddings are not in three distinct tetrahedra");

  std::vector<int> remap(table.n, -1);
  int next = 0;
  for (int t = 0; t < table.n; ++t)
    if (t != S[0] && t != S[1] && t != S[2]) remap[t] = next++;
  const int tet_a = table.n - 3;  // equator + apex A
  const int tet_b = table.n - 2;  // equator + apex B

  std::vector<std::array<HalfFaceImage, 4>> image(
      table.n, std::array<HalfFaceImage, 4>{});
  for (int t = 0; t < table.n; ++t)
    for (int f = 0; f < 4; ++f)
      if (remap[t] >= 0) image[t][f] = {remap[t], Perm4(), false};
  for (int m = 0; m < 3; ++m) {
    // Equator vertex x_m is C[m] in S[m]; x_{m-1} is D[m].
    int prev = (m + 2) % 3;
    Perm4 lambda = perm_from_map({A[m], C[m], D[m], B[m]},
                                 {3, m, prev, (m + 1) % 3});
    Perm4 mu = perm_from_map({B[m], C[m], D[m], A[m]},
                             {3, m, prev, (m + 1) % 3});
    image[S[m]][B[m]] = {tet_a, lambda, false};
    image[S[m]][A[m]] = {tet_b, mu, false};
    image[S[m]][C[m]].removed = true;  // interior faces around the edge
    image[S[m]][D[m]].removed = true;
  }
  std::vector<std::tuple<int, int, int, int, Perm4>> extra = {
      {tet_a, 3, tet_b, 3, Perm4()}};
  GluingTable out = rewrite(table, image, table.n - 1, extra);
  compute_skeleton(out);  // reject combinatorially broken results
  return out;
}

namespace {

// Canonical BFS encoding starting from a given tet and starting label map.
std::vector<int> bfs_encoding(const GluingTable& table, int start,
                              const Perm4& start_labels) {
  std::vector<int> index(table.n, -1);
  std::vector<Perm4> labels(table.n);
  index[start] = 0;
  labels[start] = start_labels;
  std::vector<int> order = {start};
  std::vector<int> code;
  for (size_t q = 0; q < order.size(); ++q) {
    int t = order[q];
    Perm4 inv = labels[t].inverse();
    for (int nf = 0; nf < 4; ++nf) {
      int f = inv[nf];
      const Gluing& g = table.gluing(t, f);
      if (index[g.tet] < 0) {
        index[g.tet] = static_cast<int>(order.size());
        labels[g.tet] = labels[t].after(g.perm.inverse());
        order.push_back(g.tet);
      }
      Perm4 pn = labels[g.tet].after(g.perm).after(inv);
      code.push_back(index[g.tet]);
      code.push_back(pn[0] * 64 + pn[1] * 16 + pn[2] * 4 + pn[3]);
    }
  }
  if (static_cast<int>(order.size()) != table.n)
    code.push_back(-1);  // disconnected; should not happen for closed inputs
  return code;
}

std::vector<int> canonical_encoding(const GluingTable& table) {
  std::vector<int> best;
  for (int t = 0; t < table.n; ++t) {
    std::array<int, 4> img = {0, 1, 2, 3};
    do {
      auto code =
          bfs_encoding(table, t, Perm4(img[0], img[1], img[2], img[3]));
      if (best.empty() || code < best) best = std::move(code);
    } while (std::next_permutation(img.begin(), img.end()));
  }
  return best;
}

}  // namespace

bool isomorphic(const GluingTable& a, const GluingTable& b) {
  if (a.n != b.n) return false;
  return canonical_encoding(a) == canonical_encoding(b);
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::NonInvolutiveGluing: return "NonInvolutiveGluing";
    case ErrorCode::SelfGluedFace: return "SelfGluedFace";
    case ErrorCode::UngluedFace: return "UngluedFace";
    case ErrorCode::NotClosedManifoldLike: return "NotClosedManifoldLike";
    case ErrorCode::MoveNotApplicable: return "MoveNotApplicable";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateEstimate: return "DegenerateEstimate";
    case ErrorCode::InadmissibleTriple: return "InadmissibleTriple";
    case ErrorCode::InadmissibleFace: return "InadmissibleFace";
    case ErrorCode::PrecisionCapExceeded: return "PrecisionCapExceeded";
    case ErrorCode::EvenOrderUnsupported: return "EvenOrderUnsupported";
    case ErrorCode::MissingTarget: return "MissingTarget";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::ConventionViolation: return "ConventionViolation";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace tvr
