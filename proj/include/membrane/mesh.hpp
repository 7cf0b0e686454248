#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "membrane/types.hpp"

namespace membrane {

using Triangle = std::array<Index, 3>;

struct Topology {
  int genus = 0;
  int contours = 0;
  int euler_characteristic = 0;

  friend bool operator==(const Topology&, const Topology&) = default;
};

// Undirected mesh edge, stored with a < b.
struct Edge {
  Index a = 0;
  Index b = 0;
};

namespace detail {

// Kahan's numerically stable form of Heron's formula. Returns a negative
// value when the lengths violate the strict triangle inequality.
template <typename Scalar>
Scalar heron_area(Scalar l0, Scalar l1, Scalar l2) {
  std::array<Scalar, 3> s{l0, l1, l2};
  std::sort(s.begin(), s.end(), [](Scalar x, Scalar y) { return x > y; });
  const Scalar a = s[0], b = s[1], c = s[2];
  if (!(c - (a - b) > Scalar(0))) return Scalar(-1);
  const Scalar prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  return Scalar(0.25) * std::sqrt(prod);
}

class DisjointSets {
 public:
  explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Index(0));
  }
  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(Index x, Index y) {
    x = find(x);
    y = find(y);
    if (x != y) parent_[std::max(x, y)] = std::min(x, y);
  }

 private:
  std::vector<Index> parent_;
};

}  // namespace detail

// Oriented triangle mesh of a compact bordered surface. The metric is
// intrinsic: one positive length per undirected edge. Positions are optional
// and, when given, determine the lengths.
//
// Instances are validated on construction and immutable afterwards.
template <typename Scalar>
class SurfaceMesh {
 public:
  using Positions = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;

  static SurfaceMesh from_positions(Positions positions, std::vector<Triangle> triangles) {
    SurfaceMesh mesh(positions.rows(), std::move(triangles));
    for (Index i = 0; i < positions.size(); ++i) {
      if (!std::isfinite(static_cast<double>(positions.data()[i]))) {
        throw MeshError("non-finite vertex position");
      }
    }
    mesh.lengths_.resize(static_cast<Index>(mesh.edges_.size()));
    for (std::size_t e = 0; e < mesh.edges_.size(); ++e) {
      const Edge& ed = mesh.edges_[e];
      mesh.lengths_[static_cast<Index>(e)] = (positions.row(ed.a) - positions.row(ed.b)).norm();
    }
    mesh.positions_ = std::move(positions);
    mesh.check_metric();
    return mesh;
  }

  // Lengths as (i, j, length) triples. Every mesh edge must be listed exactly
  // once; extra pairs that are not mesh edges are rejected.
  static SurfaceMesh from_edge_lengths(Index vertex_count, std::vector<Triangle> triangles,
                                       const std::vector<std::tuple<Index, Index, Scalar>>& lengths) {
    SurfaceMesh mesh(vertex_count, std::move(triangles));
    mesh.lengths_ = Vector<Scalar>::Constant(static_cast<Index>(mesh.edges_.size()), Scalar(-1));
    for (const auto& [i, j, l] : lengths) {
      const Index e = mesh.find_edge(i, j);
      if (e < 0) {
        throw MeshError("edge length given for non-edge (" + std::to_string(i) + ", " +
                        std::to_string(j) + ")");
      }
      if (mesh.lengths_[e] != Scalar(-1)) {
        throw MeshError("duplicate edge length for (" + std::to_string(i) + ", " +
                        std::to_string(j) + ")");
      }
      mesh.lengths_[e] = l;
    }
    mesh.check_metric();
    return mesh;
  }

  // Lengths from a callable length(i, j) evaluated once per edge (i < j).
  template <typename LengthFn>
  static SurfaceMesh from_length_function(Index vertex_count, std::vector<Triangle> triangles,
                                          LengthFn&& length) {
    SurfaceMesh mesh(vertex_count, std::move(triangles));
    mesh.lengths_.resize(static_cast<Index>(mesh.edges_.size()));
    for (std::size_t e = 0; e < mesh.edges_.size(); ++e) {
      mesh.lengths_[static_cast<Index>(e)] = length(mesh.edges_[e].a, mesh.edges_[e].b);
    }
    mesh.check_metric();
    return mesh;
  }

  Index vertex_count() const noexcept { return vertex_count_; }
  Index triangle_count() const noexcept { return static_cast<Index>(triangles_.size()); }
  Index edge_count() const noexcept { return static_cast<Index>(edges_.size()); }

  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Vector<Scalar>& edge_lengths() const noexcept { return lengths_; }
  const std::optional<Positions>& positions() const noexcept { return positions_; }

  // Index of the edge opposite corner c of triangle t.
  Index opposite_edge(Index t, int c) const { return triangle_edges_[static_cast<std::size_t>(t)][c]; }
  Scalar opposite_length(Index t, int c) const { return lengths_[opposite_edge(t, c)]; }

  // Number of triangles incident to edge e: 1 on the boundary, 2 inside.
  int edge_face_count(Index e) const { return edge_faces_[static_cast<std::size_t>(e)]; }
  bool is_boundary_edge(Index e) const { return edge_face_count(e) == 1; }
  bool is_boundary_vertex(Index v) const { return boundary_vertex_[static_cast<std::size_t>(v)]; }

  // Edge index for the unordered pair {i, j}, or -1.
  Index find_edge(Index i, Index j) const {
    if (i > j) std::swap(i, j);
    const auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{i, j}, edge_less);
    if (it == edges_.end() || it->a != i || it->b != j) return -1;
    return static_cast<Index>(it - edges_.begin());
  }

  Scalar edge_length(Index i, Index j) const {
    const Index e = find_edge(i, j);
    if (e < 0) throw MeshError("not an edge");
    return lengths_[e];
  }

  // Same connectivity, every length multiplied by c > 0.
  SurfaceMesh scaled(Scalar c) const {
    if (!(c > Scalar(0))) throw DomainError("metric scale must be positive");
    SurfaceMesh out = *this;
    out.lengths_ *= c;
    if (out.positions_) *out.positions_ *= c;
    return out;
  }

  // Same connectivity with a replacement metric; positions are dropped.
  SurfaceMesh with_edge_lengths(Vector<Scalar> lengths) const {
    if (lengths.size() != edge_count()) throw MeshError("edge length count mismatch");
    SurfaceMesh out = *this;
    out.lengths_ = std::move(lengths);
    out.positions_.reset();
    out.check_metric();
    return out;
  }

 private:
  SurfaceMesh(Index vertex_count, std::vector<Triangle> triangles)
      : vertex_count_(vertex_count), triangles_(std::move(triangles)) {
    build_connectivity();
  }

  static bool edge_less(const Edge& x, const Edge& y) {
    return x.a < y.a || (x.a == y.a && x.b < y.b);
  }

  void build_connectivity() {
    if (vertex_count_ < 3) throw MeshError("a surface mesh needs at least 3 vertices");
    if (triangles_.empty()) throw MeshError("a surface mesh needs at least one triangle");

    struct HalfEdge {
      Index a, b;  // undirected key, a < b
      Index tri;
      int corner;  // corner opposite the edge
      bool forward;  // traversed a -> b by its triangle
    };
    std::vector<HalfEdge> half;
    half.reserve(triangles_.size() * 3);
    std::vector<bool> used(static_cast<std::size_t>(vertex_count_), false);
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      const Triangle& tri = triangles_[t];
      for (int c = 0; c < 3; ++c) {
        if (tri[c] < 0 || tri[c] >= vertex_count_) throw MeshError("triangle index out of range");
        used[static_cast<std::size_t>(tri[c])] = true;
      }
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
        throw MeshError("degenerate triangle with repeated vertex");
      }
      for (int c = 0; c < 3; ++c) {
        const Index u = tri[(c + 1) % 3];
        const Index v = tri[(c + 2) % 3];
        half.push_back({std::min(u, v), std::max(u, v), static_cast<Index>(t), c, u < v});
      }
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
      throw MeshError("isolated vertex not referenced by any triangle");
    }
    std::sort(half.begin(), half.end(), [](const HalfEdge& x, const HalfEdge& y) {
      if (x.a != y.a) return x.a < y.a;
      if (x.b != y.b) return x.b < y.b;
      return x.tri < y.tri;
    });

    triangle_edges_.assign(triangles_.size(), {Index(-1), Index(-1), Index(-1)});
    boundary_vertex_.assign(static_cast<std::size_t>(vertex_count_), false);
    detail::DisjointSets components(static_cast<Index>(triangles_.size()));
    for (std::size_t i = 0; i < half.size();) {
      std::size_t j = i;
      while (j < half.size() && half[j].a == half[i].a && half[j].b == half[i].b) ++j;
      const std::size_t count = j - i;
      if (count > 2) throw MeshError("non-manifold edge shared by more than two triangles");
      if (count == 2) {
        if (half[i].forward == half[i + 1].forward) {
          throw MeshError("inconsistent orientation across an interior edge");
        }
        components.unite(half[i].tri, half[i + 1].tri);
      } else {
        boundary_vertex_[static_cast<std::size_t>(half[i].a)] = true;
        boundary_vertex_[static_cast<std::size_t>(half[i].b)] = true;
      }
      const Index e = static_cast<Index>(edges_.size());
      edges_.push_back({half[i].a, half[i].b});
      edge_faces_.push_back(static_cast<int>(count));
      for (std::size_t k = i; k < j; ++k) {
        triangle_edges_[static_cast<std::size_t>(half[k].tri)][half[k].corner] = e;
      }
      i = j;
    }
    const Index root = components.find(0);
    for (Index t = 1; t < static_cast<Index>(triangles_.size()); ++t) {
      if (components.find(t) != root) throw MeshError("triangle adjacency graph is disconnected");
    }
  }

  void check_metric() const {
    for (Index e = 0; e < lengths_.size(); ++e) {
      const double l = static_cast<double>(lengths_[e]);
      if (!std::isfinite(l) || !(l > 0.0)) {
        throw MeshError("edge (" + std::to_string(edges_[e].a) + ", " + std::to_string(edges_[e].b) +
                        ") has missing or non-positive length");
      }
    }
    for (Index t = 0; t < triangle_count(); ++t) {
      const Scalar area =
          detail::heron_area(opposite_length(t, 0), opposite_length(t, 1), opposite_length(t, 2));
      if (!(area > Scalar(0))) {
        throw MeshError("triangle " + std::to_string(t) + " violates the strict triangle inequality");
      }
    }
  }

  Index vertex_count_ = 0;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<int> edge_faces_;
  std::vector<std::array<Index, 3>> triangle_edges_;
  std::vector<bool> boundary_vertex_;
  Vector<Scalar> lengths_;
  std::optional<Positions> positions_;
};

using SurfaceMeshd = SurfaceMesh<double>;

// Area of triangle t from its intrinsic edge lengths.
template <typename Scalar>
Scalar triangle_area(const SurfaceMesh<Scalar>& mesh, Index t) {
  return detail::heron_area(mesh.opposite_length(t, 0), mesh.opposite_length(t, 1),
                            mesh.opposite_length(t, 2));
}

template <typename Scalar>
Scalar total_area(const SurfaceMesh<Scalar>& mesh) {
  Scalar sum(0);
  for (Index t = 0; t < mesh.triangle_count(); ++t) sum += triangle_area(mesh, t);
  return sum;
}

// Largest edge length; the mesh size h used by convergence studies.
template <typename Scalar>
Scalar mesh_size(const SurfaceMesh<Scalar>& mesh) {
  return mesh.edge_lengths().maxCoeff();
}

// Boundary components as vertex cycles, each oriented so that the surface
// lies to the left (the direction the incident triangle traverses the edge).
// Loops are listed by smallest starting vertex.
template <typename Scalar>
std::vector<std::vector<Index>> boundary_loops(const SurfaceMesh<Scalar>& mesh) {
  const std::size_t n = static_cast<std::size_t>(mesh.vertex_count());
  std::vector<Index> next(n, -1);
  std::size_t boundary_edges = 0;
  for (Index t = 0; t < mesh.triangle_count(); ++t) {
    const Triangle& tri = mesh.triangles()[static_cast<std::size_t>(t)];
    for (int c = 0; c < 3; ++c) {
      if (!mesh.is_boundary_edge(mesh.opposite_edge(t, c))) continue;
      const Index u = tri[(c + 1) % 3];
      const Index v = tri[(c + 2) % 3];
      if (next[static_cast<std::size_t>(u)] != -1) {
        throw MeshError("pinched boundary at vertex " + std::to_string(u));
      }
      next[static_cast<std::size_t>(u)] = v;
      ++boundary_edges;
    }
  }
  if (boundary_edges == 0) throw DomainError("closed surface: the mesh has no boundary");

  std::vector<std::vector<Index>> loops;
  std::vector<bool> visited(n, false);
  for (std::size_t start = 0; start < n; ++start) {
    if (next[start] == -1 || visited[start]) continue;
    std::vector<Index> loop;
    Index v = static_cast<Index>(start);
    while (!visited[static_cast<std::size_t>(v)]) {
      visited[static_cast<std::size_t>(v)] = true;
      loop.push_back(v);
      v = next[static_cast<std::size_t>(v)];
      if (v == -1) throw MeshError("open boundary chain");
    }
    if (v != static_cast<Index>(start)) throw MeshError("boundary chain does not close");
    loops.push_back(std::move(loop));
  }
  return loops;
}

template <typename Scalar>
Topology topology(const SurfaceMesh<Scalar>& mesh) {
  const auto chi = static_cast<int>(mesh.vertex_count() - mesh.edge_count() + mesh.triangle_count());
  const auto r = static_cast<int>(boundary_loops(mesh).size());
  const int twice_genus = 2 - chi - r;
  if (twice_genus < 0 || twice_genus % 2 != 0) {
    throw MeshError("non-integral genus (chi = " + std::to_string(chi) +
                    ", contours = " + std::to_string(r) + ")");
  }
  return {twice_genus / 2, r, chi};
}

}  // namespace membrane
