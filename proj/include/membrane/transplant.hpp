#pragma once

#include <cmath>
#include <string>

#include "membrane/fem.hpp"
#include "membrane/map_sample.hpp"
#include "membrane/mesh.hpp"

namespace membrane {

// Vertex samples of the sphere coordinates pulled back to the surface.
template <typename Scalar>
struct SphereFunctions {
  Vector<Scalar> x1;
  Vector<Scalar> x2;
  Vector<Scalar> x3;
};

inline constexpr double kDiscSlack = 1e-9;       // |z| admitted by the lift
inline constexpr double kProperTolerance = 1e-6; // | 1 - |f| | on the boundary
inline constexpr double kDegreeTolerance = 0.05; // | estimate - round(estimate) |

// Inverse stereographic projection from the south pole: the closed unit disc
// onto the closed northern hemisphere, the unit circle onto the equator.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> lift_to_hemisphere(Complex<Scalar> z) {
  const Scalar r2 = std::norm(z);
  if (!(r2 <= Scalar(1 + kDiscSlack) * Scalar(1 + kDiscSlack))) {
    throw DomainError("lift_to_hemisphere: |z| exceeds 1");
  }
  if (r2 > Scalar(1)) {
    z /= std::sqrt(r2);
    return {z.real(), z.imag(), Scalar(0)};
  }
  const Scalar denom = Scalar(1) + r2;
  return {Scalar(2) * z.real() / denom, Scalar(2) * z.imag() / denom, (Scalar(1) - r2) / denom};
}

// Disc automorphism T_a(z) = (z - a) / (1 - conj(a) z), sending a to 0.
template <typename Scalar>
Complex<Scalar> mobius(Complex<Scalar> a, Complex<Scalar> z) {
  if (!(std::abs(a) < Scalar(1))) throw DomainError("mobius: |a| must be < 1");
  return (z - a) / (Scalar(1) - std::conj(a) * z);
}

// x_i o T_a o f at every vertex. Boundary images are projected radially onto
// the unit circle, so x3 vanishes there exactly.
template <typename Scalar>
SphereFunctions<Scalar> transplant_coords(const SurfaceMesh<Scalar>& mesh, const MapSample<Scalar>& f,
                                          Complex<Scalar> a = {}) {
  const Index n = mesh.vertex_count();
  if (f.values.size() != n) throw DomainError("transplant_coords: map size does not match the mesh");
  if (!(std::abs(a) < Scalar(1))) throw DomainError("transplant_coords: |a| must be < 1");
  SphereFunctions<Scalar> out{Vector<Scalar>(n), Vector<Scalar>(n), Vector<Scalar>(n)};
  for (Index v = 0; v < n; ++v) {
    Complex<Scalar> w = f.values[v];
    if (mesh.is_boundary_vertex(v)) {
      const Scalar r = std::abs(w);
      if (!(r > Scalar(0))) throw DomainError("transplant_coords: boundary vertex maps to the origin");
      const Complex<Scalar> z = mobius(a, w / r);
      const Scalar rz = std::abs(z);
      out.x1[v] = z.real() / rz;
      out.x2[v] = z.imag() / rz;
      out.x3[v] = Scalar(0);
      continue;
    }
    if (std::abs(w) > Scalar(1 + kDiscSlack)) throw DomainError("transplant_coords: map leaves the unit disc");
    const auto x = lift_to_hemisphere(mobius(a, w));
    out.x1[v] = x[0];
    out.x2[v] = x[1];
    out.x3[v] = x[2];
  }
  return out;
}

template <typename Scalar>
Scalar dirichlet_energy(const SparseMatrix<Scalar>& K, VectorRef<Scalar>& u) {
  return u.dot(K * u);
}

template <typename Scalar>
Scalar dirichlet_energy(const SurfaceMesh<Scalar>& mesh, VectorRef<Scalar>& u) {
  if (u.size() != mesh.vertex_count()) throw DomainError("function size does not match the mesh");
  return dirichlet_energy<Scalar>(assemble_stiffness(mesh), u);
}

// Throws unless every boundary vertex maps within kProperTolerance of the
// unit circle.
template <typename Scalar>
void require_proper(const SurfaceMesh<Scalar>& mesh, const ComplexVector<Scalar>& f) {
  if (f.size() != mesh.vertex_count()) throw DomainError("map size does not match the mesh");
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_boundary_vertex(v) && std::abs(Scalar(1) - std::abs(f[v])) > Scalar(kProperTolerance)) {
      throw DomainError("map is not proper: boundary vertex " + std::to_string(v) + " has |f| = " +
                        std::to_string(static_cast<double>(std::abs(f[v]))));
    }
  }
}

// (1/pi) times the area swept by f: signed areas of the image triangles plus,
// for each boundary edge, the circular segment between its image chord and
// the unit circle. Exact for maps that are piecewise linear on the mesh and
// send the boundary to the circle.
template <typename Scalar>
Scalar degree_estimate(const SurfaceMesh<Scalar>& mesh, const ComplexVector<Scalar>& f) {
  require_proper(mesh, f);
  Scalar swept(0);
  for (Index t = 0; t < mesh.triangle_count(); ++t) {
    const Triangle& tri = mesh.triangles()[static_cast<std::size_t>(t)];
    const Complex<Scalar> e1 = f[tri[1]] - f[tri[0]];
    const Complex<Scalar> e2 = f[tri[2]] - f[tri[0]];
    swept += (e1.real() * e2.imag() - e1.imag() * e2.real()) / Scalar(2);
    for (int c = 0; c < 3; ++c) {
      if (!mesh.is_boundary_edge(mesh.opposite_edge(t, c))) continue;
      const Complex<Scalar> from = f[tri[(c + 1) % 3]];
      const Complex<Scalar> to = f[tri[(c + 2) % 3]];
      const Scalar angle = std::arg(to / from);
      swept += (angle - std::sin(angle)) / Scalar(2);
    }
  }
  return swept / kPi<Scalar>;
}

template <typename Scalar>
int compute_degree(const SurfaceMesh<Scalar>& mesh, const ComplexVector<Scalar>& f) {
  const Scalar estimate = degree_estimate(mesh, f);
  const Scalar rounded = std::round(estimate);
  if (std::abs(estimate - rounded) >= Scalar(kDegreeTolerance) || rounded < Scalar(1)) {
    throw DomainError("non-integral degree estimate " + std::to_string(static_cast<double>(estimate)));
  }
  return static_cast<int>(rounded);
}

// f = x + i y for a planar mesh; degree 1 when the mesh is the unit disc.
template <typename Scalar>
MapSample<Scalar> identity_map(const SurfaceMesh<Scalar>& mesh) {
  if (!mesh.positions()) throw DomainError("identity_map: mesh has no positions");
  const auto& p = *mesh.positions();
  MapSample<Scalar> f;
  f.values.resize(mesh.vertex_count());
  for (Index v = 0; v < mesh.vertex_count(); ++v) f.values[v] = {p(v, 0), p(v, 1)};
  return f;
}

// Stereographic projection (x1 + i x2) / (1 + x3) of a mesh on the unit
// sphere, rescaled so that the boundary lands on the unit circle. For a polar
// cap this is a conformal degree-1 map onto the disc.
template <typename Scalar>
MapSample<Scalar> stereographic_map(const SurfaceMesh<Scalar>& mesh) {
  if (!mesh.positions()) throw DomainError("stereographic_map: mesh has no positions");
  const auto& p = *mesh.positions();
  MapSample<Scalar> f;
  f.values.resize(mesh.vertex_count());
  Scalar rim(0);
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    const Scalar denom = Scalar(1) + p(v, 2);
    if (!(denom > Scalar(0))) throw DomainError("stereographic_map: vertex at the south pole");
    f.values[v] = {p(v, 0) / denom, p(v, 1) / denom};
    if (mesh.is_boundary_vertex(v)) rim = std::max(rim, std::abs(f.values[v]));
  }
  f.values /= rim;
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_boundary_vertex(v)) f.values[v] /= std::abs(f.values[v]);
  }
  return f;
}

}  // namespace membrane
