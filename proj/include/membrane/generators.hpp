#pragma once

#include <cmath>
#include <concepts>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "membrane/map_sample.hpp"
#include "membrane/mesh.hpp"

namespace membrane {

template <typename Scalar>
struct MappedSurface {
  SurfaceMesh<Scalar> mesh;
  MapSample<Scalar> map;
};

namespace detail {

// Triangulates the band between two concentric vertex rings. Ring vertices
// are contiguous index ranges laid out counter-clockwise from angle 0.
inline void stitch_rings(Index inner_start, Index inner_count, Index outer_start, Index outer_count,
                         std::vector<Triangle>& out) {
  Index i = 0, j = 0;
  while (i < inner_count || j < outer_count) {
    const Index in = inner_start + i % inner_count;
    const Index on = outer_start + j % outer_count;
    const bool advance_inner =
        j == outer_count || (i < inner_count && (i + 1) * outer_count < (j + 1) * inner_count);
    if (advance_inner) {
      out.push_back({in, on, inner_start + (i + 1) % inner_count});
      ++i;
    } else {
      out.push_back({in, on, outer_start + (j + 1) % outer_count});
      ++j;
    }
  }
}

// Polar layout: optional center vertex, then rings[k] vertices on ring k.
struct PolarLayout {
  std::vector<Index> ring_start;
  std::vector<Index> ring_count;
  Index vertex_count = 0;
  std::vector<Triangle> triangles;
};

inline PolarLayout polar_layout(bool with_center, const std::vector<Index>& ring_counts) {
  PolarLayout layout;
  layout.vertex_count = with_center ? 1 : 0;
  for (Index count : ring_counts) {
    layout.ring_start.push_back(layout.vertex_count);
    layout.ring_count.push_back(count);
    layout.vertex_count += count;
  }
  if (with_center) {
    const Index s = layout.ring_start[0], n = layout.ring_count[0];
    for (Index j = 0; j < n; ++j) layout.triangles.push_back({0, s + j, s + (j + 1) % n});
  }
  for (std::size_t k = 1; k < ring_counts.size(); ++k) {
    stitch_rings(layout.ring_start[k - 1], layout.ring_count[k - 1], layout.ring_start[k],
                 layout.ring_count[k], layout.triangles);
  }
  return layout;
}

// Center plus rings of 6k vertices at radius k / rings.
template <typename Scalar>
std::pair<PolarLayout, ComplexVector<Scalar>> unit_disc_points(int rings) {
  std::vector<Index> counts;
  for (int k = 1; k <= rings; ++k) counts.push_back(6 * k);
  PolarLayout layout = polar_layout(true, counts);
  ComplexVector<Scalar> z(layout.vertex_count);
  z[0] = Complex<Scalar>(0, 0);
  for (int k = 1; k <= rings; ++k) {
    const Scalar radius = Scalar(k) / Scalar(rings);
    const Index start = layout.ring_start[static_cast<std::size_t>(k - 1)];
    const Index n = layout.ring_count[static_cast<std::size_t>(k - 1)];
    for (Index j = 0; j < n; ++j) {
      const Scalar angle = Scalar(2) * kPi<Scalar> * Scalar(j) / Scalar(n);
      z[start + j] = std::polar(radius, angle);
    }
  }
  // Exact unit modulus on the rim.
  const Index rim = layout.ring_start.back();
  for (Index v = rim; v < layout.vertex_count; ++v) z[v] /= std::abs(z[v]);
  return {std::move(layout), std::move(z)};
}

template <typename Scalar>
typename SurfaceMesh<Scalar>::Positions planar_positions(const ComplexVector<Scalar>& z) {
  typename SurfaceMesh<Scalar>::Positions p(z.size(), 3);
  for (Index v = 0; v < z.size(); ++v) p.row(v) << z[v].real(), z[v].imag(), Scalar(0);
  return p;
}

}  // namespace detail

// Flat unit disc: a center vertex and `rings` concentric rings, ring k at
// radius k / rings carrying 6k vertices.
template <typename Scalar = double>
SurfaceMesh<Scalar> generate_disc(int rings) {
  if (rings < 1) throw DomainError("generate_disc: rings must be >= 1");
  auto [layout, z] = detail::unit_disc_points<Scalar>(rings);
  return SurfaceMesh<Scalar>::from_positions(detail::planar_positions(z), std::move(layout.triangles));
}

// Polar cap {polar angle <= colatitude} of the unit sphere, `resolution`
// rings evenly spaced in polar angle. colatitude = pi/2 is the hemisphere.
template <typename Scalar = double>
SurfaceMesh<Scalar> generate_spherical_cap(Scalar colatitude, int resolution) {
  if (!(colatitude > Scalar(0) && colatitude < kPi<Scalar>)) {
    throw DomainError("generate_spherical_cap: colatitude must lie in (0, pi)");
  }
  if (resolution < 1) throw DomainError("generate_spherical_cap: resolution must be >= 1");
  std::vector<Index> counts;
  for (int k = 1; k <= resolution; ++k) counts.push_back(6 * k);
  detail::PolarLayout layout = detail::polar_layout(true, counts);
  typename SurfaceMesh<Scalar>::Positions p(layout.vertex_count, 3);
  p.row(0) << Scalar(0), Scalar(0), Scalar(1);
  for (int k = 1; k <= resolution; ++k) {
    const Scalar theta = colatitude * Scalar(k) / Scalar(resolution);
    const Index start = layout.ring_start[static_cast<std::size_t>(k - 1)];
    const Index n = layout.ring_count[static_cast<std::size_t>(k - 1)];
    for (Index j = 0; j < n; ++j) {
      const Scalar phi = Scalar(2) * kPi<Scalar> * Scalar(j) / Scalar(n);
      p.row(start + j) << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta);
    }
  }
  // The equator of the hemisphere lies exactly in x3 = 0.
  if (colatitude == kPi<Scalar> / Scalar(2)) {
    for (Index v = layout.ring_start.back(); v < layout.vertex_count; ++v) {
      p(v, 2) = Scalar(0);
      p.row(v).template head<2>().normalize();
    }
  }
  return SurfaceMesh<Scalar>::from_positions(std::move(p), std::move(layout.triangles));
}

template <typename Scalar = double>
SurfaceMesh<Scalar> generate_hemisphere(int resolution) {
  return generate_spherical_cap<Scalar>(kPi<Scalar> / Scalar(2), resolution);
}

// Flat annulus inner_radius <= |z| <= 1 with `resolution` radial layers and
// near-isotropic spacing along each ring.
template <typename Scalar = double>
SurfaceMesh<Scalar> generate_annulus(Scalar inner_radius, int resolution) {
  if (!(inner_radius > Scalar(0) && inner_radius < Scalar(1))) {
    throw DomainError("generate_annulus: inner_radius must lie in (0, 1)");
  }
  if (resolution < 1) throw DomainError("generate_annulus: resolution must be >= 1");
  const Scalar dr = (Scalar(1) - inner_radius) / Scalar(resolution);
  std::vector<Index> counts;
  std::vector<Scalar> radii;
  for (int k = 0; k <= resolution; ++k) {
    const Scalar r = inner_radius + dr * Scalar(k);
    radii.push_back(r);
    const auto n = static_cast<Index>(std::ceil(Scalar(2) * kPi<Scalar> * r / dr));
    counts.push_back(std::max<Index>(6, n));
  }
  detail::PolarLayout layout = detail::polar_layout(false, counts);
  typename SurfaceMesh<Scalar>::Positions p(layout.vertex_count, 3);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    for (Index j = 0; j < layout.ring_count[k]; ++j) {
      const Scalar phi = Scalar(2) * kPi<Scalar> * Scalar(j) / Scalar(layout.ring_count[k]);
      p.row(layout.ring_start[k] + j) << radii[k] * std::cos(phi), radii[k] * std::sin(phi), Scalar(0);
    }
  }
  return SurfaceMesh<Scalar>::from_positions(std::move(p), std::move(layout.triangles));
}

// Unit square [0,1]^2 split into 2 n^2 right triangles.
template <typename Scalar = double>
SurfaceMesh<Scalar> generate_square(int n) {
  if (n < 1) throw DomainError("generate_square: n must be >= 1");
  const Index side = n + 1;
  typename SurfaceMesh<Scalar>::Positions p(side * side, 3);
  for (Index j = 0; j < side; ++j) {
    for (Index i = 0; i < side; ++i) p.row(j * side + i) << Scalar(i) / n, Scalar(j) / n, Scalar(0);
  }
  std::vector<Triangle> tris;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Index v = j * side + i;
      tris.push_back({v, v + 1, v + side + 1});
      tris.push_back({v, v + side + 1, v + side});
    }
  }
  return SurfaceMesh<Scalar>::from_positions(std::move(p), std::move(tris));
}

// Disc connectivity carrying the metric pulled back through w = z^2, i.e.
// the length element 2|z||dz|. z^2 is a local isometry onto the flat w-plane
// away from the cone point, so each edge gets its chord length |z_u^2 - z_v^2|.
// The origin becomes a cone point of total angle 4 pi. Returned with the map
// f(z) = z^2 of degree 2.
template <typename Scalar = double>
MappedSurface<Scalar> generate_branched_double_disc(int rings) {
  if (rings < 2) throw DomainError("generate_branched_double_disc: rings must be >= 2");
  auto [layout, z] = detail::unit_disc_points<Scalar>(rings);
  ComplexVector<Scalar> w = z.array().square();
  auto mesh = SurfaceMesh<Scalar>::from_length_function(
      layout.vertex_count, std::move(layout.triangles),
      [&](Index a, Index b) { return std::abs(w[a] - w[b]); });
  return {std::move(mesh), MapSample<Scalar>{std::move(w), 2}};
}

// Disc with metric e^{2 phi}|dz|^2: flat disc edge lengths scaled by
// exp((phi_u + phi_v) / 2). `phi` holds one sample per vertex of
// generate_disc(rings). The map is the identity, degree 1.
template <typename Scalar = double>
MappedSurface<Scalar> generate_conformal_disc(int rings, const Vector<Scalar>& phi) {
  if (rings < 1) throw DomainError("generate_conformal_disc: rings must be >= 1");
  auto [layout, z] = detail::unit_disc_points<Scalar>(rings);
  if (phi.size() != layout.vertex_count) {
    throw DomainError("generate_conformal_disc: expected " + std::to_string(layout.vertex_count) +
                      " log-factor samples, got " + std::to_string(phi.size()));
  }
  for (Index v = 0; v < phi.size(); ++v) {
    if (!std::isfinite(static_cast<double>(phi[v]))) {
      throw DomainError("generate_conformal_disc: non-finite log-factor sample");
    }
  }
  auto mesh = SurfaceMesh<Scalar>::from_length_function(
      layout.vertex_count, std::move(layout.triangles), [&](Index a, Index b) {
        return std::abs(z[a] - z[b]) * std::exp((phi[a] + phi[b]) / Scalar(2));
      });
  return {std::move(mesh), MapSample<Scalar>{std::move(z), 1}};
}

// Convenience overload sampling phi(z) at the disc vertices.
template <typename Scalar = double, typename LogFactor>
  requires(std::is_invocable_r_v<Scalar, LogFactor, Complex<Scalar>> &&
           !std::is_base_of_v<Eigen::EigenBase<std::decay_t<LogFactor>>, std::decay_t<LogFactor>>)
MappedSurface<Scalar> generate_conformal_disc(int rings, LogFactor&& log_factor) {
  if (rings < 1) throw DomainError("generate_conformal_disc: rings must be >= 1");
  const auto z = detail::unit_disc_points<Scalar>(rings).second;
  Vector<Scalar> phi(z.size());
  for (Index v = 0; v < z.size(); ++v) phi[v] = static_cast<Scalar>(log_factor(z[v]));
  return generate_conformal_disc<Scalar>(rings, phi);
}

// Vertex positions z of generate_disc(rings) as complex numbers.
template <typename Scalar = double>
ComplexVector<Scalar> disc_vertex_points(int rings) {
  if (rings < 1) throw DomainError("disc_vertex_points: rings must be >= 1");
  return detail::unit_disc_points<Scalar>(rings).second;
}

}  // namespace membrane
