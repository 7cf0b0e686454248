#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "membrane/eigensolver.hpp"
#include "membrane/mesh.hpp"

namespace membrane {

enum class BoundaryCondition { dirichlet, neumann };
enum class MassKind { consistent, lumped };

inline const char* to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::dirichlet ? "dirichlet" : "neumann";
}

struct FemOptions {
  MassKind mass = MassKind::consistent;
  EigenOptions eigen;
};

template <typename Scalar>
struct SpectralResult {
  BoundaryCondition boundary_condition = BoundaryCondition::dirichlet;
  Vector<Scalar> eigenvalues;     // ascending; the Neumann zero mode is excluded
  Matrix<Scalar> eigenfunctions;  // one M-normalized column per eigenvalue, all vertices
  Vector<Scalar> residuals;
  // Neumann only: the excluded near-zero eigenvalue and its distance to mu_1.
  std::optional<Scalar> zero_mode;
  std::optional<Scalar> zero_mode_gap;
  EigenMethod method = EigenMethod::dense;
  std::string mesh_id;
};

// Cotangents of the three corner angles of triangle t, from edge lengths
// through the law of cosines: cot(c) = (l_{c+1}^2 + l_{c+2}^2 - l_c^2) / (4 T).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> corner_cotangents(const SurfaceMesh<Scalar>& mesh, Index t) {
  Eigen::Matrix<Scalar, 3, 1> sq;
  for (int c = 0; c < 3; ++c) sq[c] = mesh.opposite_length(t, c) * mesh.opposite_length(t, c);
  const Scalar area = triangle_area(mesh, t);
  if (!(area > Scalar(0))) throw MeshError("triangle " + std::to_string(t) + " violates the triangle inequality");
  Eigen::Matrix<Scalar, 3, 1> cot;
  for (int c = 0; c < 3; ++c) cot[c] = (sq[(c + 1) % 3] + sq[(c + 2) % 3] - sq[c]) / (Scalar(4) * area);
  return cot;
}

// P1 stiffness (cotangent Laplacian): u^T K u is the Dirichlet energy of the
// piecewise-linear interpolant of u.
template <typename Scalar>
SparseMatrix<Scalar> assemble_stiffness(const SurfaceMesh<Scalar>& mesh) {
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 9);
  for (Index t = 0; t < mesh.triangle_count(); ++t) {
    const Triangle& tri = mesh.triangles()[static_cast<std::size_t>(t)];
    const auto cot = corner_cotangents(mesh, t);
    for (int c = 0; c < 3; ++c) {
      const Index i = tri[(c + 1) % 3];
      const Index j = tri[(c + 2) % 3];
      const Scalar w = cot[c] / Scalar(2);
      triplets.emplace_back(i, j, -w);
      triplets.emplace_back(j, i, -w);
      triplets.emplace_back(i, i, w);
      triplets.emplace_back(j, j, w);
    }
  }
  SparseMatrix<Scalar> K(mesh.vertex_count(), mesh.vertex_count());
  K.setFromTriplets(triplets.begin(), triplets.end());
  return K;
}

// P1 mass matrix. Consistent: (T/12)[[2,1,1],[1,2,1],[1,1,2]] per triangle.
// Lumped: T/3 on the diagonal.
template <typename Scalar>
SparseMatrix<Scalar> assemble_mass(const SurfaceMesh<Scalar>& mesh, MassKind kind = MassKind::consistent) {
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 9);
  for (Index t = 0; t < mesh.triangle_count(); ++t) {
    const Triangle& tri = mesh.triangles()[static_cast<std::size_t>(t)];
    const Scalar area = triangle_area(mesh, t);
    for (int a = 0; a < 3; ++a) {
      if (kind == MassKind::lumped) {
        triplets.emplace_back(tri[a], tri[a], area / Scalar(3));
        continue;
      }
      for (int b = 0; b < 3; ++b) {
        triplets.emplace_back(tri[a], tri[b], area * (a == b ? Scalar(2) : Scalar(1)) / Scalar(12));
      }
    }
  }
  SparseMatrix<Scalar> M(mesh.vertex_count(), mesh.vertex_count());
  M.setFromTriplets(triplets.begin(), triplets.end());
  return M;
}

template <typename Scalar>
struct FemOperators {
  SparseMatrix<Scalar> stiffness;
  SparseMatrix<Scalar> mass;
};

template <typename Scalar>
FemOperators<Scalar> assemble(const SurfaceMesh<Scalar>& mesh, MassKind kind = MassKind::consistent) {
  return {assemble_stiffness(mesh), assemble_mass(mesh, kind)};
}

template <typename Scalar>
Scalar rayleigh_quotient(const SparseMatrix<Scalar>& K, const SparseMatrix<Scalar>& M,
                         VectorRef<Scalar>& u) {
  const Scalar denom = u.dot(M * u);
  if (!(denom > Scalar(0))) throw DomainError("Rayleigh quotient of a function with zero L2 norm");
  return u.dot(K * u) / denom;
}

template <typename Scalar>
Scalar rayleigh_quotient(const SurfaceMesh<Scalar>& mesh, VectorRef<Scalar>& u) {
  if (u.size() != mesh.vertex_count()) throw DomainError("function size does not match the mesh");
  return rayleigh_quotient<Scalar>(assemble_stiffness(mesh), assemble_mass(mesh), u);
}

namespace detail {

// Principal submatrix on the listed rows/columns. `slot` maps a vertex to its
// position in `keep`, or -1.
template <typename Scalar>
SparseMatrix<Scalar> principal_submatrix(const SparseMatrix<Scalar>& A, const std::vector<Index>& keep,
                                         const std::vector<Index>& slot) {
  std::vector<Eigen::Triplet<Scalar>> triplets;
  for (Index col = 0; col < A.outerSize(); ++col) {
    for (typename SparseMatrix<Scalar>::InnerIterator it(A, col); it; ++it) {
      const Index r = slot[static_cast<std::size_t>(it.row())];
      const Index c = slot[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  }
  const auto n = static_cast<Index>(keep.size());
  SparseMatrix<Scalar> out(n, n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

// Typical eigenvalue magnitude; sets scale-aware shifts and thresholds.
template <typename Scalar>
Scalar spectral_scale(const SparseMatrix<Scalar>& K, const SparseMatrix<Scalar>& M) {
  return K.diagonal().sum() / M.diagonal().sum();
}

}  // namespace detail

template <typename Scalar>
SpectralResult<Scalar> solve_dirichlet(const FemOperators<Scalar>& ops, const std::vector<bool>& is_boundary,
                                       Index k, const FemOptions& options = {}) {
  if (k < 1) throw DomainError("solve_dirichlet: k must be >= 1");
  const Index n = ops.stiffness.rows();
  std::vector<Index> interior;
  std::vector<Index> slot(static_cast<std::size_t>(n), -1);
  for (Index v = 0; v < n; ++v) {
    if (!is_boundary[static_cast<std::size_t>(v)]) {
      slot[static_cast<std::size_t>(v)] = static_cast<Index>(interior.size());
      interior.push_back(v);
    }
  }
  if (static_cast<Index>(interior.size()) < k) {
    throw DomainError("solve_dirichlet: " + std::to_string(interior.size()) + " interior dofs < k = " +
                      std::to_string(k));
  }
  const SparseMatrix<Scalar> K = detail::principal_submatrix(ops.stiffness, interior, slot);
  const SparseMatrix<Scalar> M = detail::principal_submatrix(ops.mass, interior, slot);
  const EigenPairs<Scalar> pairs = smallest_eigenpairs<Scalar>(K, M, k, Scalar(0), options.eigen);

  SpectralResult<Scalar> out;
  out.boundary_condition = BoundaryCondition::dirichlet;
  out.eigenvalues = pairs.values;
  out.residuals = pairs.residuals;
  out.method = pairs.method;
  out.eigenfunctions = Matrix<Scalar>::Zero(n, k);
  for (std::size_t i = 0; i < interior.size(); ++i) {
    out.eigenfunctions.row(interior[i]) = pairs.vectors.row(static_cast<Index>(i));
  }
  return out;
}

template <typename Scalar>
SpectralResult<Scalar> solve_dirichlet(const SurfaceMesh<Scalar>& mesh, Index k, const FemOptions& options = {}) {
  std::vector<bool> boundary(static_cast<std::size_t>(mesh.vertex_count()));
  for (Index v = 0; v < mesh.vertex_count(); ++v) boundary[static_cast<std::size_t>(v)] = mesh.is_boundary_vertex(v);
  return solve_dirichlet(assemble(mesh, options.mass), boundary, k, options);
}

// Free-membrane problem on the full vertex set. The constant mode is
// identified as the eigenvalues below 1e-8 mu_ref, where mu_ref is the
// smallest computed eigenvalue above 1e-12 times the spectral scale; exactly
// one such mode must exist.
template <typename Scalar>
SpectralResult<Scalar> solve_neumann(const FemOperators<Scalar>& ops, Index k, const FemOptions& options = {}) {
  if (k < 1) throw DomainError("solve_neumann: k must be >= 1");
  const SparseMatrix<Scalar>& K = ops.stiffness;
  const SparseMatrix<Scalar>& M = ops.mass;
  const Index n = K.rows();
  if (k + 1 > n) throw DomainError("solve_neumann: k + 1 exceeds the number of dofs");
  const Scalar scale = detail::spectral_scale(K, M);
  const EigenPairs<Scalar> pairs = smallest_eigenpairs<Scalar>(K, M, k + 1, Scalar(-1e-6) * scale, options.eigen);

  const Scalar floor = Scalar(1e-12) * scale;
  Index ref = -1;
  for (Index j = 0; j < pairs.values.size(); ++j) {
    if (pairs.values[j] > floor) {
      ref = j;
      break;
    }
  }
  if (ref < 0) throw SolverError("solve_neumann: no nonzero eigenvalue found; mesh is disconnected", 0.0);
  const Scalar mu_ref = pairs.values[ref];
  Index zeros = 0;
  for (Index j = 0; j < pairs.values.size(); ++j) {
    if (pairs.values[j] < Scalar(1e-8) * mu_ref) ++zeros;
  }
  if (zeros > 1) {
    throw SolverError("solve_neumann: " + std::to_string(zeros) +
                          " numerically zero modes; mesh is disconnected",
                      0.0);
  }
  if (zeros == 0) throw SolverError("solve_neumann: constant mode not found", 0.0);

  // Project the returned modes onto the zero-mean subspace exactly; the
  // constant lies in the kernel of K so this only touches round-off.
  const Vector<Scalar> weights = M * Vector<Scalar>::Ones(n);
  const Scalar total = weights.sum();
  SpectralResult<Scalar> out;
  out.boundary_condition = BoundaryCondition::neumann;
  out.method = pairs.method;
  out.zero_mode = pairs.values[0];
  out.zero_mode_gap = pairs.values[1] - std::abs(pairs.values[0]);
  out.eigenvalues = pairs.values.segment(1, k);
  out.eigenfunctions = pairs.vectors.middleCols(1, k);
  out.residuals.resize(k);
  for (Index j = 0; j < k; ++j) {
    auto u = out.eigenfunctions.col(j);
    u.array() -= weights.dot(u) / total;
    u /= std::sqrt(u.dot(M * u));
    out.residuals[j] = relative_residual<Scalar>(K, M, u, out.eigenvalues[j]);
  }
  return out;
}

template <typename Scalar>
SpectralResult<Scalar> solve_neumann(const SurfaceMesh<Scalar>& mesh, Index k, const FemOptions& options = {}) {
  return solve_neumann(assemble(mesh, options.mass), k, options);
}

}  // namespace membrane
