#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "membrane/types.hpp"

namespace membrane {

enum class EigenMethod {
  automatic,     // dense up to EigenOptions::dense_limit dofs, shift-invert above
  dense,         // Cholesky reduction of M + tridiagonal QL
  shift_invert,  // subspace iteration with a sparse LDL^T of K - sigma M
};

struct EigenOptions {
  EigenMethod method = EigenMethod::automatic;
  Index dense_limit = 400;
  // Target for ||K u - lambda M u|| / ||M u|| on every returned pair.
  double tolerance = 1e-10;
  // Pairs failing this bound are reported as a solver error.
  double acceptance = 1e-8;
  int max_iterations = 500;
  unsigned seed = 20240611u;
};

template <typename Scalar>
struct EigenPairs {
  Vector<Scalar> values;    // ascending
  Matrix<Scalar> vectors;   // M-orthonormal columns
  Vector<Scalar> residuals; // relative residual per pair
  int iterations = 0;
  EigenMethod method = EigenMethod::dense;
};

template <typename Scalar>
Scalar relative_residual(const SparseMatrix<Scalar>& K, const SparseMatrix<Scalar>& M,
                         VectorRef<Scalar>& u, Scalar lambda) {
  const Vector<Scalar> Mu = M * u;
  const Scalar denom = Mu.norm();
  if (!(denom > Scalar(0))) return std::numeric_limits<Scalar>::infinity();
  return (K * u - lambda * Mu).norm() / denom;
}

namespace detail {

// Deterministic sign: the entry of largest magnitude (first on ties) is
// made positive.
template <typename Scalar>
void fix_signs(Matrix<Scalar>& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index arg = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, j) < Scalar(0)) vectors.col(j) *= Scalar(-1);
  }
}

template <typename Scalar>
void fill_residuals(const SparseMatrix<Scalar>& K, const SparseMatrix<Scalar>& M, EigenPairs<Scalar>& pairs) {
  pairs.residuals.resize(pairs.values.size());
  for (Index j = 0; j < pairs.values.size(); ++j) {
    pairs.residuals[j] = relative_residual<Scalar>(K, M, pairs.vectors.col(j), pairs.values[j]);
  }
}

template <typename Scalar>
EigenPairs<Scalar> dense_eigenpairs(const SparseMatrix<Scalar>& K, const SparseMatrix<Scalar>& M, Index count) {
  const Matrix<Scalar> Kd(K);
  const Matrix<Scalar> Md(M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix<Scalar>> solver(Kd, Md,
                                                                  Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    throw SolverError("dense generalized eigensolver failed (mass matrix not positive definite?)",
                      std::numeric_limits<double>::infinity());
  }
  EigenPairs<Scalar> out;
  out.method = EigenMethod::dense;
  out.values = solver.eigenvalues().head(count);
  out.vectors = solver.eigenvectors().leftCols(count);
  return out;
}

// Block subspace iteration on (K - sigma M)^{-1} M with Rayleigh-Ritz
// projection after every sweep.
template <typename Scalar>
EigenPairs<Scalar> shift_invert_eigenpairs(const SparseMatrix<Scalar>& K, const SparseMatrix<Scalar>& M,
                                           Index count, Scalar shift, const EigenOptions& options) {
  const Index n = K.rows();
  const Index block = std::min(n, std::max<Index>(2 * count, count + 8));

  SparseMatrix<Scalar> shifted = K - shift * M;
  Eigen::SimplicialLDLT<SparseMatrix<Scalar>> factor(shifted);
  if (factor.info() != Eigen::Success) {
    throw SolverError("sparse factorization of the shifted operator failed",
                      std::numeric_limits<double>::infinity());
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Matrix<Scalar> X(n, block);
  for (Index j = 0; j < block; ++j) {
    for (Index i = 0; i < n; ++i) X(i, j) = static_cast<Scalar>(uniform(rng));
  }

  EigenPairs<Scalar> out;
  out.method = EigenMethod::shift_invert;
  Scalar worst = std::numeric_limits<Scalar>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Matrix<Scalar> Y = factor.solve(M * X);
    Matrix<Scalar> A = Y.transpose() * (K * Y);
    Matrix<Scalar> B = Y.transpose() * (M * Y);
    A = Scalar(0.5) * (A + A.transpose()).eval();
    B = Scalar(0.5) * (B + B.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix<Scalar>> ritz(A, B, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (ritz.info() != Eigen::Success) {
      throw SolverError("Rayleigh-Ritz projection lost rank", static_cast<double>(worst));
    }
    X = Y * ritz.eigenvectors();
    out.values = ritz.eigenvalues().head(count);
    out.vectors = X.leftCols(count);
    out.iterations = it;
    fill_residuals(K, M, out);
    worst = out.residuals.maxCoeff();
    if (worst <= Scalar(options.tolerance)) break;
  }
  return out;
}

}  // namespace detail

// The `count` smallest eigenpairs of K u = lambda M u for symmetric K >= 0 and
// M > 0. `shift` must lie below the spectrum so that K - shift M is positive
// definite; it is used only by the shift-invert path.
template <typename Scalar>
EigenPairs<Scalar> smallest_eigenpairs(const SparseMatrix<Scalar>& K, const SparseMatrix<Scalar>& M, Index count,
                                       Scalar shift = Scalar(0), const EigenOptions& options = {}) {
  const Index n = K.rows();
  if (K.cols() != n || M.rows() != n || M.cols() != n) throw DomainError("operator size mismatch");
  if (count < 1 || count > n) {
    throw DomainError("requested " + std::to_string(count) + " eigenpairs from " + std::to_string(n) + " dofs");
  }
  EigenMethod method = options.method;
  if (method == EigenMethod::automatic) {
    method = n <= options.dense_limit ? EigenMethod::dense : EigenMethod::shift_invert;
  }
  EigenPairs<Scalar> pairs = method == EigenMethod::dense
                                 ? detail::dense_eigenpairs(K, M, count)
                                 : detail::shift_invert_eigenpairs(K, M, count, shift, options);
  detail::fix_signs(pairs.vectors);
  detail::fill_residuals(K, M, pairs);
  const Scalar worst = pairs.residuals.maxCoeff();
  if (!(worst <= Scalar(options.acceptance))) {
    throw SolverError("eigensolver did not converge: worst relative residual " +
                          std::to_string(static_cast<double>(worst)),
                      static_cast<double>(worst));
  }
  return pairs;
}

}  // namespace membrane
