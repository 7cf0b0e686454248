#pragma once

#include <complex>
#include <type_traits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace membrane {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar>;

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

// Read-only vector argument; Scalar is never deduced from it.
template <typename Scalar>
using VectorRef = std::type_identity_t<const Eigen::Ref<const Vector<Scalar>>>;

template <typename Scalar>
inline constexpr Scalar kPi = Scalar(3.14159265358979323846264338327950288L);

// Error hierarchy. Every failure raised by the library derives from Error so
// front ends can map it to one exit path.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Malformed mesh: bad indices, non-manifold edges, triangle inequality, ...
class MeshError : public Error {
 public:
  explicit MeshError(const std::string& what) : Error("mesh", what) {}
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

// Eigensolver failure; carries the worst residual reached.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error("solver", what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Balancing root find failed; carries the best residual found.
class BalanceError : public Error {
 public:
  BalanceError(const std::string& what, double best_residual)
      : Error("balance", what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace membrane
