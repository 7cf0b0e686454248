#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "membrane/transplant.hpp"

namespace membrane {

template <typename Scalar>
struct BalanceResult {
  Complex<Scalar> a;
  Scalar residual = 0;  // |G(a)|, in area units
  int iterations = 0;
  bool used_fallback = false;
};

struct BalanceOptions {
  double relative_tolerance = 1e-10;  // |G| <= tol * area
  double fd_step = 1e-6;
  double max_radius = 0.999999;
  int max_newton_iterations = 60;
  int fallback_steps = 200;
};

namespace detail {

// First moments of x1, x2 under quadrature weights w = M 1.
template <typename Scalar>
class MomentFunction {
 public:
  MomentFunction(const SurfaceMesh<Scalar>& mesh, const MapSample<Scalar>& f, Vector<Scalar> weights)
      : mesh_(mesh), f_(f), weights_(std::move(weights)) {}

  Eigen::Matrix<Scalar, 2, 1> operator()(Complex<Scalar> a) const {
    const SphereFunctions<Scalar> x = transplant_coords(mesh_, f_, a);
    return {weights_.dot(x.x1), weights_.dot(x.x2)};
  }

  // Central differences in (Re a, Im a).
  Eigen::Matrix<Scalar, 2, 2> jacobian(Complex<Scalar> a, Scalar step) const {
    Eigen::Matrix<Scalar, 2, 2> J;
    const Complex<Scalar> dirs[2] = {{step, 0}, {0, step}};
    for (int c = 0; c < 2; ++c) J.col(c) = ((*this)(a + dirs[c]) - (*this)(a - dirs[c])) / (Scalar(2) * step);
    return J;
  }

  Scalar area() const { return weights_.sum(); }

 private:
  const SurfaceMesh<Scalar>& mesh_;
  const MapSample<Scalar>& f_;
  Vector<Scalar> weights_;
};

struct NewtonOutcome {
  bool converged = false;
  int iterations = 0;
};

template <typename Scalar>
NewtonOutcome damped_newton(const MomentFunction<Scalar>& G, Complex<Scalar>& a, Scalar& residual, Scalar tol,
                            const BalanceOptions& opt) {
  NewtonOutcome out;
  const Scalar rmax = Scalar(opt.max_radius);
  const Scalar step = Scalar(opt.fd_step);
  auto g = G(a);
  residual = g.norm();
  while (residual > tol && out.iterations < opt.max_newton_iterations) {
    // Keep the difference stencil inside the disc.
    if (std::abs(a) + step >= Scalar(1)) return out;
    const auto J = G.jacobian(a, step);
    Eigen::FullPivLU<Eigen::Matrix<Scalar, 2, 2>> lu(J);
    if (!lu.isInvertible()) return out;
    const Eigen::Matrix<Scalar, 2, 1> delta = -lu.solve(g);
    bool accepted = false;
    for (Scalar t(1); t > Scalar(1e-8); t /= Scalar(2)) {
      const Complex<Scalar> trial = a + t * Complex<Scalar>(delta[0], delta[1]);
      if (std::abs(trial) > rmax) continue;
      const auto gt = G(trial);
      if (gt.norm() < residual) {
        a = trial;
        g = gt;
        residual = gt.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) return out;
    ++out.iterations;
  }
  out.converged = residual <= tol;
  return out;
}

// Backtracking gradient descent on |G|^2 from a = 0.
template <typename Scalar>
int gradient_descent(const MomentFunction<Scalar>& G, Complex<Scalar>& a, Scalar& residual,
                     const BalanceOptions& opt) {
  const Scalar rmax = Scalar(opt.max_radius);
  const Scalar step = Scalar(opt.fd_step);
  a = {};
  auto g = G(a);
  residual = g.norm();
  Scalar rate(1);
  int taken = 0;
  for (int it = 0; it < opt.fallback_steps; ++it) {
    if (std::abs(a) + step >= Scalar(1)) break;
    const Eigen::Matrix<Scalar, 2, 1> grad = Scalar(2) * G.jacobian(a, step).transpose() * g;
    if (!(grad.norm() > Scalar(0))) break;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries, rate /= Scalar(2)) {
      const Complex<Scalar> trial = a - rate * Complex<Scalar>(grad[0], grad[1]);
      if (std::abs(trial) > rmax) continue;
      const auto gt = G(trial);
      if (gt.norm() < residual) {
        a = trial;
        g = gt;
        residual = gt.norm();
        accepted = true;
        rate *= Scalar(2);
        break;
      }
    }
    if (!accepted) break;
    ++taken;
  }
  return taken;
}

}  // namespace detail

// Center of gravity (int x1 o T_a o f, int x2 o T_a o f) with consistent-mass
// quadrature.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> center_of_gravity(const SurfaceMesh<Scalar>& mesh, const MapSample<Scalar>& f,
                                              Complex<Scalar> a = {}) {
  const Vector<Scalar> weights = assemble_mass(mesh) * Vector<Scalar>::Ones(mesh.vertex_count());
  return detail::MomentFunction<Scalar>(mesh, f, weights)(a);
}

// Finds a with |G(a)| <= tol * area. Damped Newton from a = 0; if it stalls,
// gradient descent from a = 0 followed by another Newton pass.
template <typename Scalar>
BalanceResult<Scalar> balance_center_of_mass(const SurfaceMesh<Scalar>& mesh, const MapSample<Scalar>& f,
                                             const BalanceOptions& options = {}) {
  const Vector<Scalar> weights = assemble_mass(mesh) * Vector<Scalar>::Ones(mesh.vertex_count());
  const detail::MomentFunction<Scalar> G(mesh, f, weights);
  const Scalar tol = Scalar(options.relative_tolerance) * G.area();

  BalanceResult<Scalar> out;
  Complex<Scalar> a{};
  Scalar residual{};
  const auto first = detail::damped_newton(G, a, residual, tol, options);
  out.iterations = first.iterations;
  if (first.converged) {
    out.a = a;
    out.residual = residual;
    return out;
  }

  Complex<Scalar> best_a = a;
  Scalar best = residual;
  out.used_fallback = true;
  out.iterations += detail::gradient_descent(G, a, residual, options);
  const auto second = detail::damped_newton(G, a, residual, tol, options);
  out.iterations += second.iterations;
  if (residual < best) {
    best = residual;
    best_a = a;
  }
  if (!second.converged) {
    throw BalanceError("balancing did not converge; best |G| = " + std::to_string(static_cast<double>(best)) +
                           " at a = (" + std::to_string(static_cast<double>(best_a.real())) + ", " +
                           std::to_string(static_cast<double>(best_a.imag())) + ")",
                       static_cast<double>(best));
  }
  out.a = a;
  out.residual = residual;
  return out;
}

}  // namespace membrane
