#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "membrane/balance.hpp"
#include "membrane/fem.hpp"
#include "membrane/generators.hpp"
#include "membrane/transplant.hpp"

namespace membrane {

// Discretization budget from two resolutions h and h/2: each entry is the
// difference of the quantity between the two levels.
template <typename Scalar>
struct ErrorBudget {
  Scalar slack2 = 0;
  Scalar slack3 = 0;
  Scalar sandwich = 0;
  Index coarse_vertices = 0;
};

template <typename Scalar>
struct VerificationReport {
  static constexpr Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();

  Scalar lambda1 = nan, mu1 = nan, mu2 = nan;
  Scalar area = nan;
  int degree = 0;

  // (1/lambda1 + 1/mu1 + 1/mu2) / A  >=  3 / (4 pi d)
  Scalar lhs2 = nan, rhs2 = nan, slack2 = nan;
  // lambda1 mu1 A  <=  d (4 pi / 3)(2 lambda1 + mu1)
  Scalar lhs3 = nan, rhs3 = nan, slack3 = nan;

  Scalar reciprocal_sum = nan;  // 1/lambda1 + 1/mu1 + 1/mu2
  Scalar trial_sum = nan;       // R[x3]^-1 + R[x1]^-1 + R[x2]^-1 of the balanced transplants
  Eigen::Matrix<Scalar, 3, 1> trial_energies = Eigen::Matrix<Scalar, 3, 1>::Constant(nan);  // x1, x2, x3
  Eigen::Matrix<Scalar, 3, 1> trial_masses = Eigen::Matrix<Scalar, 3, 1>::Constant(nan);

  BalanceResult<Scalar> balance;
  Scalar dirichlet_residual = nan;
  Scalar neumann_residual = nan;

  Index vertices = 0;
  Index triangles = 0;
  Scalar mesh_size = nan;

  std::optional<ErrorBudget<Scalar>> budget;

  bool failed = false;
  std::string failure;
};

struct VerifyOptions {
  FemOptions fem;
  BalanceOptions balance;
  std::optional<int> degree;  // overrides compute_degree when set
};

template <typename Scalar>
struct Eq3 {
  Scalar lhs, rhs, slack;
};

template <typename Scalar>
Eq3<Scalar> verify_eq3(const VerificationReport<Scalar>& r) {
  const Scalar lhs = r.lambda1 * r.mu1 * r.area;
  const Scalar rhs = Scalar(r.degree) * (Scalar(4) * kPi<Scalar> / Scalar(3)) * (Scalar(2) * r.lambda1 + r.mu1);
  return {lhs, rhs, rhs - lhs};
}

// The product bound follows from the reciprocal-sum bound once mu1 <= mu2.
// Up to rounding in the two evaluation orders, slack2 >= 0 and mu1 <= mu2
// force slack3 >= 0.
template <typename Scalar>
bool eq3_implied_by_eq2(const VerificationReport<Scalar>& r) {
  if (!(r.slack2 >= Scalar(0) && r.mu1 <= r.mu2)) return true;
  return r.slack3 >= -Scalar(64) * std::numeric_limits<Scalar>::epsilon() * std::abs(r.rhs3);
}

namespace detail {

template <typename Scalar>
struct TrialQuotients {
  Scalar sum;
  Eigen::Matrix<Scalar, 3, 1> energies;
  Eigen::Matrix<Scalar, 3, 1> masses;
};

// Rayleigh quotients of x3 (Dirichlet trial) and of x1, x2 with their
// residual mean removed (Neumann trials).
template <typename Scalar>
TrialQuotients<Scalar> trial_quotients(const FemOperators<Scalar>& ops, SphereFunctions<Scalar> x) {
  const Vector<Scalar> weights = ops.mass * Vector<Scalar>::Ones(ops.mass.rows());
  const Scalar total = weights.sum();
  x.x1.array() -= weights.dot(x.x1) / total;
  x.x2.array() -= weights.dot(x.x2) / total;
  TrialQuotients<Scalar> out;
  const Vector<Scalar>* fns[3] = {&x.x1, &x.x2, &x.x3};
  out.sum = Scalar(0);
  for (int i = 0; i < 3; ++i) {
    out.energies[i] = dirichlet_energy<Scalar>(ops.stiffness, *fns[i]);
    out.masses[i] = fns[i]->dot(ops.mass * *fns[i]);
    out.sum += out.masses[i] / out.energies[i];
  }
  return out;
}

}  // namespace detail

// R[x3 o T_a o f]^-1 + R[x1 o T_a o f]^-1 + R[x2 o T_a o f]^-1. Rejects an a
// that does not balance the center of gravity.
template <typename Scalar>
Scalar trial_bound_sum(const SurfaceMesh<Scalar>& mesh, const MapSample<Scalar>& f, Complex<Scalar> a,
                       const BalanceOptions& options = {}) {
  const auto ops = assemble(mesh);
  const Scalar area = total_area(mesh);
  const Scalar residual = center_of_gravity(mesh, f, a).norm();
  if (residual > Scalar(options.relative_tolerance) * area) {
    throw DomainError("trial_bound_sum: a does not balance the center of gravity (|G| = " +
                      std::to_string(static_cast<double>(residual)) + ")");
  }
  return detail::trial_quotients(ops, transplant_coords(mesh, f, a)).sum;
}

// Runs the whole pipeline on one surface: spectra, area, degree, balancing,
// transplanted trial functions, and both inequalities. Module failures are
// caught; the report then carries what was computed and failed = true.
template <typename Scalar>
VerificationReport<Scalar> verify_inequality(const SurfaceMesh<Scalar>& mesh, const MapSample<Scalar>& f,
                                             const VerifyOptions& options = {}) {
  VerificationReport<Scalar> r;
  r.vertices = mesh.vertex_count();
  r.triangles = mesh.triangle_count();
  r.mesh_size = mesh_size(mesh);
  try {
    r.area = total_area(mesh);
    r.degree = options.degree ? *options.degree : compute_degree(mesh, f.values);
    if (r.degree < 1) throw DomainError("degree must be positive");
    r.rhs2 = Scalar(3) / (Scalar(4) * kPi<Scalar> * Scalar(r.degree));

    const auto ops = assemble(mesh, options.fem.mass);
    std::vector<bool> boundary(static_cast<std::size_t>(mesh.vertex_count()));
    for (Index v = 0; v < mesh.vertex_count(); ++v) boundary[static_cast<std::size_t>(v)] = mesh.is_boundary_vertex(v);
    const auto dirichlet = solve_dirichlet(ops, boundary, 1, options.fem);
    r.lambda1 = dirichlet.eigenvalues[0];
    r.dirichlet_residual = dirichlet.residuals.maxCoeff();
    const auto neumann = solve_neumann(ops, 2, options.fem);
    r.mu1 = neumann.eigenvalues[0];
    r.mu2 = neumann.eigenvalues[1];
    r.neumann_residual = neumann.residuals.maxCoeff();

    r.reciprocal_sum = Scalar(1) / r.lambda1 + Scalar(1) / r.mu1 + Scalar(1) / r.mu2;
    r.lhs2 = r.reciprocal_sum / r.area;
    r.slack2 = r.lhs2 - r.rhs2;
    const auto eq3 = verify_eq3(r);
    r.lhs3 = eq3.lhs;
    r.rhs3 = eq3.rhs;
    r.slack3 = eq3.slack;

    r.balance = balance_center_of_mass(mesh, f, options.balance);
    const auto trial = detail::trial_quotients(ops, transplant_coords(mesh, f, r.balance.a));
    r.trial_sum = trial.sum;
    r.trial_energies = trial.energies;
    r.trial_masses = trial.masses;
  } catch (const Error& e) {
    r.failed = true;
    r.failure = e.kind() + ": " + e.what();
  }
  return r;
}

template <typename Scalar>
ErrorBudget<Scalar> richardson_budget(const VerificationReport<Scalar>& coarse,
                                      const VerificationReport<Scalar>& fine) {
  ErrorBudget<Scalar> b;
  b.coarse_vertices = coarse.vertices;
  b.slack2 = std::abs(fine.slack2 - coarse.slack2);
  b.slack3 = std::abs(fine.slack3 - coarse.slack3);
  const auto floor_of = [](const VerificationReport<Scalar>& r) {
    return r.area / (Scalar(r.degree) * Scalar(4) * kPi<Scalar> / Scalar(3));
  };
  b.sandwich = std::max({std::abs(fine.trial_sum - coarse.trial_sum),
                         std::abs(fine.reciprocal_sum - coarse.reciprocal_sum),
                         std::abs(floor_of(fine) - floor_of(coarse))});
  return b;
}

// Verifies make(resolution) and make(2 * resolution) and returns the fine
// report with the two-level budget attached. `make` returns a MappedSurface.
template <typename Scalar, typename Factory>
VerificationReport<Scalar> verify_with_budget(Factory&& make, int resolution, const VerifyOptions& options = {}) {
  const MappedSurface<Scalar> coarse_surface = make(resolution);
  const auto coarse = verify_inequality(coarse_surface.mesh, coarse_surface.map, options);
  const MappedSurface<Scalar> fine_surface = make(2 * resolution);
  auto fine = verify_inequality(fine_surface.mesh, fine_surface.map, options);
  if (!coarse.failed && !fine.failed) fine.budget = richardson_budget(coarse, fine);
  return fine;
}

// Lower and upper ends of the proof chain, each widened by the budget.
template <typename Scalar>
bool sandwich_holds(const VerificationReport<Scalar>& r) {
  const Scalar eps = r.budget ? r.budget->sandwich : Scalar(0);
  const Scalar floor = r.area / (Scalar(r.degree) * Scalar(4) * kPi<Scalar> / Scalar(3));
  return floor - eps <= r.trial_sum && r.trial_sum <= r.reciprocal_sum + eps;
}

}  // namespace membrane
