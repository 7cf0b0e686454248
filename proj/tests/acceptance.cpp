// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "membrane/fixtures.hpp"
#include "membrane/membrane.hpp"
#include "oracles.hpp"

using namespace membrane;
using oracle::bessel_j;
using oracle::bessel_p;
using oracle::pi;
using cd = std::complex<double>;

namespace {

constexpr int kDiscRings = 58;        // 10267 vertices
constexpr int kHemisphereRings = 58;  // same layout on the sphere
constexpr int kFixtureRings = 16;     // budget pair 16 / 32 rings
constexpr int kRandomFixtures = 20;
constexpr std::uint64_t kRandomSeed = 1961;

int failures = 0;

void verdict(bool ok, int id, const std::string& title, const std::string& summary) {
  std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), summary.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

template <typename... Args>
void detail(const char* f, Args... args) {
  std::printf("       %s\n", fmt(f, args...).c_str());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double x, double ref) { return std::abs(x / ref - 1); }

struct FixtureRun {
  Fixture fixture;
  MappedSurfaced coarse;
  VerificationReport<double> report;  // fine level, budget attached
};

void criteria_1_2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto mesh = generate_disc(kDiscRings);
  const double area = total_area(mesh);
  const auto d = solve_dirichlet(mesh, 1);
  const double t_dirichlet = seconds_since(t0);
  const auto n = solve_neumann(mesh, 2);
  const double t_total = seconds_since(t0);

  const double target1 = bessel_j * bessel_j * pi;
  const double err1 = rel(d.eigenvalues[0] * area, target1);
  verdict(err1 <= 5e-3 && t_dirichlet < 60, 1, "disc Dirichlet",
          fmt("V = %ld, lambda1*A = %.6f vs j^2 pi = %.6f, rel err %.2e (tol 5e-3), %.2f s (limit 60 s)",
              static_cast<long>(mesh.vertex_count()), d.eigenvalues[0] * area, target1, err1, t_dirichlet));

  const double target2 = bessel_p * bessel_p * pi;
  const double err2 = rel(n.eigenvalues[0] * area, target2);
  const double ratio = n.eigenvalues[1] / n.eigenvalues[0];
  verdict(err2 <= 5e-3 && std::abs(ratio - 1) <= 1e-2, 2, "disc Neumann",
          fmt("mu1*A = %.6f vs p^2 pi = %.6f, rel err %.2e (tol 5e-3); mu2/mu1 = %.8f (tol 1e-2); "
              "zero-mode gap %.4f; both solves %.2f s",
              n.eigenvalues[0] * area, target2, err2, ratio, *n.zero_mode_gap, t_total));
}

void criterion_3() {
  const auto mesh = generate_hemisphere(kHemisphereRings);
  const double area = total_area(mesh);
  const auto d = solve_dirichlet(mesh, 1);
  const auto n = solve_neumann(mesh, 2);
  const double e_l = rel(d.eigenvalues[0], 2), e_m1 = rel(n.eigenvalues[0], 2), e_m2 = rel(n.eigenvalues[1], 2);
  const double e_la = rel(d.eigenvalues[0] * area, 4 * pi);
  verdict(std::max({e_l, e_m1, e_m2}) <= 5e-3 && e_la <= 1e-2, 3, "hemisphere",
          fmt("V = %ld, lambda1 = %.6f, mu1 = %.6f, mu2 = %.6f (each tol 5e-3 of 2); lambda1*A = %.5f vs 4 pi, "
              "rel err %.2e (tol 1e-2)",
              static_cast<long>(mesh.vertex_count()), d.eigenvalues[0], n.eigenvalues[0], n.eigenvalues[1],
              d.eigenvalues[0] * area, e_la));
}

void criterion_4() {
  const auto fixture = hemisphere_fixture();
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  double last_ratio = 0;
  for (int rings : {8, 16, 32, 64}) {
    const auto s = fixture.make(rings);
    const auto r = verify_inequality(s.mesh, s.map);
    const double ratio = std::abs(r.slack2) / r.rhs2;
    detail("rings %2d  V %5ld  slack2 %+.3e  |slack2|/rhs2 %.3e", rings, static_cast<long>(r.vertices), r.slack2,
           ratio);
    decreasing = decreasing && !r.failed && std::abs(r.slack2) < prev;
    prev = std::abs(r.slack2);
    last_ratio = ratio;
  }
  verdict(decreasing && last_ratio <= 1e-2, 4, "hemisphere equality case",
          fmt("|slack2|/rhs2 = %.3e at the finest level (tol 1e-2), strictly decreasing: %s", last_ratio,
              decreasing ? "yes" : "no"));
}

std::vector<FixtureRun> run_fixtures() {
  std::vector<FixtureRun> runs;
  for (const auto& f : standard_fixtures(kRandomFixtures, kRandomSeed)) {
    runs.push_back({f, f.make(kFixtureRings), verify_with_budget<double>(f.make, kFixtureRings)});
  }
  return runs;
}

void criteria_5_6(const std::vector<FixtureRun>& runs) {
  bool ok5 = true, ok6 = true, implied = true;
  double worst5 = std::numeric_limits<double>::infinity(), worst6 = worst5;
  for (const auto& run : runs) {
    const auto& r = run.report;
    if (r.failed || !r.budget) {
      detail("%-20s FAILED: %s", run.fixture.name.c_str(), r.failure.c_str());
      ok5 = ok6 = false;
      continue;
    }
    const double m2 = r.slack2 + r.budget->slack2, m3 = r.slack3 + r.budget->slack3;
    detail("%-20s d %d  slack2 %+.4e  eps2 %.2e  slack3 %+.4e  eps3 %.2e", run.fixture.name.c_str(), r.degree,
           r.slack2, r.budget->slack2, r.slack3, r.budget->slack3);
    ok5 = ok5 && m2 >= 0;
    ok6 = ok6 && m3 >= 0;
    implied = implied && eq3_implied_by_eq2(r);
    worst5 = std::min(worst5, m2);
    worst6 = std::min(worst6, m3);
  }
  verdict(ok5, 5, "reciprocal-sum bound on all fixtures",
          fmt("%zu fixtures at %d/%d rings; min(slack2 + eps_fem) = %+.3e", runs.size(), kFixtureRings,
              2 * kFixtureRings, worst5));
  verdict(ok6 && implied, 6, "product bound on all fixtures",
          fmt("min(slack3 + eps_fem) = %+.3e; implication slack2 >= 0 and mu1 <= mu2 => slack3 >= 0 holds on every report: %s", worst6,
              implied ? "yes" : "no"));
}

void criterion_7() {
  const double sphere = 4 * pi / 3;
  bool ok = true;
  for (const auto& fixture : {disc_fixture(), branched_disc_fixture()}) {
    double tol = 0, h0 = 0;
    for (int level = 0; level < 4; ++level) {
      const int rings = 4 << level;
      const auto s = fixture.make(rings);
      const int d = *s.map.degree;
      const auto x = transplant_coords(s.mesh, s.map);
      const auto K = assemble_stiffness(s.mesh);
      const double errs[3] = {rel(dirichlet_energy<double>(K, x.x1), d * sphere),
                              rel(dirichlet_energy<double>(K, x.x2), d * sphere),
                              rel(dirichlet_energy<double>(K, x.x3), d * sphere)};
      const double worst = std::max({errs[0], errs[1], errs[2]});
      const double h = mesh_size(s.mesh);
      if (level == 0) {
        // tol(h) = C h, with C calibrated on the coarsest level of this fixture.
        h0 = h;
        tol = worst;
      } else {
        tol /= 2;
      }
      const bool pass = worst <= tol;
      ok = ok && pass;
      detail("%-14s d %d  rings %2d  h %.4f  rel err x1 %.2e x2 %.2e x3 %.2e  tol(h) %.2e (C = %.3f)",
             fixture.name.c_str(), d, rings, h, errs[0], errs[1], errs[2], tol, tol * std::pow(2, level) / h0);
    }
  }
  verdict(ok, 7, "conformal invariance of energies",
          "each |E(x_i)/(d 4pi/3) - 1| within tol(h), tol halving per level, disc and branched disc");
}

void criterion_8(const std::vector<FixtureRun>& runs) {
  double worst = 0;
  int cases = 0;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.65, 0.65);
  for (const auto& run : runs) {
    std::vector<cd> params = {cd(), run.report.balance.a};
    for (int i = 0; i < 4; ++i) params.emplace_back(u(rng), u(rng));
    for (cd a : params) {
      const auto x = transplant_coords(run.coarse.mesh, run.coarse.map, a);
      const Eigen::ArrayXd n = x.x1.array().square() + x.x2.array().square() + x.x3.array().square();
      worst = std::max(worst, (n - 1).abs().maxCoeff());
      ++cases;
    }
  }
  const double tol = 4 * std::numeric_limits<double>::epsilon();
  verdict(worst <= tol, 8, "pointwise sum x_i^2 = 1",
          fmt("%d (fixture, a) cases, max |sum - 1| = %.3e (tol 4 eps = %.3e)", cases, worst, tol));
}

void criterion_9(const std::vector<FixtureRun>& runs) {
  bool ok = true;
  double worst_res = 0, worst_grid = 0, worst_sym = 0, spacing = 0;
  for (const auto& run : runs) {
    const auto& s = run.coarse;
    const double area = total_area(s.mesh);
    BalanceResult<double> b;
    try {
      b = balance_center_of_mass(s.mesh, s.map);
    } catch (const Error& e) {
      detail("%-20s balancing failed: %s", run.fixture.name.c_str(), e.what());
      ok = false;
      continue;
    }
    const auto grid = oracle::grid_balance(s.mesh, s.map);
    spacing = grid.spacing;
    const double dist = std::abs(b.a - grid.a);
    const double fine_res = run.report.balance.residual / run.report.area;
    worst_res = std::max({worst_res, b.residual / area, fine_res});
    worst_grid = std::max(worst_grid, dist / grid.spacing);
    ok = ok && b.residual <= 1e-10 * area && fine_res <= 1e-10 && dist <= 2 * grid.spacing;
    if (run.fixture.symmetric) {
      worst_sym = std::max({worst_sym, std::abs(b.a), std::abs(run.report.balance.a)});
      ok = ok && std::abs(b.a) <= 1e-8 && std::abs(run.report.balance.a) <= 1e-8;
    }
    detail("%-20s a = (%+.5f, %+.5f)  |G|/A %.1e  grid a = (%+.2f, %+.2f)  distance %.2f spacings  iters %d",
           run.fixture.name.c_str(), b.a.real(), b.a.imag(), b.residual / area, grid.a.real(), grid.a.imag(),
           dist / grid.spacing, b.iterations);
  }
  verdict(ok, 9, "balancing",
          fmt("max |G|/A = %.2e (tol 1e-10); max distance to 101x101 grid minimizer %.2f spacings (spacing %.2f, "
              "tol 2); symmetric fixtures max |a| = %.1e (tol 1e-8)",
              worst_res, worst_grid, spacing, worst_sym));
}

void criterion_10(const std::vector<FixtureRun>& runs) {
  bool ok = true;
  for (const auto& run : runs) {
    const auto& r = run.report;
    const bool holds = !r.failed && r.budget && sandwich_holds(r);
    ok = ok && holds;
    const double floor = r.area / (r.degree * 4 * pi / 3);
    detail("%-20s %.5f - %.1e <= %.5f <= %.5f + %.1e  %s", run.fixture.name.c_str(), floor,
           r.budget ? r.budget->sandwich : 0.0, r.trial_sum, r.reciprocal_sum, r.budget ? r.budget->sandwich : 0.0,
           holds ? "ok" : "VIOLATED");
  }
  verdict(ok, 10, "proof sandwich", "A/(d 4pi/3) - eps <= trial_sum <= 1/lambda1 + 1/mu1 + 1/mu2 + eps on every fixture");
}

void criterion_11() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  double worst_k = 0, worst_m = 0;
  int triangles = 0;
  while (triangles < 500) {
    Eigen::Matrix<double, 3, 2> x;
    for (int i = 0; i < 6; ++i) x(i / 2, i % 2) = u(rng);
    const Eigen::Vector2d e1 = x.row(1) - x.row(0), e2 = x.row(2) - x.row(0);
    const double cross = e1.x() * e2.y() - e1.y() * e2.x();
    if (std::abs(cross) < 0.2) continue;
    if (cross < 0) x.row(1).swap(x.row(2));
    const auto mesh = oracle::triangle_mesh(x);
    const Eigen::Matrix3d K = Eigen::MatrixXd(assemble_stiffness(mesh));
    const Eigen::Matrix3d M = Eigen::MatrixXd(assemble_mass(mesh));
    const Eigen::Matrix3d Ko = oracle::gradient_stiffness(x);
    const Eigen::Matrix3d Mo = oracle::midpoint_mass(std::abs(cross) / 2);
    worst_k = std::max(worst_k, (K - Ko).cwiseAbs().maxCoeff() / Ko.cwiseAbs().maxCoeff());
    worst_m = std::max(worst_m, (M - Mo).cwiseAbs().maxCoeff() / Mo.cwiseAbs().maxCoeff());
    ++triangles;
  }

  const auto mesh = generate_disc(18);
  FemOptions dense, iterative;
  dense.eigen.method = EigenMethod::dense;
  iterative.eigen.method = EigenMethod::shift_invert;
  const int k = 4;
  const auto dd = solve_dirichlet(mesh, k, dense), di = solve_dirichlet(mesh, k, iterative);
  const auto nd = solve_neumann(mesh, k, dense), ni = solve_neumann(mesh, k, iterative);
  double worst_eig = 0;
  for (Index j = 0; j < k; ++j) {
    worst_eig = std::max({worst_eig, rel(di.eigenvalues[j], dd.eigenvalues[j]), rel(ni.eigenvalues[j], nd.eigenvalues[j])});
  }
  verdict(worst_k <= 1e-12 && worst_m <= 1e-12 && worst_eig <= 1e-7, 11, "oracle equivalence",
          fmt("%d random triangles: max rel deviation stiffness %.1e, mass %.1e (tol 1e-12); dense vs shift-invert "
              "on a %ld-vertex disc, first %d Dirichlet and Neumann eigenvalues: max rel diff %.1e (tol 1e-7)",
              triangles, worst_k, worst_m, static_cast<long>(mesh.vertex_count()), k, worst_eig));
}

void criterion_12() {
  bool ok = true;
  double worst = 0;
  std::vector<Fixture> fixtures = {disc_fixture(), hemisphere_fixture(), branched_disc_fixture()};
  fixtures.push_back(random_conformal_fixtures(1, kRandomSeed)[0]);
  for (const auto& f : fixtures) {
    const auto s = f.make(12);
    const auto base = verify_inequality(s.mesh, s.map);
    for (double c : {0.1, 3.0}) {
      const auto r = verify_inequality(s.mesh.scaled(c), s.map);
      const double e2 = rel(r.lhs2, base.lhs2), es = rel(r.slack2, base.slack2);
      worst = std::max({worst, e2, es});
      ok = ok && !r.failed && !base.failed && e2 <= 1e-9 && es <= 1e-9;
      detail("%-20s c = %.1f  lhs2 rel change %.1e  slack2 rel change %.1e", f.name.c_str(), c, e2, es);
    }
  }
  verdict(ok, 12, "scale invariance", fmt("max relative change of lhs2 and slack2 = %.2e (tol 1e-9)", worst));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criteria_1_2();
  criterion_3();
  criterion_4();
  const auto runs = run_fixtures();
  criteria_5_6(runs);
  criterion_7();
  criterion_8(runs);
  criterion_9(runs);
  criterion_10(runs);
  criterion_11();
  criterion_12();
  std::printf("%d of 12 criteria failed; %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
