#include "membrane/fixtures.hpp"

#include <array>
#include <cmath>
#include <random>

#include "membrane/transplant.hpp"

namespace membrane {

Fixture disc_fixture() {
  return {"disc",
          [](int rings) {
            auto mesh = generate_disc(rings);
            auto f = identity_map(mesh);
            f.degree = 1;
            return MappedSurfaced{std::move(mesh), std::move(f)};
          },
          true};
}

Fixture cap_fixture(double colatitude, const std::string& name) {
  return {name,
          [colatitude](int rings) {
            auto mesh = generate_spherical_cap(colatitude, rings);
            auto f = stereographic_map(mesh);
            f.degree = 1;
            return MappedSurfaced{std::move(mesh), std::move(f)};
          },
          true};
}

Fixture hemisphere_fixture() { return cap_fixture(kPi<double> / 2, "hemisphere"); }

Fixture branched_disc_fixture() {
  return {"branched_disc", [](int rings) { return generate_branched_double_disc(std::max(rings, 2)); }, true};
}

Fixture stereographic_hemisphere_fixture() {
  return {"conformal_hemisphere",
          [](int rings) {
            return generate_conformal_disc(rings, [](std::complex<double> z) {
              return std::log(2.0 / (1.0 + std::norm(z)));
            });
          },
          true};
}

Fixture bump_fixture(std::complex<double> center, double height, double width, const std::string& name) {
  return {name,
          [=](int rings) {
            return generate_conformal_disc(rings, [=](std::complex<double> z) {
              return height * std::exp(-std::norm(z - center) / (width * width));
            });
          },
          false};
}

std::function<double(std::complex<double>)> random_log_factor(std::uint64_t seed) {
  // Each basis function is bounded by 1 in absolute value on |z| <= 1.
  using Basis = double (*)(std::complex<double>);
  static constexpr std::array<Basis, 10> basis = {
      [](std::complex<double> z) { return z.real(); },
      [](std::complex<double> z) { return z.imag(); },
      [](std::complex<double> z) { return (z * z).real(); },
      [](std::complex<double> z) { return (z * z).imag(); },
      [](std::complex<double> z) { return (z * z * z).real(); },
      [](std::complex<double> z) { return (z * z * z).imag(); },
      [](std::complex<double> z) { return std::norm(z); },
      [](std::complex<double> z) { return std::norm(z) * z.real(); },
      [](std::complex<double> z) { return std::norm(z) * z.imag(); },
      [](std::complex<double> z) { return std::cos(kPi<double> * std::abs(z)); },
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_real_distribution<double> budget(0.3, 1.0);
  std::array<double, basis.size()> c{};
  double l1 = 0;
  for (double& x : c) {
    x = coeff(rng);
    l1 += std::abs(x);
  }
  const double scale = budget(rng) / l1;
  for (double& x : c) x *= scale;
  return [c](std::complex<double> z) {
    double phi = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) phi += c[i] * basis[i](z);
    return phi;
  };
}

std::vector<Fixture> random_conformal_fixtures(int count, std::uint64_t seed) {
  std::vector<Fixture> out;
  for (int i = 0; i < count; ++i) {
    auto phi = random_log_factor(seed + static_cast<std::uint64_t>(i));
    out.push_back({"random_conformal_" + std::to_string(i),
                   [phi](int rings) { return generate_conformal_disc(rings, phi); }, false});
  }
  return out;
}

std::vector<Fixture> standard_fixtures(int random_count, std::uint64_t seed) {
  std::vector<Fixture> out;
  out.push_back(disc_fixture());
  out.push_back(cap_fixture(kPi<double> / 6, "cap_pi_6"));
  out.push_back(cap_fixture(kPi<double> / 3, "cap_pi_3"));
  out.push_back(hemisphere_fixture());
  for (auto& f : random_conformal_fixtures(random_count, seed)) out.push_back(std::move(f));
  out.push_back(branched_disc_fixture());
  return out;
}

}  // namespace membrane
