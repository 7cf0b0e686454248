#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "membrane/generators.hpp"

namespace membrane {

using MappedSurfaced = MappedSurface<double>;

// A named surface-plus-map family indexed by resolution (rings).
struct Fixture {
  std::string name;
  std::function<MappedSurfaced(int)> make;
  bool symmetric = false;  // rotationally symmetric: balances at a = 0
};

Fixture disc_fixture();
Fixture cap_fixture(double colatitude, const std::string& name);
Fixture hemisphere_fixture();
Fixture branched_disc_fixture();
// Disc with e^{2 phi}|dz|^2, phi = log(2 / (1 + |z|^2)): the hemisphere in
// stereographic coordinates.
Fixture stereographic_hemisphere_fixture();
// Gaussian bump in phi centered at `center`.
Fixture bump_fixture(std::complex<double> center, double height, double width, const std::string& name);

// Smooth log-factor with |phi| <= 1 on the closed disc: a random combination
// of bounded polynomial and radial basis functions whose absolute
// coefficients sum to at most 1.
std::function<double(std::complex<double>)> random_log_factor(std::uint64_t seed);
std::vector<Fixture> random_conformal_fixtures(int count, std::uint64_t seed);

// Disc, caps at pi/6, pi/3, pi/2, `random_count` random conformal discs and
// the branched double disc.
std::vector<Fixture> standard_fixtures(int random_count = 20, std::uint64_t seed = 1961);

}  // namespace membrane
