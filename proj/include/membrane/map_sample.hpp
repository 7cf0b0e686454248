#pragma once

#include <optional>

#include "membrane/types.hpp"

namespace membrane {

// Vertex samples of a conformal map f from the surface onto the closed unit
// disc. The degree is optional: it may be supplied a priori or estimated with
// compute_degree().
template <typename Scalar>
struct MapSample {
  ComplexVector<Scalar> values;
  std::optional<int> degree;
};

using MapSampled = MapSample<double>;

}  // namespace membrane
