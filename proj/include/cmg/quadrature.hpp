#pragma once

#include <vector>

#include "cmg/softfloat.hpp"

namespace cmg::fem {

struct QuadratureRule {
  std::vector<softfloat::SoftScalar> nodes;    // in (0, 1)
  std::vector<softfloat::SoftScalar> weights;  // sum to 1
};

// Gauss-Legendre rule with the given number of points on [0, 1], computed by
// Newton iteration at width bits. Results are cached per (points, width).
const QuadratureRule& gauss_legendre(int points, int width);

}  // namespace cmg::fem
