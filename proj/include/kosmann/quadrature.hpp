#pragma once

// Tensor-product Gauss-Legendre quadrature over axis-aligned chart boxes.

#include <array>
#include <vector>

#include "kosmann/scalarfield.hpp"

namespace kosmann {

struct QuadRule {
  std::vector<double> x, w;  // nodes and weights on [-1, 1]
};

QuadRule gauss_legendre(int n);

// Integral of f over the box spanned by `axes`, with every other coordinate
// frozen at basePoint.  Deterministic: fixed node order, pairwise summation.
double integrate_box(const SF& f, const std::vector<int>& axes,
                     const std::vector<std::array<double, 2>>& bounds,
                     std::vector<double> basePoint, int nodesPerDim = 64);

}  // namespace kosmann
