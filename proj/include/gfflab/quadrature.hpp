#pragma once

#include <vector>

namespace gfflab {

struct GaussRule {
  std::vector<double> x, w;
};

/// n-point Gauss-Legendre rule on [a, b], nodes ascending.
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

}  // namespace gfflab
