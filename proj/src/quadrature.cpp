#include "gfflab/quadrature.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/legendre.hpp>

namespace gfflab {

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  std::vector<double> x, w;
  // boost returns the nonnegative zeros only.
  for (double z : boost::math::legendre_p_zeros<double>(n)) {
    double dp = boost::math::legendre_p_prime(n, z);
    double wt = 2.0 / ((1 - z * z) * dp * dp);
    x.push_back(z);
    w.push_back(wt);
    if (z != 0.0) {
      x.push_back(-z);
      w.push_back(wt);
    }
  }
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return x[i] < x[j]; });
  GaussRule r;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (auto i : order) {
    r.x.push_back(mid + half * x[i]);
    r.w.push_back(half * w[i]);
  }
  return r;
}

}  // namespace gfflab
