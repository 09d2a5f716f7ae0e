#include "gfflab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gfflab {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite value");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(std::abs(x), &exp);
  // mant * 2^53 is an integer
  BigInt num = static_cast<long long>(std::ldexp(mant, 53));
  BigInt den = 1;
  exp -= 53;
  if (exp >= 0) num <<= exp;
  else den <<= -exp;
  const Rational exact(num, den);

  // Continued-fraction convergents of the exact value.
  BigInt h_prev = 1, h = 0, k_prev = 0, k = 1;
  BigInt p = num, q = den;
  while (q != 0) {
    BigInt a = p / q;
    BigInt r = p % q;
    BigInt h_next = a * h_prev + h;
    BigInt k_next = a * k_prev + k;
    h = h_prev;
    k = k_prev;
    h_prev = h_next;
    k_prev = k_next;
    Rational candidate(h_prev, k_prev);
    if (candidate.convert_to<double>() == std::abs(x)) return x < 0 ? Rational(-candidate) : candidate;
    p = q;
    q = r;
  }
  return x < 0 ? Rational(-exact) : exact;
}

RationalMatrix RationalMatrix::identity(int n) {
  RationalMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("RationalMatrix: shape mismatch");
  RationalMatrix r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(i, k);
      if (a == 0) continue;
      for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

RationalMatrix RationalMatrix::principal(std::span<const int> idx) const {
  const int k = static_cast<int>(idx.size());
  RationalMatrix r(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) r(a, b) = (*this)(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  return r;
}

Rational determinant(RationalMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix not square");
  const int n = m.rows();
  Rational det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (piv < n && m(piv, c) == 0) ++piv;
    if (piv == n) return Rational(0);
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
      det = -det;
    }
    det *= m(c, c);
    for (int r = c + 1; r < n; ++r) {
      if (m(r, c) == 0) continue;
      Rational f = m(r, c) / m(c, c);
      for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return det;
}

RationalMatrix inverse(RationalMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse: matrix not square");
  const int n = m.rows();
  RationalMatrix inv = RationalMatrix::identity(n);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (piv < n && m(piv, c) == 0) ++piv;
    if (piv == n) throw std::domain_error("inverse: singular matrix");
    if (piv != c)
      for (int j = 0; j < n; ++j) {
        std::swap(m(c, j), m(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    Rational p = m(c, c);
    for (int j = 0; j < n; ++j) {
      m(c, j) /= p;
      inv(c, j) /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || m(r, c) == 0) continue;
      Rational f = m(r, c);
      for (int j = 0; j < n; ++j) {
        m(r, j) -= f * m(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

RationalMatrix rational_laplacian(const Network& network) {
  const int n = network.interior_count();
  if (n > kExactLimit) throw std::invalid_argument("rational_laplacian: exact mode is limited to 12 interior vertices");
  RationalMatrix L(n, n);
  for (const auto& e : network.edges()) {
    Rational c = rational_from_double(e.conductance);
    int ia = network.interior_index(e.a), ib = network.interior_index(e.b);
    if (ia >= 0) L(ia, ia) += c;
    if (ib >= 0) L(ib, ib) += c;
    if (ia >= 0 && ib >= 0) {
      L(ia, ib) -= c;
      L(ib, ia) -= c;
    }
  }
  return L;
}

Rational product_formula(const RationalMatrix& laplacian, std::span<const int> order) {
  Rational prod = 1;
  for (std::size_t j = 0; j < order.size(); ++j) {
    RationalMatrix sub = laplacian.principal(order.subspan(j));
    prod *= inverse(sub)(0, 0);
  }
  return prod;
}

ExactIdentities exact_identities(const Network& network, const std::vector<std::vector<int>>& orderings) {
  ExactIdentities out;
  RationalMatrix L = rational_laplacian(network);
  const int n = L.rows();
  RationalMatrix G = inverse(L);
  out.det_laplacian = determinant(L);
  out.det_green = determinant(G);
  out.green_inverts_laplacian = (G * L == RationalMatrix::identity(n)) && (L * G == RationalMatrix::identity(n));
  out.det_reciprocal = out.det_green * out.det_laplacian == 1;

  std::vector<std::vector<int>> orders = orderings;
  if (orders.empty()) {
    std::vector<int> natural(static_cast<std::size_t>(n));
    std::iota(natural.begin(), natural.end(), 0);
    orders.push_back(natural);
    std::reverse(natural.begin(), natural.end());
    orders.push_back(natural);
  }
  out.product_matches_det_green = true;
  for (const auto& o : orders) {
    out.products.push_back(product_formula(L, o));
    if (out.products.back() != out.det_green) out.product_matches_det_green = false;
  }

  if (int d = network.lattice_dimension(); d > 0) {
    Rational count = out.det_laplacian;
    for (int i = 0; i < n; ++i) count *= 2 * d;
    if (boost::multiprecision::denominator(count) != 1)
      throw std::logic_error("exact_identities: tree count is not an integer");
    out.tree_count = boost::multiprecision::numerator(count);
  }
  return out;
}

}  // namespace gfflab
