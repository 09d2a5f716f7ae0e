#pragma once

#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gfflab/network.hpp"

namespace gfflab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Largest interior size accepted by the rational routines.
inline constexpr int kExactLimit = 12;

/// Simplest fraction whose nearest double is x: the first continued-fraction
/// convergent of x that rounds back to x. 0.25 -> 1/4, 0.1 -> 1/10.
Rational rational_from_double(double x);

/// Dense row-major matrix over the rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols)) {}
  static RationalMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Rational& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * cols_ + j)]; }

  RationalMatrix operator*(const RationalMatrix& other) const;
  bool operator==(const RationalMatrix& other) const = default;

  /// Principal submatrix on the given row/column indices, in that order.
  RationalMatrix principal(std::span<const int> idx) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> a_;
};

Rational determinant(RationalMatrix m);
/// Throws std::domain_error for a singular matrix.
RationalMatrix inverse(RationalMatrix m);

/// Laplacian with each conductance converted by rational_from_double.
RationalMatrix rational_laplacian(const Network& network);

/// prod_j G_{D minus {x_1..x_{j-1}}}(x_j, x_j) for an ordering given as
/// interior indices.
Rational product_formula(const RationalMatrix& laplacian, std::span<const int> order);

struct ExactIdentities {
  Rational det_laplacian;
  Rational det_green;
  bool green_inverts_laplacian = false;  // G L == I
  bool det_reciprocal = false;           // det G * det L == 1
  std::vector<Rational> products;        // one per ordering checked
  bool product_matches_det_green = false;
  std::optional<BigInt> tree_count;      // (2d)^n det L on lattice networks
};

/// Checks the identities with zero tolerance. `orderings` are lists of
/// interior indices; empty means the natural and the reversed order.
ExactIdentities exact_identities(const Network& network,
                                 const std::vector<std::vector<int>>& orderings = {});

}  // namespace gfflab
