#pragma once

#include "coarse/rational.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace coarse {

/// Dense row-major square matrix of exact rationals.
struct RationalMatrix {
  std::size_t n = 0;
  std::vector<Rational> a;

  explicit RationalMatrix(std::size_t size = 0) : n(size), a(size * size) {}
  Rational& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

struct ExactPsdResult {
  bool psd = false;
  std::size_t rank = 0;
  /// First pivot index that failed (negative pivot, or zero pivot with a
  /// nonzero remaining row).
  std::optional<std::size_t> failed_pivot;
};

/// Symmetric Gaussian elimination (LDL^T without pivoting) in exact
/// arithmetic. A symmetric matrix is PSD iff every pivot is >= 0 and every
/// zero pivot has a vanishing remaining row.
ExactPsdResult exact_psd(RationalMatrix m);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

Eigen::MatrixXd to_dense(const RationalMatrix& m);

}  // namespace coarse
