#pragma once

#include "coarse/actions.hpp"
#include "coarse/groups.hpp"
#include "coarse/metric.hpp"
#include "coarse/rational.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace coarse {

using Index2 = std::pair<std::size_t, std::size_t>;

/// Exact sparse matrix, row-major ordered, never storing explicit zeros.
class SparseMatrix {
 public:
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  const std::map<Index2, Rational>& entries() const noexcept { return entries_; }

  Rational get(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, const Rational& v);
  void add(std::size_t i, std::size_t j, const Rational& v);

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::map<Index2, Rational> entries_;
};

SparseMatrix transpose(const SparseMatrix& a);
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix scale(const SparseMatrix& a, const Rational& alpha);
Eigen::MatrixXd to_dense(const SparseMatrix& a);

/// A finitely supported operator on l^2 of a window, basis delta_x indexed by
/// window order. Propagation is cached at construction.
class BandedOperator {
 public:
  BandedOperator(WindowPtr window, SparseMatrix matrix);

  static BandedOperator zero(WindowPtr window);
  static BandedOperator identity(WindowPtr window);

  const WindowPtr& window() const noexcept { return window_; }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  std::int64_t propagation() const noexcept { return propagation_; }
  Rational entry(std::size_t row, std::size_t col) const { return matrix_.get(row, col); }
  std::size_t nnz() const noexcept { return matrix_.nnz(); }

  friend bool operator==(const BandedOperator& a, const BandedOperator& b) {
    return a.window_ == b.window_ && a.matrix_ == b.matrix_;
  }

 private:
  WindowPtr window_;
  SparseMatrix matrix_;
  std::int64_t propagation_ = 0;
};

/// k*v(x) = sum_y k(x,y) v(y).
std::vector<Rational> apply(const BandedOperator& op, const std::vector<Rational>& v);
BandedOperator compose(const BandedOperator& a, const BandedOperator& b);
BandedOperator adjoint(const BandedOperator& a);
BandedOperator add(const BandedOperator& a, const BandedOperator& b);
BandedOperator subtract(const BandedOperator& a, const BandedOperator& b);
BandedOperator scale(const BandedOperator& a, const Rational& alpha);

/// Restriction to rows and columns in `indices`; the result lives on the
/// restricted window (window order of `indices`).
BandedOperator compress(const BandedOperator& op, std::span<const std::size_t> indices);

/// Throws InvariantViolation on a repeated source or target.
void validate_partial_translation(const PartialTranslation& t);

/// 0/1 matrix with entry (x, y) = 1 for each pair; verified T T* T = T.
BandedOperator translation_operator(const PartialTranslation& t, WindowPtr window);

bool is_partial_isometry(const BandedOperator& op);

/// Zero extension from a sub-window (matched by point id) to the full window.
BandedOperator extend_to_X(const BandedOperator& op, WindowPtr full);

inline constexpr std::size_t kDenseNormCap = 2000;

struct NormReport {
  double value = 0.0;
  std::string method;  // "exact-zero", "dense-svd", "power-iteration"
  double tolerance = 0.0;
};

NormReport operator_norm(const BandedOperator& op, std::size_t dense_cap = kDenseNormCap);
NormReport operator_norm(const SparseMatrix& m, std::size_t dense_cap = kDenseNormCap);

/// Crude bound (max |entry|) * (max nonzeros per row or column) alongside the norm.
double crude_norm_bound(const BandedOperator& op);

// ---------------------------------------------------------------------------
// The isometries s_y : l^2(Y) -> l^2(G), delta_{y'} -> delta_{phi(y') phi(y)^{-1}}

struct RectangularIsometryBlock {
  WindowPtr source;                     // orbit window
  const IndexedBall* target = nullptr;  // group ball (borrowed)
  std::vector<std::size_t> column_target;

  SparseMatrix matrix() const;
  bool columns_orthonormal() const;
};

/// Group radius needed so that every phi(y') phi(y)^{-1} lands in the ball.
std::int64_t required_s_radius(const OrbitSection& section, std::span<const std::size_t> ys);

/// Throws ResourceError naming the required radius when the ball is too small.
RectangularIsometryBlock build_s(const OrbitSection& section, std::size_t y, const IndexedBall& ball);

struct SIdentityVerdict {
  bool equal = true;
  std::size_t columns_compared = 0;
  std::size_t mismatched_columns = 0;
  std::optional<std::size_t> first_mismatch;  // orbit position of the column
};

/// s_x^* s_y against the partial translation of phi(x)^{-1} phi(y), entry-exact
/// on the listed columns (all rows).
SIdentityVerdict verify_s_identity(const OrbitSection& section, std::size_t x, std::size_t y,
                                   const IndexedBall& ball, std::span<const std::size_t> columns);

/// Same check on prebuilt blocks.
SIdentityVerdict verify_s_identity(const OrbitSection& section, const RectangularIsometryBlock& sx,
                                   const RectangularIsometryBlock& sy, std::size_t x, std::size_t y,
                                   std::span<const std::size_t> columns);

}  // namespace coarse
