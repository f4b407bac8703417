#include "coarse/linalg.hpp"

#include "coarse/error.hpp"

#include <Eigen/Eigenvalues>

namespace coarse {

ExactPsdResult exact_psd(RationalMatrix m) {
  const std::size_t n = m.n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (m(i, j) != m(j, i)) return {false, 0, i};
    }
  }
  ExactPsdResult out;
  Rational factor;
  for (std::size_t k = 0; k < n; ++k) {
    const Rational pivot = m(k, k);
    const int s = sgn(pivot);
    if (s < 0) {
      out.failed_pivot = k;
      return out;
    }
    if (s == 0) {
      for (std::size_t j = k + 1; j < n; ++j) {
        if (m(k, j) != 0) {
          out.failed_pivot = k;
          return out;
        }
      }
      continue;
    }
    ++out.rank;
    // Only the upper triangle is updated; m(i, k) for i > k is read as m(k, i).
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(k, i) == 0) continue;
      factor = m(k, i) / pivot;
      for (std::size_t j = i; j < n; ++j) {
        if (m(k, j) == 0) continue;
        m(i, j) -= factor * m(k, j);
      }
    }
  }
  out.psd = true;
  return out;
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0) throw DomainError("min_eigenvalue: empty matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DomainError("eigensolver did not converge");
  return solver.eigenvalues()(0);
}

Eigen::MatrixXd to_dense(const RationalMatrix& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.n), static_cast<Eigen::Index>(m.n));
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j).get_d();
    }
  }
  return out;
}

}  // namespace coarse
