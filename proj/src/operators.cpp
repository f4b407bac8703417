#include "coarse/operators.hpp"

#include "coarse/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace coarse {

Rational SparseMatrix::get(std::size_t i, std::size_t j) const {
  const auto it = entries_.find({i, j});
  return it == entries_.end() ? Rational(0) : it->second;
}

void SparseMatrix::set(std::size_t i, std::size_t j, const Rational& v) {
  if (i >= rows_ || j >= cols_) throw DomainError("sparse matrix index out of range");
  if (v == 0) {
    entries_.erase({i, j});
  } else {
    entries_[{i, j}] = v;
  }
}

void SparseMatrix::add(std::size_t i, std::size_t j, const Rational& v) {
  if (v == 0) return;
  if (i >= rows_ || j >= cols_) throw DomainError("sparse matrix index out of range");
  auto [it, inserted] = entries_.try_emplace({i, j}, v);
  if (!inserted) {
    it->second += v;
    if (it->second == 0) entries_.erase(it);
  }
}

SparseMatrix transpose(const SparseMatrix& a) {
  SparseMatrix t(a.cols(), a.rows());
  for (const auto& [ij, v] : a.entries()) t.set(ij.second, ij.first, v);
  return t;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("sparse multiply: inner dimensions differ");
  SparseMatrix c(a.rows(), b.cols());
  const auto& be = b.entries();
  for (const auto& [ik, av] : a.entries()) {
    const auto k = ik.second;
    for (auto it = be.lower_bound({k, 0}); it != be.end() && it->first.first == k; ++it) {
      c.add(ik.first, it->first.second, av * it->second);
    }
  }
  return c;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("sparse add: shape mismatch");
  SparseMatrix c = a;
  for (const auto& [ij, v] : b.entries()) c.add(ij.first, ij.second, v);
  return c;
}

SparseMatrix scale(const SparseMatrix& a, const Rational& alpha) {
  SparseMatrix c(a.rows(), a.cols());
  if (alpha == 0) return c;
  for (const auto& [ij, v] : a.entries()) c.set(ij.first, ij.second, v * alpha);
  return c;
}

Eigen::MatrixXd to_dense(const SparseMatrix& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()),
                                            static_cast<Eigen::Index>(a.cols()));
  for (const auto& [ij, v] : a.entries()) {
    m(static_cast<Eigen::Index>(ij.first), static_cast<Eigen::Index>(ij.second)) = v.get_d();
  }
  return m;
}

BandedOperator::BandedOperator(WindowPtr window, SparseMatrix matrix)
    : window_(std::move(window)), matrix_(std::move(matrix)) {
  if (!window_) throw DomainError("operator without a window");
  if (matrix_.rows() != window_->size() || matrix_.cols() != window_->size()) {
    throw DomainError("operator shape does not match window '" + window_->label() + "'");
  }
  for (const auto& [ij, v] : matrix_.entries()) {
    propagation_ = std::max(propagation_, window_->dist(ij.first, ij.second));
  }
}

BandedOperator BandedOperator::zero(WindowPtr window) {
  const auto n = window->size();
  return BandedOperator(std::move(window), SparseMatrix(n, n));
}

BandedOperator BandedOperator::identity(WindowPtr window) {
  const auto n = window->size();
  SparseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
  return BandedOperator(std::move(window), std::move(m));
}

namespace {

void require_same_window(const BandedOperator& a, const BandedOperator& b, const char* what) {
  if (a.window() != b.window()) {
    throw DomainError(std::string(what) + ": operators live on different windows");
  }
}

}  // namespace

std::vector<Rational> apply(const BandedOperator& op, const std::vector<Rational>& v) {
  if (v.size() != op.window()->size()) throw DomainError("apply: vector length does not match window");
  std::vector<Rational> out(v.size(), Rational(0));
  for (const auto& [ij, k] : op.matrix().entries()) out[ij.first] += k * v[ij.second];
  return out;
}

BandedOperator compose(const BandedOperator& a, const BandedOperator& b) {
  require_same_window(a, b, "compose");
  return BandedOperator(a.window(), multiply(a.matrix(), b.matrix()));
}

BandedOperator adjoint(const BandedOperator& a) {
  return BandedOperator(a.window(), transpose(a.matrix()));
}

BandedOperator add(const BandedOperator& a, const BandedOperator& b) {
  require_same_window(a, b, "add");
  return BandedOperator(a.window(), add(a.matrix(), b.matrix()));
}

BandedOperator subtract(const BandedOperator& a, const BandedOperator& b) {
  require_same_window(a, b, "subtract");
  return BandedOperator(a.window(), add(a.matrix(), scale(b.matrix(), Rational(-1))));
}

BandedOperator scale(const BandedOperator& a, const Rational& alpha) {
  return BandedOperator(a.window(), scale(a.matrix(), alpha));
}

BandedOperator compress(const BandedOperator& op, std::span<const std::size_t> indices) {
  auto sub = std::make_shared<const MetricWindow>(
      op.window()->restrict(indices, op.window()->label() + "/interior"));
  std::unordered_map<std::size_t, std::size_t> pos;
  for (std::size_t k = 0; k < indices.size(); ++k) pos.emplace(indices[k], k);
  SparseMatrix m(indices.size(), indices.size());
  for (const auto& [ij, v] : op.matrix().entries()) {
    const auto r = pos.find(ij.first);
    const auto c = pos.find(ij.second);
    if (r != pos.end() && c != pos.end()) m.set(r->second, c->second, v);
  }
  return BandedOperator(std::move(sub), std::move(m));
}

void validate_partial_translation(const PartialTranslation& t) {
  std::unordered_map<std::size_t, std::size_t> targets;
  std::unordered_map<std::size_t, std::size_t> sources;
  for (const auto& [x, y] : t.pairs) {
    if (!targets.emplace(x, y).second) {
      throw InvariantViolation("partial translation: repeated target " + std::to_string(x));
    }
    if (!sources.emplace(y, x).second) {
      throw InvariantViolation("partial translation: repeated source " + std::to_string(y));
    }
  }
}

BandedOperator translation_operator(const PartialTranslation& t, WindowPtr window) {
  validate_partial_translation(t);
  const auto n = window->size();
  SparseMatrix m(n, n);
  for (const auto& [x, y] : t.pairs) {
    if (x >= n || y >= n) throw DomainError("partial translation point outside the window");
    m.set(x, y, 1);
  }
  BandedOperator op(std::move(window), std::move(m));
  if (op.propagation() > t.displacement_bound) {
    throw InvariantViolation("partial translation moves a point further than its displacement bound");
  }
  return op;
}

bool is_partial_isometry(const BandedOperator& op) {
  return compose(compose(op, adjoint(op)), op) == op;
}

BandedOperator extend_to_X(const BandedOperator& op, WindowPtr full) {
  const auto& sub = *op.window();
  std::vector<std::size_t> embed(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const auto j = full->find(sub.point(i));
    if (!j) {
      throw DomainError("extend_to_X: point '" + sub.point(i) + "' is not in '" + full->label() + "'");
    }
    embed[i] = *j;
  }
  SparseMatrix m(full->size(), full->size());
  for (const auto& [ij, v] : op.matrix().entries()) m.set(embed[ij.first], embed[ij.second], v);
  return BandedOperator(std::move(full), std::move(m));
}

NormReport operator_norm(const SparseMatrix& m, std::size_t dense_cap) {
  if (m.nnz() == 0) return {0.0, "exact-zero", 0.0};
  const auto n = std::max(m.rows(), m.cols());
  if (n <= dense_cap) {
    const Eigen::MatrixXd a = to_dense(m);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const double s = svd.singularValues()(0);
    return {s, "dense-svd", 1e-12 * std::max(1.0, s)};
  }
  // Power iteration on A^T A over the sparse entries.
  std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
  trip.reserve(m.nnz());
  for (const auto& [ij, v] : m.entries()) trip.emplace_back(ij.first, ij.second, v.get_d());
  Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m.cols()));
  x.normalize();
  double sigma = 0.0;
  double prev = -1.0;
  const double tol = 1e-10;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.rows()));
    for (const auto& [i, j, v] : trip) y(static_cast<Eigen::Index>(i)) += v * x(static_cast<Eigen::Index>(j));
    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.cols()));
    for (const auto& [i, j, v] : trip) z(static_cast<Eigen::Index>(j)) += v * y(static_cast<Eigen::Index>(i));
    const double zn = z.norm();
    if (zn == 0.0) return {0.0, "power-iteration", tol};
    sigma = std::sqrt(zn);
    x = z / zn;
    if (std::abs(sigma - prev) <= tol * std::max(1.0, sigma)) break;
    prev = sigma;
  }
  return {sigma, "power-iteration", tol * std::max(1.0, sigma)};
}

NormReport operator_norm(const BandedOperator& op, std::size_t dense_cap) {
  return operator_norm(op.matrix(), dense_cap);
}

double crude_norm_bound(const BandedOperator& op) {
  double max_entry = 0.0;
  for (const auto& [ij, v] : op.matrix().entries()) max_entry = std::max(max_entry, std::abs(v.get_d()));
  if (max_entry == 0.0) return 0.0;
  return max_entry * static_cast<double>(check_bounded_geometry(*op.window(), op.propagation()).max_ball_size);
}

SparseMatrix RectangularIsometryBlock::matrix() const {
  SparseMatrix m(target->size(), source->size());
  for (std::size_t c = 0; c < column_target.size(); ++c) m.set(column_target[c], c, 1);
  return m;
}

bool RectangularIsometryBlock::columns_orthonormal() const {
  std::vector<bool> hit(target->size(), false);
  for (auto r : column_target) {
    if (hit[r]) return false;
    hit[r] = true;
  }
  return true;
}

std::int64_t required_s_radius(const OrbitSection& section, std::span<const std::size_t> ys) {
  const auto& group = section.group();
  std::int64_t need = 0;
  for (auto y : ys) {
    const auto inv = group.invert(section.phi(y));
    for (const auto& p : section.phis()) need = std::max(need, group.word_length(group.multiply(p, inv)));
  }
  return need;
}

RectangularIsometryBlock build_s(const OrbitSection& section, std::size_t y, const IndexedBall& ball) {
  const auto& group = section.group();
  const auto inv = group.invert(section.phi(y));
  RectangularIsometryBlock block{section.orbit_window(), &ball, {}};
  block.column_target.reserve(section.size());
  for (std::size_t yp = 0; yp < section.size(); ++yp) {
    const auto g = group.multiply(section.phi(yp), inv);
    const auto r = ball.find(g);
    if (!r) {
      const std::size_t one[] = {y};
      throw ResourceError("group ball of radius " + std::to_string(ball.ball().radius) +
                          " is too small for s_y; need radius " +
                          std::to_string(required_s_radius(section, one)));
    }
    block.column_target.push_back(*r);
  }
  if (!block.columns_orthonormal()) {
    throw InvariantViolation("s_y columns are not orthonormal (phi not injective)");
  }
  return block;
}

SIdentityVerdict verify_s_identity(const OrbitSection& section, const RectangularIsometryBlock& sx,
                                   const RectangularIsometryBlock& sy, std::size_t x, std::size_t y,
                                   std::span<const std::size_t> columns) {
  const auto& group = section.group();
  const auto lhs = multiply(transpose(sx.matrix()), sy.matrix());
  const auto g = group.multiply(group.invert(section.phi(x)), section.phi(y));
  const auto rhs = translation_operator(partial_action(section, g).translation, section.orbit_window());

  // Column views of both sides.
  std::vector<std::vector<std::pair<std::size_t, Rational>>> lcol(section.size());
  for (const auto& [ij, v] : lhs.entries()) lcol[ij.second].emplace_back(ij.first, v);
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rcol(section.size());
  for (const auto& [ij, v] : rhs.matrix().entries()) rcol[ij.second].emplace_back(ij.first, v);

  SIdentityVerdict out;
  for (auto c : columns) {
    ++out.columns_compared;
    auto& a = lcol[c];
    auto& b = rcol[c];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      out.equal = false;
      ++out.mismatched_columns;
      if (!out.first_mismatch) out.first_mismatch = c;
    }
  }
  return out;
}

SIdentityVerdict verify_s_identity(const OrbitSection& section, std::size_t x, std::size_t y,
                                   const IndexedBall& ball, std::span<const std::size_t> columns) {
  if (columns.empty()) throw ResourceError("verify_s_identity: interior is empty");
  const auto sx = build_s(section, x, ball);
  const auto sy = build_s(section, y, ball);
  return verify_s_identity(section, sx, sy, x, y, columns);
}

}  // namespace coarse
