#include "g2roll/linalg.hpp"

#include <stdexcept>
#include <utility>

namespace g2roll {

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMatrix QMatrix::transpose() const {
  QMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool QMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

Eigen::MatrixXd QMatrix::to_double() const {
  Eigen::MatrixXd d(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j).get_d();
  return d;
}

QMatrix operator*(const QMatrix& a, const QMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("QMatrix: shape mismatch");
  QMatrix r(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      if (sgn(a(i, k)) == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += a(i, k) * b(k, j);
    }
  return r;
}

std::vector<std::size_t> rref(QMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t p = row;
    while (p < m.rows() && sgn(m(p, col)) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    const Rational inv = 1 / m(row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || sgn(m(i, col)) == 0) continue;
      const Rational f = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::size_t rank(QMatrix m) { return rref(m).size(); }

Rational determinant(QMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant: square matrix required");
  const std::size_t n = m.rows();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && sgn(m(p, col)) == 0) ++p;
    if (p == n) return 0;
    if (p != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(col, j));
      det = -det;
    }
    det *= m(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      if (sgn(m(i, col)) == 0) continue;
      const Rational f = m(i, col) / m(col, col);
      for (std::size_t j = col; j < n; ++j) m(i, j) -= f * m(col, j);
    }
  }
  return det;
}

std::optional<QMatrix> inverse(QMatrix m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("inverse: square matrix required");
  QMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  const auto piv = rref(aug);
  if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
  QMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

QMatrix null_space(QMatrix m) {
  const auto piv = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : piv) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (!is_pivot[j]) free_cols.push_back(j);
  QMatrix basis(m.cols(), free_cols.size());
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    basis(free_cols[k], k) = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) basis(piv[r], k) = -m(r, free_cols[k]);
  }
  return basis;
}

Signature signature(QMatrix m) {
  if (!m.is_symmetric()) throw std::invalid_argument("signature: matrix is not symmetric");
  const std::size_t n = m.rows();
  Signature s;
  auto swap_index = [&](std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < n; ++j) std::swap(m(a, j), m(b, j));
    for (std::size_t i = 0; i < n; ++i) std::swap(m(i, a), m(i, b));
  };
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && sgn(m(p, p)) == 0) ++p;
    if (p == n) {
      // All remaining diagonal entries vanish: e_k -> e_k + e_j turns an off-diagonal
      // entry into a diagonal 2 m(k, j).
      std::size_t i = n, j = n;
      for (std::size_t a = k; a < n && i == n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
          if (sgn(m(a, b)) != 0) {
            i = a;
            j = b;
            break;
          }
      if (i == n) {
        s.zero += static_cast<int>(n - k);
        break;
      }
      for (std::size_t c = 0; c < n; ++c) m(i, c) += m(j, c);
      for (std::size_t r = 0; r < n; ++r) m(r, i) += m(r, j);
      p = i;
    }
    if (p != k) swap_index(p, k);
    const Rational d = m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (sgn(m(i, k)) == 0) continue;
      const Rational f = m(i, k) / d;
      // Row operation followed by the matching column operation.
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      for (std::size_t r = k; r < n; ++r) m(r, i) -= f * m(r, k);
    }
    if (sgn(d) > 0) ++s.positive;
    else ++s.negative;
  }
  return s;
}

}  // namespace g2roll
