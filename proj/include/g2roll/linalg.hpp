#pragma once

#include "g2roll/hpoly.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace g2roll {

/// Dense row-major matrix of exact rationals.
class QMatrix {
public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
  static QMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  QMatrix transpose() const;
  bool is_symmetric() const;
  Eigen::MatrixXd to_double() const;

  friend QMatrix operator*(const QMatrix& a, const QMatrix& b);
  friend bool operator==(const QMatrix& a, const QMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> a_;
};

/// Reduced row echelon form in place; returns the pivot columns.
std::vector<std::size_t> rref(QMatrix& m);
std::size_t rank(QMatrix m);
Rational determinant(QMatrix m);
/// Inverse of a square matrix, or nullopt when singular.
std::optional<QMatrix> inverse(QMatrix m);
/// Basis of the right null space, one vector per column of the result.
QMatrix null_space(QMatrix m);

struct Signature {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

/// Inertia of a symmetric rational matrix by congruence diagonalization over Q.
Signature signature(QMatrix m);

}  // namespace g2roll
