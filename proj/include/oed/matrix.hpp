#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "oed/errors.hpp"

namespace oed {

/// Dense row-major matrix over an exact rational or double scalar.
///
/// Void shapes (zero rows and/or zero columns) are first-class values: the
/// product with a void inner dimension is the zero matrix of the outer
/// shape, and the rank of a void matrix is zero.
template <typename T>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}

  Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), T(0));
  }

  /// Row-major initializer over integer literals, e.g. {{0,1},{1,0}}.
  Matrix(std::initializer_list<std::initializer_list<long>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
    data_.reserve(static_cast<std::size_t>(rows_) * cols_);
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_) throw DimensionError("ragged initializer");
      for (long v : r) data_.emplace_back(v);
    }
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  /// Builds a matrix whose j-th column is the j-th inner list.
  static Matrix from_columns(std::initializer_list<std::initializer_list<long>> cols) {
    const int c = static_cast<int>(cols.size());
    const int r = c == 0 ? 0 : static_cast<int>(cols.begin()->size());
    Matrix m(r, c);
    int j = 0;
    for (const auto& col : cols) {
      if (static_cast<int>(col.size()) != r) throw DimensionError("ragged initializer");
      int i = 0;
      for (long v : col) m(i++, j) = T(v);
      ++j;
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_void() const { return rows_ == 0 || cols_ == 0; }
  bool is_zero() const {
    for (const T& v : data_)
      if (!(v == T(0))) return false;
    return true;
  }

  T& operator()(int i, int j) {
    check_index(i, j);
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  const T& operator()(int i, int j) const {
    check_index(i, j);
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }
  bool operator!=(const Matrix& other) const { return !(*this == other); }

  Matrix transposed() const {
    Matrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  /// Copy of rows [i0, i0+h) x columns [j0, j0+w).
  Matrix block(int i0, int j0, int h, int w) const {
    if (i0 < 0 || j0 < 0 || h < 0 || w < 0 || i0 + h > rows_ || j0 + w > cols_)
      throw DimensionError("block out of range");
    Matrix out(h, w);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) out(i, j) = (*this)(i0 + i, j0 + j);
    return out;
  }

  Matrix column(int j) const { return block(0, j, rows_, 1); }
  Matrix row(int i) const { return block(i, 0, 1, cols_); }
  Matrix top_rows(int h) const { return block(0, 0, h, cols_); }
  Matrix bottom_rows(int h) const { return block(rows_ - h, 0, h, cols_); }
  Matrix left_cols(int w) const { return block(0, 0, rows_, w); }

  Matrix operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw DimensionError("product shape mismatch");
    Matrix out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const T& a = (*this)(i, k);
        if (a == T(0)) continue;
        for (int j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
      }
    return out;
  }

  Matrix operator+(const Matrix& rhs) const {
    check_same_shape(rhs);
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + rhs.data_[i];
    return out;
  }

  Matrix operator-(const Matrix& rhs) const {
    check_same_shape(rhs);
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - rhs.data_[i];
    return out;
  }

  Matrix operator-() const {
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = -data_[i];
    return out;
  }

  Matrix scaled(const T& factor) const {
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] * factor;
    return out;
  }

  template <typename U, typename F>
  Matrix<U> map(F&& f) const {
    Matrix<U> out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(i, j) = f((*this)(i, j));
    return out;
  }

 private:
  void check_index(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw DimensionError("index out of range");
  }
  void check_same_shape(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("shape mismatch");
  }

  int rows_;
  int cols_;
  std::vector<T> data_;
};

template <typename T>
Matrix<T> vstack(const Matrix<T>& top, const Matrix<T>& bottom) {
  if (top.cols() != bottom.cols() && top.rows() != 0 && bottom.rows() != 0)
    throw DimensionError("vstack column mismatch");
  const int cols = top.rows() != 0 ? top.cols() : bottom.cols();
  Matrix<T> out(top.rows() + bottom.rows(), cols);
  for (int i = 0; i < top.rows(); ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = top(i, j);
  for (int i = 0; i < bottom.rows(); ++i)
    for (int j = 0; j < cols; ++j) out(top.rows() + i, j) = bottom(i, j);
  return out;
}

template <typename T>
Matrix<T> hstack(const Matrix<T>& left, const Matrix<T>& right) {
  if (left.rows() != right.rows() && left.cols() != 0 && right.cols() != 0)
    throw DimensionError("hstack row mismatch");
  const int rows = left.cols() != 0 ? left.rows() : right.rows();
  Matrix<T> out(rows, left.cols() + right.cols());
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < left.cols(); ++j) out(i, j) = left(i, j);
    for (int j = 0; j < right.cols(); ++j) out(i, left.cols() + j) = right(i, j);
  }
  return out;
}

}  // namespace oed
