#pragma once

#include "oed/errors.hpp"
#include "oed/matrix.hpp"

namespace oed {

/// Time-indexed input and output sequences, stored column-wise: u is
/// m x t and y is p x t.
template <typename T>
struct ExperimentLog {
  Matrix<T> u;
  Matrix<T> y;

  ExperimentLog(Matrix<T> inputs, Matrix<T> outputs)
      : u(std::move(inputs)), y(std::move(outputs)) {
    if (u.cols() != y.cols()) throw DimensionError("input/output length mismatch");
    if (u.rows() < 1 || y.rows() < 1) throw DimensionError("need m >= 1 and p >= 1");
  }

  static ExperimentLog empty(int m, int p) {
    return ExperimentLog(Matrix<T>(m, 0), Matrix<T>(p, 0));
  }

  int m() const { return u.rows(); }
  int p() const { return y.rows(); }
  int t() const { return u.cols(); }

  void append(const Matrix<T>& u_col, const Matrix<T>& y_col) {
    if (u_col.rows() != m() || u_col.cols() != 1 || y_col.rows() != p() || y_col.cols() != 1)
      throw DimensionError("append expects one input column and one output column");
    u = hstack(u, u_col);
    y = hstack(y, y_col);
  }

  /// The first len samples as a new log.
  ExperimentLog prefix(int len) const {
    if (len < 0 || len > t()) throw DimensionError("prefix length out of range");
    return ExperimentLog(u.left_cols(len), y.left_cols(len));
  }

  bool input_is_zero() const { return u.is_zero(); }

  bool operator==(const ExperimentLog& other) const {
    return u == other.u && y == other.y;
  }
};

}  // namespace oed
