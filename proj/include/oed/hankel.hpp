#pragma once

#include "oed/errors.hpp"
#include "oed/linalg.hpp"
#include "oed/matrix.hpp"

namespace oed {

/// Block-Hankel matrix with depth+1 block rows of a vector sequence given
/// column-wise (seq is dim x len). Block (r, c) is the sample at time r+c,
/// so the result is (depth+1)*dim x (len-depth).
template <typename T>
Matrix<T> hankel(const Matrix<T>& seq, int depth) {
  const int dim = seq.rows();
  const int len = seq.cols();
  if (depth < 0 || depth > len - 1)
    throw DepthRangeError("hankel depth " + std::to_string(depth) +
                          " out of range for sequence of length " + std::to_string(len));
  Matrix<T> out((depth + 1) * dim, len - depth);
  for (int r = 0; r <= depth; ++r)
    for (int d = 0; d < dim; ++d)
      for (int c = 0; c < len - depth; ++c) out(r * dim + d, c) = seq(d, r + c);
  return out;
}

/// True iff the depth-(order-1) Hankel matrix of the sequence has full row
/// rank. Errors when the sequence is too short to form that matrix.
template <typename T>
bool is_persistently_exciting(const Matrix<T>& seq, int order) {
  if (order < 1) throw DepthRangeError("excitation order must be >= 1");
  if (seq.cols() < order)
    throw SequenceTooShortError("sequence of length " + std::to_string(seq.cols()) +
                                " cannot test excitation of order " + std::to_string(order));
  const Matrix<T> h = hankel(seq, order - 1);
  return rank(h) == h.rows();
}

}  // namespace oed
