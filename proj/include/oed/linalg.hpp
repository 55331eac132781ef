#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

#include "oed/errors.hpp"
#include "oed/matrix.hpp"
#include "oed/rational.hpp"

namespace oed {

namespace detail {

inline Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

inline Matrix<double> from_eigen(const Eigen::MatrixXd& m) {
  Matrix<double> out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

/// Numerical-rank cutoff: singular values below
/// max(rows, cols) * eps * sigma_max count as zero.
inline double rank_tolerance(int rows, int cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * sigma_max;
}

/// Pivot size measure for exact elimination: the numerator magnitude.
inline mpz_class pivot_weight(const Rational& v) { return abs(v.get_num()); }

/// Forward fraction-free (Bareiss) elimination with partial pivoting by
/// largest numerator magnitude. If `transform` is non-null it receives a
/// square matrix W with W * M in row-echelon form; rows of W beyond the
/// rank span the left kernel of M.
inline int echelonize(Matrix<Rational> m, Matrix<Rational>* transform) {
  const int rows = m.rows();
  const int cols = m.cols();
  Matrix<Rational> w = transform != nullptr ? Matrix<Rational>::identity(rows)
                                            : Matrix<Rational>();
  int rank = 0;
  Rational prev(1);
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    mpz_class best;
    for (int i = rank; i < rows; ++i) {
      if (m(i, col) == 0) continue;
      mpz_class weight = pivot_weight(m(i, col));
      if (piv < 0 || weight > best) {
        piv = i;
        best = weight;
      }
    }
    if (piv < 0) continue;
    if (piv != rank) {
      for (int j = 0; j < cols; ++j) std::swap(m(rank, j), m(piv, j));
      if (transform != nullptr)
        for (int j = 0; j < rows; ++j) std::swap(w(rank, j), w(piv, j));
    }
    const Rational pivot = m(rank, col);
    for (int i = rank + 1; i < rows; ++i) {
      const Rational factor = m(i, col);
      if (factor == 0) continue;
      for (int j = col; j < cols; ++j)
        m(i, j) = (m(i, j) * pivot - factor * m(rank, j)) / prev;
      if (transform != nullptr)
        for (int j = 0; j < rows; ++j)
          w(i, j) = (w(i, j) * pivot - factor * w(rank, j)) / prev;
      m(i, col) = 0;
    }
    prev = pivot;
    ++rank;
  }
  if (transform != nullptr) *transform = std::move(w);
  return rank;
}

/// Scales a rational row vector to coprime integers with positive lead.
inline void normalize_row(Matrix<Rational>& rows, int i) {
  mpz_class den_lcm(1);
  for (int j = 0; j < rows.cols(); ++j) den_lcm = lcm(den_lcm, rows(i, j).get_den());
  mpz_class num_gcd(0);
  for (int j = 0; j < rows.cols(); ++j) {
    rows(i, j) *= Rational(den_lcm);
    rows(i, j).canonicalize();
    num_gcd = gcd(num_gcd, rows(i, j).get_num());
  }
  if (num_gcd == 0) return;
  int lead = 0;
  while (lead < rows.cols() && rows(i, lead) == 0) ++lead;
  if (lead < rows.cols() && rows(i, lead) < 0) num_gcd = -num_gcd;
  for (int j = 0; j < rows.cols(); ++j) {
    rows(i, j) /= Rational(num_gcd);
    rows(i, j).canonicalize();
  }
}

}  // namespace detail

/// Rank of a dense matrix. Zero for void shapes. Exact over rationals; for
/// doubles, the count of singular values above the documented tolerance.
template <typename T>
int rank(const Matrix<T>& m) {
  if (m.is_void()) return 0;
  if constexpr (std::is_same_v<T, double>) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::to_eigen(m));
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double tol = detail::rank_tolerance(m.rows(), m.cols(), sv(0));
    int r = 0;
    while (r < sv.size() && sv(r) > tol) ++r;
    return r;
  } else {
    return detail::echelonize(m, nullptr);
  }
}

/// Basis of {x : x^T M = 0}, one basis vector per row. The number of rows
/// is rows(M) - rank(M).
template <typename T>
Matrix<T> left_kernel_basis(const Matrix<T>& m) {
  if constexpr (std::is_same_v<T, double>) {
    if (m.rows() == 0) return Matrix<double>(0, 0);
    if (m.cols() == 0) return Matrix<double>::identity(m.rows());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::to_eigen(m), Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double tol = detail::rank_tolerance(m.rows(), m.cols(), sv.size() ? sv(0) : 0.0);
    int r = 0;
    while (r < sv.size() && sv(r) > tol) ++r;
    Eigen::MatrixXd basis = svd.matrixU().rightCols(m.rows() - r).transpose();
    return detail::from_eigen(basis);
  } else {
    Matrix<Rational> w;
    const int r = detail::echelonize(m, &w);
    Matrix<Rational> basis = w.bottom_rows(m.rows() - r);
    for (int i = 0; i < basis.rows(); ++i) detail::normalize_row(basis, i);
    return basis;
  }
}

/// Columns span {v : M v = 0}.
template <typename T>
Matrix<T> right_kernel_basis(const Matrix<T>& m) {
  return left_kernel_basis(m.transposed()).transposed();
}

/// Solves A X = B for the unique X when A has full column rank and the
/// system is consistent; throws InternalError otherwise.
template <typename T>
Matrix<T> solve_full_col_rank(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows()) throw DimensionError("solve shape mismatch");
  if constexpr (std::is_same_v<T, double>) {
    if (a.cols() == 0) return Matrix<double>(0, b.cols());
    Eigen::MatrixXd ae = detail::to_eigen(a);
    Eigen::MatrixXd be = detail::to_eigen(b);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ae);
    if (qr.rank() < a.cols()) throw InternalError("solve: rank-deficient system");
    Eigen::MatrixXd x = qr.solve(be);
    const double scale = std::max({1.0, ae.cwiseAbs().maxCoeff(),
                                   be.size() ? be.cwiseAbs().maxCoeff() : 0.0});
    if (be.size() != 0 && ((ae * x - be).cwiseAbs().maxCoeff() > 1e-8 * scale))
      throw InternalError("solve: inconsistent system");
    return detail::from_eigen(x);
  } else {
    const int rows = a.rows();
    const int cols = a.cols();
    Matrix<Rational> aug = hstack(a, b);
    // Gauss-Jordan with exact division.
    int r = 0;
    std::vector<int> pivot_col;
    for (int c = 0; c < cols && r < rows; ++c) {
      int piv = -1;
      mpz_class best;
      for (int i = r; i < rows; ++i) {
        if (aug(i, c) == 0) continue;
        mpz_class weight = detail::pivot_weight(aug(i, c));
        if (piv < 0 || weight > best) {
          piv = i;
          best = weight;
        }
      }
      if (piv < 0) continue;
      if (piv != r)
        for (int j = 0; j < aug.cols(); ++j) std::swap(aug(r, j), aug(piv, j));
      const Rational pv = aug(r, c);
      for (int j = 0; j < aug.cols(); ++j) aug(r, j) /= pv;
      for (int i = 0; i < rows; ++i) {
        if (i == r || aug(i, c) == 0) continue;
        const Rational f = aug(i, c);
        for (int j = 0; j < aug.cols(); ++j) aug(i, j) -= f * aug(r, j);
      }
      pivot_col.push_back(c);
      ++r;
    }
    if (static_cast<int>(pivot_col.size()) != cols)
      throw InternalError("solve: rank-deficient system");
    for (int i = r; i < rows; ++i)
      for (int j = cols; j < aug.cols(); ++j)
        if (!(aug(i, j) == 0)) throw InternalError("solve: inconsistent system");
    Matrix<Rational> x(cols, b.cols());
    for (int i = 0; i < cols; ++i)
      for (int j = 0; j < b.cols(); ++j) x(i, j) = aug(i, cols + j);
    return x;
  }
}

}  // namespace oed
