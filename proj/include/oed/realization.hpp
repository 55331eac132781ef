#pragma once

#include <cmath>
#include <type_traits>
#include <utility>

#include "oed/errors.hpp"
#include "oed/experiment_log.hpp"
#include "oed/informativity.hpp"
#include "oed/linalg.hpp"
#include "oed/matrix.hpp"
#include "oed/state_space.hpp"

namespace oed {

/// A state-space model recovered from an informative log, together with
/// the recovered initial state and the maximum absolute equation error
/// over the data (exactly zero in exact mode).
template <typename T>
struct IdentifiedModel {
  StateSpaceSystem<T> system;
  Matrix<T> x0;
  T residual;
  InformativityReport source_report;
};

namespace detail {

/// Assembles the block lower-triangular Toeplitz matrix of Markov
/// parameters for the window [0, k] from explicit system matrices.
template <typename T>
Matrix<T> toeplitz_from_parts(const Matrix<T>& a, const Matrix<T>& b, const Matrix<T>& c,
                              const Matrix<T>& d, int k) {
  const int p = d.rows();
  const int m = d.cols();
  Matrix<T> out((k + 1) * p, (k + 1) * m);
  std::vector<Matrix<T>> blocks;  // D, CB, CAB, ...
  blocks.push_back(d);
  Matrix<T> lead = c;
  for (int j = 1; j <= k; ++j) {
    blocks.push_back(lead * b);
    lead = lead * a;
  }
  for (int r = 0; r <= k; ++r)
    for (int col = 0; col <= r; ++col)
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < m; ++j) out(r * p + i, col * m + j) = blocks[r - col](i, j);
  return out;
}

template <typename T>
T max_abs(const Matrix<T>& m) {
  T best(0);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      const T a = abs_value(m(i, j));
      if (a > best) best = a;
    }
  return best;
}

}  // namespace detail

/// Recovers a minimal explaining system of order n_min from data certified
/// informative, up to isomorphism.
///
/// The left kernel of the depth-L_actual data Hankel matrix equals the set
/// of linear laws of the explaining system, so its output coordinates
/// annihilate exactly the column space of the observability matrix. From
/// that space the pair (A, C) follows by the shift relation, (B, D) by a
/// linear solve against the kernel, and the initial state from the first
/// output window. The returned model reproduces the log exactly.
template <typename T>
IdentifiedModel<T> identify(const ExperimentLog<T>& log, const InformativityReport& report) {
  if (!report.informative)
    throw NotInformativeError("identification requires an informative log");
  const int m = log.m();
  const int p = log.p();
  const int k = static_cast<int>(report.L_actual);
  const int n = static_cast<int>(report.n_min);

  if (n == 0) {
    // Memoryless case: y = D u with u of full row rank.
    const Matrix<T> d_t = solve_full_col_rank(log.u.transposed(), log.y.transposed());
    StateSpaceSystem<T> sys(Matrix<T>(0, 0), Matrix<T>(0, m), Matrix<T>(p, 0),
                            d_t.transposed());
    IdentifiedModel<T> model{std::move(sys), Matrix<T>(0, 1), T(0), report};
    const Trajectory<T> traj = simulate(model.system, model.x0, log.u);
    model.residual = detail::max_abs(traj.y - log.y);
    return model;
  }

  const Matrix<T> h = hankel_io(log, k);
  const Matrix<T> kernel = left_kernel_basis(h);
  if (kernel.rows() != (k + 1) * p - n)
    throw InternalError("kernel dimension inconsistent with the report");
  const Matrix<T> kernel_y = kernel.left_cols((k + 1) * p);
  const Matrix<T> kernel_u = kernel.block(0, (k + 1) * p, kernel.rows(), (k + 1) * m);

  // Columns of obs span the column space of the depth-k observability
  // matrix of every minimal explaining system, expressed in some state
  // basis. The basis choice fixes the representative of the isomorphism
  // class.
  const Matrix<T> obs = right_kernel_basis(kernel_y);
  if (obs.cols() != n) throw InternalError("observability space dimension mismatch");

  const Matrix<T> c_hat = obs.top_rows(p);
  const Matrix<T> a_hat =
      solve_full_col_rank(obs.top_rows(k * p), obs.bottom_rows(k * p));

  // (B, D) solve kernel_y * Toeplitz(B, D) = -kernel_u, linear in the
  // stacked unknown [B; D].
  std::vector<Matrix<T>> lead_powers;  // C, CA, ..., CA^{k-1}
  lead_powers.push_back(c_hat);
  for (int j = 1; j < k; ++j) lead_powers.push_back(lead_powers.back() * a_hat);
  const int eq_rows = kernel.rows() * (k + 1);
  Matrix<T> coeff(eq_rows, n + p);
  Matrix<T> rhs(eq_rows, m);
  int eq = 0;
  for (int i = 0; i < kernel.rows(); ++i) {
    for (int c = 0; c <= k; ++c) {
      for (int r = c + 1; r <= k; ++r)
        for (int col = 0; col < n; ++col)
          for (int z = 0; z < p; ++z)
            coeff(eq, col) += kernel_y(i, r * p + z) * lead_powers[r - c - 1](z, col);
      for (int z = 0; z < p; ++z) coeff(eq, n + z) = kernel_y(i, c * p + z);
      for (int j = 0; j < m; ++j) rhs(eq, j) = -kernel_u(i, c * m + j);
      ++eq;
    }
  }
  const Matrix<T> bd = solve_full_col_rank(coeff, rhs);
  const Matrix<T> b_hat = bd.top_rows(n);
  const Matrix<T> d_hat = bd.bottom_rows(p);

  // Initial state from the first depth-k output window.
  const Matrix<T> theta = detail::toeplitz_from_parts(a_hat, b_hat, c_hat, d_hat, k);
  Matrix<T> y_window((k + 1) * p, 1);
  Matrix<T> u_window((k + 1) * m, 1);
  for (int c = 0; c <= k; ++c) {
    for (int i = 0; i < p; ++i) y_window(c * p + i, 0) = log.y(i, c);
    for (int i = 0; i < m; ++i) u_window(c * m + i, 0) = log.u(i, c);
  }
  const Matrix<T> x0 = solve_full_col_rank(obs, y_window - theta * u_window);

  IdentifiedModel<T> model{StateSpaceSystem<T>(a_hat, b_hat, c_hat, d_hat), x0, T(0),
                           report};
  const Trajectory<T> traj = simulate(model.system, model.x0, log.u);
  model.residual = detail::max_abs(traj.y - log.y);
  if constexpr (std::is_same_v<T, double>) {
    const double scale = std::max(1.0, static_cast<double>(detail::max_abs(log.y)));
    if (model.residual > 1e-8 * scale)
      throw InternalError("identified model does not explain the data");
  } else {
    if (!(model.residual == T(0)))
      throw InternalError("identified model does not explain the data exactly");
  }
  if (!is_minimal(model.system))
    throw InternalError("identified model is not minimal");
  return model;
}

}  // namespace oed
