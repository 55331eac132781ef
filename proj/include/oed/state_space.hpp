#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oed/errors.hpp"
#include "oed/hankel.hpp"
#include "oed/linalg.hpp"
#include "oed/matrix.hpp"
#include "oed/rng.hpp"

namespace oed {

/// Discrete-time input-state-output system
///   x(t+1) = A x(t) + B u(t)
///   y(t)   = C x(t) + D u(t)
/// with n >= 0 states, m >= 1 inputs, p >= 1 outputs. n = 0 is legal; A, B
/// and C are then void.
template <typename T>
struct StateSpaceSystem {
  Matrix<T> A, B, C, D;

  StateSpaceSystem(Matrix<T> a, Matrix<T> b, Matrix<T> c, Matrix<T> d)
      : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    if (A.rows() != A.cols()) throw DimensionError("A must be square");
    if (B.rows() != A.rows()) throw DimensionError("B row count must match A");
    if (C.cols() != A.rows()) throw DimensionError("C column count must match A");
    if (D.rows() != C.rows() || D.cols() != B.cols())
      throw DimensionError("D shape must be p x m");
    if (m() < 1 || p() < 1) throw DimensionError("need m >= 1 and p >= 1");
  }

  int n() const { return A.rows(); }
  int m() const { return B.cols(); }
  int p() const { return C.rows(); }

  bool operator==(const StateSpaceSystem& other) const {
    return A == other.A && B == other.B && C == other.C && D == other.D;
  }
};

template <typename T>
struct Trajectory {
  Matrix<T> x0;  // n x 1
  Matrix<T> u;   // m x len
  Matrix<T> y;   // p x len
  Matrix<T> x;   // n x (len+1), state sequence including the final state
};

/// k-th observability matrix: void 0 x n for k = -1, otherwise the stack
/// C, CA, ..., CA^k.
template <typename T>
Matrix<T> observability_matrix(const StateSpaceSystem<T>& sys, int k) {
  if (k < -1) throw DepthRangeError("observability index must be >= -1");
  Matrix<T> out(0, sys.n());
  Matrix<T> block = sys.C;
  for (int i = 0; i <= k; ++i) {
    out = vstack(out, block);
    if (i < k) block = block * sys.A;
  }
  return out;
}

/// k-th controllability matrix: void n x 0 for k = -1, otherwise
/// [A^k B, A^{k-1} B, ..., B].
template <typename T>
Matrix<T> controllability_matrix(const StateSpaceSystem<T>& sys, int k) {
  if (k < -1) throw DepthRangeError("controllability index must be >= -1");
  Matrix<T> out(sys.n(), 0);
  Matrix<T> block = sys.B;
  for (int i = 0; i <= k; ++i) {
    out = hstack(block, out);
    if (i < k) block = sys.A * block;
  }
  return out;
}

/// Markov parameters [D, CB, CAB, ..., CA^{horizon-2}B].
template <typename T>
std::vector<Matrix<T>> markov_parameters(const StateSpaceSystem<T>& sys, int horizon) {
  if (horizon < 1) throw DepthRangeError("markov horizon must be >= 1");
  std::vector<Matrix<T>> out;
  out.reserve(horizon);
  out.push_back(sys.D);
  Matrix<T> lead = sys.C;
  for (int i = 1; i < horizon; ++i) {
    out.push_back(lead * sys.B);
    if (i + 1 < horizon) lead = lead * sys.A;
  }
  return out;
}

/// k-th Toeplitz matrix of Markov parameters, (k+1)p x (k+1)m, with block
/// (r, c) equal to D on the diagonal and CA^{r-c-1}B below it.
template <typename T>
Matrix<T> toeplitz_markov(const StateSpaceSystem<T>& sys, int k) {
  if (k < -1) throw DepthRangeError("toeplitz index must be >= -1");
  const int p = sys.p();
  const int m = sys.m();
  Matrix<T> out((k + 1) * p, (k + 1) * m);
  const std::vector<Matrix<T>> blocks = markov_parameters(sys, k + 1 >= 1 ? k + 1 : 1);
  for (int r = 0; r <= k; ++r)
    for (int c = 0; c <= r; ++c)
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < m; ++j) out(r * p + i, c * m + j) = blocks[r - c](i, j);
  return out;
}

/// The lag: smallest k >= 0 with rank O_k = rank O_{k-1}. Zero for n = 0
/// and always at most n.
template <typename T>
int lag(const StateSpaceSystem<T>& sys) {
  if (sys.n() == 0) return 0;
  int prev_rank = 0;  // rank of the void O_{-1}
  Matrix<T> omega(0, sys.n());
  Matrix<T> block = sys.C;
  for (int k = 0; k <= sys.n(); ++k) {
    omega = vstack(omega, block);
    const int r = rank(omega);
    if (r == prev_rank) return k;
    prev_rank = r;
    block = block * sys.A;
  }
  throw InternalError("lag failed to stabilize by k = n");
}

/// Controllable and observable; vacuously true for n = 0.
template <typename T>
bool is_minimal(const StateSpaceSystem<T>& sys) {
  const int n = sys.n();
  if (n == 0) return true;
  return rank(controllability_matrix(sys, n - 1)) == n &&
         rank(observability_matrix(sys, n - 1)) == n;
}

/// Runs the state recursion from x0 over the input columns of u.
template <typename T>
Trajectory<T> simulate(const StateSpaceSystem<T>& sys, const Matrix<T>& x0,
                       const Matrix<T>& u) {
  if (x0.rows() != sys.n() || x0.cols() != 1)
    throw DimensionError("x0 must be an n-vector");
  if (u.rows() != sys.m()) throw DimensionError("input dimension mismatch");
  const int len = u.cols();
  Trajectory<T> traj;
  traj.x0 = x0;
  traj.u = u;
  traj.y = Matrix<T>(sys.p(), len);
  traj.x = Matrix<T>(sys.n(), len + 1);
  Matrix<T> x = x0;
  for (int t = 0; t < len; ++t) {
    for (int i = 0; i < sys.n(); ++i) traj.x(i, t) = x(i, 0);
    const Matrix<T> ut = u.column(t);
    const Matrix<T> yt = sys.C * x + sys.D * ut;
    for (int i = 0; i < sys.p(); ++i) traj.y(i, t) = yt(i, 0);
    x = sys.A * x + sys.B * ut;
  }
  for (int i = 0; i < sys.n(); ++i) traj.x(i, len) = x(i, 0);
  return traj;
}

/// Isomorphism test for minimal systems: equal state dimension and equal
/// Markov parameters up to horizon 2n+1 (which pins the whole impulse
/// response for order-n minimal realizations).
template <typename T>
bool are_isomorphic(const StateSpaceSystem<T>& sys1, const StateSpaceSystem<T>& sys2) {
  if (!is_minimal(sys1) || !is_minimal(sys2))
    throw NotMinimalError("isomorphism test requires minimal systems");
  if (sys1.n() != sys2.n() || sys1.m() != sys2.m() || sys1.p() != sys2.p()) return false;
  const int horizon = 2 * sys1.n() + 1;
  const auto mk1 = markov_parameters(sys1, horizon);
  const auto mk2 = markov_parameters(sys2, horizon);
  for (int i = 0; i < horizon; ++i)
    if (mk1[i] != mk2[i]) return false;
  return true;
}

/// Change of state basis: (S^-1 A S, S^-1 B, C S, D).
template <typename T>
StateSpaceSystem<T> similarity_transform(const StateSpaceSystem<T>& sys,
                                         const Matrix<T>& s) {
  if (s.rows() != sys.n() || s.cols() != sys.n())
    throw DimensionError("similarity transform must be n x n");
  const Matrix<T> s_inv = solve_full_col_rank(s, Matrix<T>::identity(sys.n()));
  return StateSpaceSystem<T>(s_inv * sys.A * s, s_inv * sys.B, sys.C * s, sys.D);
}

/// Draws integer systems with entries in [-3, 3] until one is minimal.
/// Deterministic for a given seed; errors after 1000 draws.
template <typename T>
StateSpaceSystem<T> random_minimal_system(int n, int m, int p, std::uint64_t seed) {
  if (n < 1 || m < 1 || p < 1)
    throw DimensionError("random_minimal_system needs n, m, p >= 1");
  SplitMix64 rng(seed);
  auto draw = [&rng](int rows, int cols) {
    Matrix<T> out(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) out(i, j) = T(rng.int_in(-3, 3));
    return out;
  };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    StateSpaceSystem<T> sys(draw(n, n), draw(n, m), draw(p, n), draw(p, m));
    if (is_minimal(sys)) return sys;
  }
  throw ResamplingError("no minimal system found in 1000 draws");
}

}  // namespace oed
