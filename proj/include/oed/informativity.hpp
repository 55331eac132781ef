#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "oed/errors.hpp"
#include "oed/experiment_log.hpp"
#include "oed/hankel.hpp"
#include "oed/linalg.hpp"
#include "oed/matrix.hpp"

namespace oed {

using Count = long long;

/// Everything the informativity verdict is made of. `informative` is the
/// conjunction of the length and rank conditions; `delta_profile` lists the
/// rank differences for k = -1 .. q_t; `T` is the length threshold
/// L_actual + (L_actual+1)m + n_min the length condition compares against.
struct InformativityReport {
  Count ell_min = 0;
  Count n_min = 0;
  Count L_actual = 0;
  Count rank_H = 0;
  bool length_ok = false;
  bool rank_ok = false;
  bool informative = false;
  std::vector<Count> delta_profile;
  Count t = 0;
  Count T = 0;
};

/// Data Hankel matrix of k+1 block rows: outputs stacked over inputs,
/// shape (k+1)(p+m) x (t-k).
template <typename T>
Matrix<T> hankel_io(const ExperimentLog<T>& log, int k) {
  if (k < 0 || k > log.t() - 1)
    throw DepthRangeError("hankel_io depth " + std::to_string(k) +
                          " out of range for t = " + std::to_string(log.t()));
  return vstack(hankel(log.y, k), hankel(log.u, k));
}

/// The same matrix with the last block row of outputs removed: the depth
/// k-1 output Hankel over the first t-1 samples stacked over the depth-k
/// input Hankel. For k = 0 the output block is void.
template <typename T>
Matrix<T> hankel_g(const ExperimentLog<T>& log, int k) {
  if (k < 0 || k > log.t() - 1)
    throw DepthRangeError("hankel_g depth " + std::to_string(k) +
                          " out of range for t = " + std::to_string(log.t()));
  Matrix<T> output_block =
      k == 0 ? Matrix<T>(0, log.t()) : hankel(log.y.left_cols(log.t() - 1), k - 1);
  return vstack(output_block, hankel(log.u, k));
}

/// Rank difference delta_{k,t} = rank H_{k,t} - rank G_{k,t}; by convention
/// p for k = -1. Always in [0, p].
template <typename T>
Count delta(const ExperimentLog<T>& log, int k) {
  if (k < -1 || k > log.t() - 1)
    throw DepthRangeError("delta index " + std::to_string(k) + " out of range");
  if (k == -1) return log.p();
  return rank(hankel_io(log, k)) - rank(hankel_g(log, k));
}

namespace detail {

template <typename T>
void require_nonzero_input(const ExperimentLog<T>& log) {
  if (log.t() == 0 || log.input_is_zero())
    throw ZeroInputError("analysis requires a nonzero input sequence");
}

}  // namespace detail

/// Shortest lag and minimum state count of any explaining system:
/// ell_min = q_t, the first k with delta_{k,t} = 0, and n_min the running
/// sum of the deltas up to there.
template <typename T>
std::pair<Count, Count> shortest_lag_min_states(const ExperimentLog<T>& log) {
  detail::require_nonzero_input(log);
  Count sum = 0;
  for (int k = 0; k <= log.t() - 1; ++k) {
    const Count d = delta(log, k);
    sum += d;
    if (d == 0) return {k, sum};
  }
  throw InternalError("delta never reached zero despite nonzero input");
}

/// Data-refined upper bound min(L, N - n_min + ell_min) on the lag of any
/// explaining system with at most N states.
template <typename T>
Count actual_lag_bound(const ExperimentLog<T>& log, Count L, Count N) {
  if (L < 0 || N < 0) throw DimensionError("bounds must be nonnegative");
  const auto [ell_min, n_min] = shortest_lag_min_states(log);
  if (N < n_min)
    throw PriorBoundsError("state bound N = " + std::to_string(N) +
                           " is below n_min = " + std::to_string(n_min));
  return std::min(L, N - n_min + ell_min);
}

/// The informativity verdict: the data length must reach
/// L_actual + (L_actual+1)m + n_min and the depth-L_actual Hankel matrix
/// must have rank exactly (L_actual+1)m + n_min.
template <typename T>
InformativityReport check_informativity(const ExperimentLog<T>& log, Count L, Count N) {
  if (L < 0 || N < 0) throw DimensionError("bounds must be nonnegative");
  detail::require_nonzero_input(log);
  InformativityReport report;
  report.t = log.t();
  const auto [ell_min, n_min] = shortest_lag_min_states(log);
  report.ell_min = ell_min;
  report.n_min = n_min;
  for (Count k = -1; k <= ell_min; ++k) report.delta_profile.push_back(delta(log, static_cast<int>(k)));
  if (N < n_min)
    throw PriorBoundsError("state bound N = " + std::to_string(N) +
                           " is below n_min = " + std::to_string(n_min));
  report.L_actual = std::min(L, N - n_min + ell_min);
  const Count required_rank = (report.L_actual + 1) * log.m() + n_min;
  report.T = report.L_actual + required_rank;
  report.length_ok = report.t >= report.T;
  if (report.L_actual <= log.t() - 1) {
    report.rank_H = rank(hankel_io(log, static_cast<int>(report.L_actual)));
    report.rank_ok = report.rank_H == required_rank;
  } else {
    // The depth-L_actual window does not fit in the data; the length
    // condition necessarily fails too.
    report.rank_H = 0;
    report.rank_ok = false;
  }
  report.informative = report.length_ok && report.rank_ok;
  return report;
}

/// Provable minimum experiment length T = La + (La+1)m + n_true with
/// La = min(L, N - n_true + ell_true).
inline Count minimal_experiment_length(Count ell_true, Count n_true, Count m, Count L,
                                       Count N) {
  if (m < 1) throw DimensionError("need m >= 1");
  if (ell_true < 0 || n_true < 0 || L < 0 || N < 0)
    throw DimensionError("counts must be nonnegative");
  if (ell_true > L || n_true > N)
    throw PriorBoundsError("bounds must satisfy ell_true <= L and n_true <= N");
  const Count la = std::min(L, N - n_true + ell_true);
  return la + (la + 1) * m + n_true;
}

}  // namespace oed
