#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "oed/errors.hpp"
#include "oed/experiment_log.hpp"
#include "oed/hankel.hpp"
#include "oed/informativity.hpp"
#include "oed/input_policy.hpp"
#include "oed/linalg.hpp"
#include "oed/matrix.hpp"
#include "oed/plant.hpp"
#include "oed/rng.hpp"

namespace oed {

/// Audit trail of one online experiment: every applied input with the
/// ranks seen when it was chosen, every stopping-criterion evaluation, and
/// the final (depth, length) pair.
template <typename T>
struct DesignTrace {
  enum class StepKind { Initial, Arbitrary, Avoidance };

  struct Step {
    int t = 0;  // time index of the applied input
    int k = 0;  // working depth when it was chosen
    Count rank_H = 0;       // rank H_{k,t} before the step; 0 if the window does not fit
    Count rank_G = 0;       // rank G_{k,t} before the step; 0 if the window does not fit
    Count rank_H_after = 0; // rank H_{k,t+1} after the step
    std::optional<AvoidanceHyperplane<T>> hyperplane;
    Matrix<T> u;
    StepKind kind = StepKind::Initial;
  };

  struct Check {
    int t = 0;
    int k = 0;
    Count ell_min = 0;
    Count n_min = 0;
    Count L_actual = 0;
  };

  std::vector<Step> steps;
  std::vector<Check> checks;
  int final_k = 0;
  int final_t = 0;
};

template <typename T>
struct OnlineExperimentResult {
  ExperimentLog<T> log;
  DesignTrace<T> trace;
};

/// The avoidance hyperplane of the depth-k rank-increase step: a left
/// kernel vector [xi_0..xi_{k-1}, eta_0..eta_k] of G_{k,t} with eta_k != 0
/// yields the normal eta_k and offset
///   beta = -sum_i (xi_i^T y(t-k+i) + eta_i^T u(t-k+i)).
/// Any input v with eta_k^T v != beta raises rank H_{k,t+1} by exactly one.
/// Throws DepthExhaustedError when no such kernel vector exists, i.e. when
/// rank G_{k,t} = m + rank H_{k-1,t} and the inner design loop must stop.
template <typename T>
AvoidanceHyperplane<T> avoidance_hyperplane(const ExperimentLog<T>& log, int k) {
  if (k < 1) throw DepthRangeError("avoidance hyperplane needs depth k >= 1");
  const int m = log.m();
  const int p = log.p();
  const int t = log.t();
  const Matrix<T> g = hankel_g(log, k);
  const Matrix<T> kernel = left_kernel_basis(g);
  // eta_k occupies the last m coordinates: k*p xi entries, then (k+1)*m
  // eta entries.
  const int eta_k_offset = k * p + k * m;
  int best = -1;
  T best_mag(0);
  for (int i = 0; i < kernel.rows(); ++i) {
    T mag(0);
    for (int j = 0; j < m; ++j) {
      const T a = detail::abs_value(kernel(i, eta_k_offset + j));
      if (a > mag) mag = a;
    }
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  if (best < 0)
    throw DepthExhaustedError("no kernel vector with eta_k != 0 at depth " +
                              std::to_string(k) + ": inner loop finished");
  AvoidanceHyperplane<T> h;
  h.eta = Matrix<T>(m, 1);
  for (int j = 0; j < m; ++j) h.eta(j, 0) = kernel(best, eta_k_offset + j);
  T offset(0);
  for (int i = 0; i < k; ++i) {
    for (int d = 0; d < p; ++d) offset += kernel(best, i * p + d) * log.y(d, t - k + i);
    for (int d = 0; d < m; ++d) offset += kernel(best, k * p + i * m + d) * log.u(d, t - k + i);
  }
  h.beta = -offset;
  return h;
}

namespace detail {

template <typename T>
Count rank_or_zero_io(const ExperimentLog<T>& log, int k) {
  if (k < 0 || k > log.t() - 1) return 0;
  return rank(hankel_io(log, k));
}

template <typename T>
Count rank_or_zero_g(const ExperimentLog<T>& log, int k) {
  if (k < 0 || k > log.t() - 1) return 0;
  return rank(hankel_g(log, k));
}

}  // namespace detail

/// Online design of a shortest informative experiment under the prior
/// bounds lag <= L and state dimension <= N:
///
///   choose u_[0,m-1] nonsingular, t = m, k = 0
///   while k != L_t^a:                      (stopping criterion)
///     k = k+1
///     if t = k: apply one arbitrary input
///     while rank G_{k,t} < m + rank H_{k-1,t}:
///       apply an input off the avoidance hyperplane (rank goes up by one)
///
/// Returns the collected log (informative, with t equal to the provable
/// minimum length) and the design trace.
template <typename T>
OnlineExperimentResult<T> online_experiment(Plant<T>& plant, Count L, Count N,
                                            InputPolicy<T> policy) {
  const int m = plant.input_dim();
  const int p = plant.output_dim();
  if (m < 1 || p < 1) throw DimensionError("plant must have m >= 1 and p >= 1");
  if (L < 0 || N < 0) throw DimensionError("bounds must be nonnegative");

  ExperimentLog<T> log = ExperimentLog<T>::empty(m, p);
  DesignTrace<T> trace;

  auto apply_input = [&](const Matrix<T>& u, int k, typename DesignTrace<T>::StepKind kind,
                         std::optional<AvoidanceHyperplane<T>> hyperplane,
                         Count rank_h_before, Count rank_g_before) {
    typename DesignTrace<T>::Step step;
    step.t = log.t();
    step.k = k;
    step.kind = kind;
    step.rank_H = rank_h_before;
    step.rank_G = rank_g_before;
    step.hyperplane = std::move(hyperplane);
    step.u = u;
    const Matrix<T> y = plant.step(u);
    log.append(u, y);
    step.rank_H_after = detail::rank_or_zero_io(log, k);
    trace.steps.push_back(std::move(step));
  };

  const Matrix<T> initial = policy.initial_block(m);
  for (int j = 0; j < m; ++j)
    apply_input(initial.column(j), 0, DesignTrace<T>::StepKind::Initial, std::nullopt,
                detail::rank_or_zero_io(log, 0), detail::rank_or_zero_g(log, 0));

  int k = 0;
  while (true) {
    if (k > N + 1)
      throw PriorBoundsError("prior bounds violated: depth exceeded N + 1 without "
                             "meeting the stopping criterion");
    const auto [ell_min, n_min] = shortest_lag_min_states(log);
    const Count l_actual = actual_lag_bound(log, L, N);
    trace.checks.push_back({log.t(), k, ell_min, n_min, l_actual});
    if (k == l_actual) break;

    ++k;
    if (log.t() == k)
      apply_input(policy.arbitrary_input(m, log.t()), k, DesignTrace<T>::StepKind::Arbitrary,
                  std::nullopt, 0, 0);

    while (detail::rank_or_zero_g(log, k) <
           m + detail::rank_or_zero_io(log, k - 1)) {
      const Count rank_g = detail::rank_or_zero_g(log, k);
      const Count rank_h = detail::rank_or_zero_io(log, k);
      std::optional<AvoidanceHyperplane<T>> h;
      try {
        h = avoidance_hyperplane(log, k);
      } catch (const DepthExhaustedError&) {
        // Strict rank inequality with every kernel vector zero in the
        // eta_k block: the last column of the depth-(k-1) Hankel matrix is
        // outside the column span of the one-sample-shorter window, so the
        // new depth-k column is independent no matter which input is
        // applied. The choice is unconstrained in this state.
      }
      const Matrix<T> u = h.has_value() ? policy.avoiding_input(*h, log.t())
                                        : policy.arbitrary_input(m, log.t());
      apply_input(u, k, DesignTrace<T>::StepKind::Avoidance, std::move(h), rank_h, rank_g);
      if (trace.steps.back().rank_H_after != rank_h + 1) {
        if (policy.kind() == InputPolicy<T>::Kind::Replay)
          throw ReplayMismatchError("recorded input at t = " + std::to_string(log.t() - 1) +
                                    " failed to raise the working Hankel rank");
        throw InternalError("rank of the working Hankel matrix did not increase by one; "
                            "the plant is not an LTI system within the priors");
      }
    }
  }

  trace.final_k = k;
  trace.final_t = log.t();
  return {std::move(log), std::move(trace)};
}

/// Input sequence of length order-1 + m*order whose depth-(order-1) Hankel
/// matrix is square and nonsingular, i.e. persistently exciting of the
/// requested order at the minimum possible length.
template <typename T>
Matrix<T> design_pe_input(int m, int order, std::uint64_t seed) {
  if (m < 1 || order < 1) throw DimensionError("need m >= 1 and order >= 1");
  const int len = order - 1 + m * order;
  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Matrix<T> u(m, len);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < len; ++j) u(i, j) = T(rng.int_in(-3, 3));
    if (rank(hankel(u, order - 1)) == m * order) return u;
  }
  throw ResamplingError("no persistently exciting input in 1000 draws");
}

struct SampleCounts {
  Count t_online = 0;
  Count t_pe = 0;
  Count t_fixed = 0;
};

/// Sample counts of the three designs: this online procedure, the offline
/// persistency-of-excitation design, and the fixed-depth online design.
inline SampleCounts baseline_sample_counts(Count m, Count L, Count N, Count ell_true,
                                           Count n_true) {
  SampleCounts counts;
  counts.t_online = minimal_experiment_length(ell_true, n_true, m, L, N);
  counts.t_pe = N + L + m * (N + L + 1);
  counts.t_fixed = L + (L + 1) * m + n_true;
  return counts;
}

}  // namespace oed
