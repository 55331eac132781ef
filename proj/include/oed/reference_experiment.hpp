#pragma once

#include <vector>

#include "oed/experiment_log.hpp"
#include "oed/matrix.hpp"
#include "oed/state_space.hpp"

namespace oed::reference {

/// Bundled reference experiment: a 3-state, 2-input, 2-output minimal
/// system with lag 2, driven from x0 = [1 1 0]^T under the bounds
/// L = 4, N = 4. The online procedure terminates after exactly 14 samples.
/// Every intermediate rank and the full input/output tables are recorded
/// here so runs can be checked bit-exactly.

template <typename T>
StateSpaceSystem<T> system() {
  return StateSpaceSystem<T>(Matrix<T>{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}},
                             Matrix<T>{{1, 0}, {0, 1}, {0, 1}},
                             Matrix<T>{{1, 0, 0}, {0, 1, 0}},
                             Matrix<T>{{1, 0}, {0, 0}});
}

template <typename T>
Matrix<T> initial_state() {
  return Matrix<T>{{1}, {1}, {0}};
}

inline constexpr long long lag_true = 2;
inline constexpr long long n_true = 3;
inline constexpr long long bound_L = 4;
inline constexpr long long bound_N = 4;
inline constexpr long long experiment_length = 14;

template <typename T>
Matrix<T> inputs() {
  return Matrix<T>{{1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0},
                   {0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1}};
}

template <typename T>
Matrix<T> outputs() {
  return Matrix<T>{{2, 2, 1, 3, 3, 2, 2, 2, 2, 3, 3, 2, 1, 0},
                   {1, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 1}};
}

template <typename T>
ExperimentLog<T> log() {
  return ExperimentLog<T>(inputs<T>(), outputs<T>());
}

/// Same experiment with u(12) flipped from [0 1]^T to [1 0]^T: the input
/// stays persistently exciting of order 4, yet the data are no longer
/// informative (the depth-3 Hankel rank drops to 10 instead of 11).
template <typename T>
Matrix<T> counterexample_inputs() {
  return Matrix<T>{{1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0},
                   {0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1}};
}

template <typename T>
Matrix<T> counterexample_outputs() {
  return Matrix<T>{{2, 2, 1, 3, 3, 2, 2, 2, 2, 3, 3, 2, 2, 1},
                   {1, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0}};
}

template <typename T>
ExperimentLog<T> counterexample_log() {
  return ExperimentLog<T>(counterexample_inputs<T>(), counterexample_outputs<T>());
}

/// Expected values at the four stopping-criterion checks.
struct CheckExpectation {
  int t;
  long long ell_min;
  long long n_min;
  long long L_actual;
};

inline const std::vector<CheckExpectation>& expected_checks() {
  static const std::vector<CheckExpectation> values = {
      {2, 0, 0, 4}, {8, 2, 3, 3}, {11, 2, 3, 3}, {14, 2, 3, 3}};
  return values;
}

/// Expected working-Hankel rank transitions per depth: rank at one sample
/// into the depth's inner loop, and rank when the loop exits.
struct RankTransition {
  int depth;
  int t_enter;  // one step into the inner loop
  long long rank_enter;
  int t_exit;
  long long rank_exit;
};

inline const std::vector<RankTransition>& expected_rank_transitions() {
  static const std::vector<RankTransition> values = {
      {1, 3, 2, 8, 7}, {2, 9, 7, 11, 9}, {3, 12, 9, 14, 11}};
  return values;
}

}  // namespace oed::reference
