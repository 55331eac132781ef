#pragma once

#include <cmath>
#include <memory>
#include <type_traits>

#include "oed/errors.hpp"
#include "oed/experiment_log.hpp"
#include "oed/matrix.hpp"
#include "oed/state_space.hpp"

namespace oed {

/// Measurement-only interface to the system under experiment: feed one
/// input, observe one output, advance one step. Deterministic by contract.
template <typename T>
class Plant {
 public:
  virtual ~Plant() = default;
  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;
  virtual Matrix<T> step(const Matrix<T>& u) = 0;
};

/// Wraps a state-space system and an initial state.
template <typename T>
class SimulatedPlant : public Plant<T> {
 public:
  SimulatedPlant(StateSpaceSystem<T> sys, Matrix<T> x0) : sys_(std::move(sys)), x_(std::move(x0)) {
    if (x_.rows() != sys_.n() || x_.cols() != 1)
      throw DimensionError("initial state must be an n-vector");
  }

  int input_dim() const override { return sys_.m(); }
  int output_dim() const override { return sys_.p(); }

  Matrix<T> step(const Matrix<T>& u) override {
    if (u.rows() != sys_.m() || u.cols() != 1) throw DimensionError("input must be an m-vector");
    Matrix<T> y = sys_.C * x_ + sys_.D * u;
    x_ = sys_.A * x_ + sys_.B * u;
    return y;
  }

 private:
  StateSpaceSystem<T> sys_;
  Matrix<T> x_;
};

/// Serves a prerecorded log; errors if a queried input deviates from the
/// recording (exact comparison over rationals, small tolerance for doubles).
template <typename T>
class ReplayPlant : public Plant<T> {
 public:
  explicit ReplayPlant(ExperimentLog<T> log) : log_(std::move(log)) {}

  int input_dim() const override { return log_.m(); }
  int output_dim() const override { return log_.p(); }

  Matrix<T> step(const Matrix<T>& u) override {
    if (pos_ >= log_.t()) throw ReplayMismatchError("replay log exhausted");
    if (u.rows() != log_.m() || u.cols() != 1) throw DimensionError("input must be an m-vector");
    for (int i = 0; i < log_.m(); ++i)
      if (!entries_match(u(i, 0), log_.u(i, pos_)))
        throw ReplayMismatchError("queried input deviates from the recording at t = " +
                                  std::to_string(pos_));
    return log_.y.column(pos_++);
  }

 private:
  static bool entries_match(const T& a, const T& b) {
    if constexpr (std::is_same_v<T, double>)
      return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
    else
      return a == b;
  }

  ExperimentLog<T> log_;
  int pos_ = 0;
};

}  // namespace oed
