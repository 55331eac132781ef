#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "oed/errors.hpp"
#include "oed/linalg.hpp"
#include "oed/matrix.hpp"
#include "oed/rng.hpp"

namespace oed {

/// Affine set {v : eta^T v = beta} of dimension m-1; inputs chosen off this
/// set increase the working Hankel rank by exactly one.
template <typename T>
struct AvoidanceHyperplane {
  Matrix<T> eta;  // m x 1, nonzero
  T beta;
};

template <typename T>
bool lies_on_hyperplane(const AvoidanceHyperplane<T>& h, const Matrix<T>& v) {
  T dot(0);
  for (int i = 0; i < h.eta.rows(); ++i) dot += h.eta(i, 0) * v(i, 0);
  if constexpr (std::is_same_v<T, double>) {
    double scale = std::abs(h.beta);
    for (int i = 0; i < h.eta.rows(); ++i) scale = std::max(scale, std::abs(h.eta(i, 0)));
    return std::abs(dot - h.beta) <= 1e-9 * std::max(1.0, scale);
  } else {
    return dot == h.beta;
  }
}

/// Input selection strategy for the three "choose" points of the online
/// procedure: the nonsingular initial block, the arbitrary depth-priming
/// input, and the hyperplane-avoiding input.
template <typename T>
class InputPolicy {
 public:
  enum class Kind { CanonicalScan, ClosedForm, Replay, SeededRandom };

  static InputPolicy canonical_scan() { return InputPolicy(Kind::CanonicalScan, 0); }
  static InputPolicy closed_form() { return InputPolicy(Kind::ClosedForm, 0); }
  static InputPolicy seeded_random(std::uint64_t seed) {
    return InputPolicy(Kind::SeededRandom, seed);
  }
  static InputPolicy replay(Matrix<T> inputs) {
    InputPolicy p(Kind::Replay, 0);
    p.recorded_ = std::move(inputs);
    return p;
  }

  Kind kind() const { return kind_; }

  std::string name() const {
    switch (kind_) {
      case Kind::CanonicalScan: return "canonical-scan";
      case Kind::ClosedForm: return "closed-form";
      case Kind::Replay: return "replay";
      case Kind::SeededRandom: return "seeded-random";
    }
    return "?";
  }

  /// Nonsingular m x m block of initial inputs (identity unless replaying
  /// or random).
  Matrix<T> initial_block(int m) {
    switch (kind_) {
      case Kind::CanonicalScan:
      case Kind::ClosedForm:
        return Matrix<T>::identity(m);
      case Kind::Replay: {
        if (recorded_.rows() != m || recorded_.cols() < m)
          throw ReplayMismatchError("recorded inputs too short for the initial block");
        Matrix<T> block = recorded_.left_cols(m);
        if (rank(block) != m)
          throw ReplayMismatchError("recorded initial input block is singular");
        return block;
      }
      case Kind::SeededRandom: {
        for (int attempt = 0; attempt < 1000; ++attempt) {
          Matrix<T> block(m, m);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) block(i, j) = T(rng_.int_in(-3, 3));
          if (rank(block) == m) return block;
        }
        throw ResamplingError("no nonsingular initial block in 1000 draws");
      }
    }
    throw InternalError("unreachable");
  }

  /// The unconstrained input used when the loop advances time to prime a
  /// new depth. Any value is admissible; the default is e_1.
  Matrix<T> arbitrary_input(int m, int t) {
    switch (kind_) {
      case Kind::CanonicalScan:
      case Kind::ClosedForm: {
        Matrix<T> v(m, 1);
        v(0, 0) = T(1);
        return v;
      }
      case Kind::Replay:
        return recorded_input(m, t);
      case Kind::SeededRandom: {
        for (int attempt = 0; attempt < 1000; ++attempt) {
          Matrix<T> v(m, 1);
          for (int i = 0; i < m; ++i) v(i, 0) = T(rng_.int_in(-3, 3));
          if (!v.is_zero()) return v;
        }
        throw ResamplingError("no nonzero arbitrary input in 1000 draws");
      }
    }
    throw InternalError("unreachable");
  }

  /// An input off the given hyperplane.
  Matrix<T> avoiding_input(const AvoidanceHyperplane<T>& h, int t) {
    const int m = h.eta.rows();
    Matrix<T> v(m, 1);
    switch (kind_) {
      case Kind::CanonicalScan: {
        // Scan 0, e_1..e_m, -e_1..-e_m, e_1+e_j. The first m+1 candidates
        // are affinely independent, so at least one lies off any
        // (m-1)-dimensional affine set.
        std::vector<Matrix<T>> candidates;
        candidates.push_back(Matrix<T>(m, 1));
        for (int sign : {1, -1})
          for (int i = 0; i < m; ++i) {
            Matrix<T> e(m, 1);
            e(i, 0) = T(sign);
            candidates.push_back(e);
          }
        for (int j = 1; j < m; ++j) {
          Matrix<T> e(m, 1);
          e(0, 0) = T(1);
          e(j, 0) = T(1);
          candidates.push_back(e);
        }
        for (const Matrix<T>& c : candidates)
          if (!lies_on_hyperplane(h, c)) return c;
        throw InternalError("canonical scan exhausted: eta must be zero");
      }
      case Kind::ClosedForm: {
        // The sign vector of the normal: eta^T v = sum |eta_i| > 0, doubled
        // if that happens to hit beta. Stays integer-valued, so exact
        // arithmetic does not accumulate denominators across steps.
        for (int i = 0; i < m; ++i)
          v(i, 0) = h.eta(i, 0) > T(0) ? T(1) : (h.eta(i, 0) < T(0) ? T(-1) : T(0));
        if (lies_on_hyperplane(h, v)) v = v.scaled(T(2));
        if (lies_on_hyperplane(h, v)) throw InternalError("closed-form input on hyperplane");
        return v;
      }
      case Kind::Replay:
        // The recording may sit on the hyperplane and still raise the rank
        // (avoidance is sufficient, not necessary); the design loop checks
        // the actual rank increase instead.
        return recorded_input(m, t);
      case Kind::SeededRandom: {
        for (int attempt = 0; attempt < 1000; ++attempt) {
          for (int i = 0; i < m; ++i) v(i, 0) = T(rng_.int_in(-3, 3));
          if (!lies_on_hyperplane(h, v)) return v;
        }
        throw ResamplingError("no off-hyperplane input in 1000 draws");
      }
    }
    throw InternalError("unreachable");
  }

 private:
  InputPolicy(Kind kind, std::uint64_t seed) : kind_(kind), rng_(seed) {}

  Matrix<T> recorded_input(int m, int t) const {
    if (recorded_.rows() != m || t >= recorded_.cols())
      throw ReplayMismatchError("recorded inputs exhausted at t = " + std::to_string(t));
    return recorded_.column(t);
  }

  Kind kind_;
  Matrix<T> recorded_;
  SplitMix64 rng_;
};

/// An input off the hyperplane, chosen by the policy. A replayed recording
/// whose input sits on the hyperplane is rejected here.
template <typename T>
Matrix<T> choose_input(const AvoidanceHyperplane<T>& h, InputPolicy<T>& policy, int t) {
  Matrix<T> v = policy.avoiding_input(h, t);
  if (lies_on_hyperplane(h, v))
    throw ReplayMismatchError("chosen input at t = " + std::to_string(t) +
                              " lies on the avoidance hyperplane");
  return v;
}

}  // namespace oed
