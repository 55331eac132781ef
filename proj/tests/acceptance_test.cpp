// Acceptance suite: one test case per criterion, each printing a final
// pass line. Criteria 4-6 share a cached batch of 100 seeded end-to-end
// runs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "oed/experiment_design.hpp"
#include "oed/informativity.hpp"
#include "oed/plant.hpp"
#include "oed/realization.hpp"
#include "oed/reference_experiment.hpp"
#include "oed/state_space.hpp"
#include "oracle.hpp"

using oed::Count;
using oed::ExperimentLog;
using oed::InputPolicy;
using oed::Matrix;
using oed::Rational;
using RatMat = Matrix<Rational>;

namespace ref = oed::reference;

namespace {

void pass(int criterion, const char* what) {
  std::printf("criterion %d: PASS — %s\n", criterion, what);
  std::fflush(stdout);
}

struct Trial {
  oed::StateSpaceSystem<Rational> system;
  Count L = 0;
  Count N = 0;
  oed::OnlineExperimentResult<Rational> result;
  oed::InformativityReport report;
};

/// 100 seeded random minimal systems with n in [1,4], m,p in [1,3], random
/// integer initial states, bounds sampled at or above the true values, and
/// the policy cycled across trials.
const std::vector<Trial>& trials() {
  static const std::vector<Trial> cached = [] {
    std::vector<Trial> out;
    oed::SplitMix64 rng(2024);
    for (int i = 0; i < 100; ++i) {
      const int n = static_cast<int>(rng.int_in(1, 4));
      const int m = static_cast<int>(rng.int_in(1, 3));
      const int p = static_cast<int>(rng.int_in(1, 3));
      const auto sys = oed::random_minimal_system<Rational>(n, m, p, 9000 + i);
      const Count L = oed::lag(sys) + rng.int_in(0, 2);
      const Count N = n + rng.int_in(0, 3);
      RatMat x0(n, 1);
      for (int j = 0; j < n; ++j) x0(j, 0) = Rational(rng.int_in(-3, 3));
      InputPolicy<Rational> policy = i % 3 == 0   ? InputPolicy<Rational>::canonical_scan()
                                     : i % 3 == 1 ? InputPolicy<Rational>::closed_form()
                                                  : InputPolicy<Rational>::seeded_random(i);
      oed::SimulatedPlant<Rational> plant(sys, x0);
      auto result = oed::online_experiment<Rational>(plant, L, N, policy);
      auto report = oed::check_informativity(result.log, L, N);
      out.push_back({sys, L, N, std::move(result), std::move(report)});
    }
    return out;
  }();
  return cached;
}

}  // namespace

TEST_CASE("criterion 1: bit-exact replay of the reference experiment") {
  const auto start = std::chrono::steady_clock::now();

  oed::SimulatedPlant<Rational> plant(ref::system<Rational>(), ref::initial_state<Rational>());
  const auto result = oed::online_experiment<Rational>(
      plant, ref::bound_L, ref::bound_N, InputPolicy<Rational>::replay(ref::inputs<Rational>()));

  REQUIRE(result.log.u == ref::inputs<Rational>());
  REQUIRE(result.log.y == ref::outputs<Rational>());
  REQUIRE(result.trace.final_t == 14);
  REQUIRE(result.trace.final_k == 3);

  REQUIRE(result.trace.checks.size() == ref::expected_checks().size());
  for (std::size_t i = 0; i < ref::expected_checks().size(); ++i) {
    const auto& want = ref::expected_checks()[i];
    const auto& got = result.trace.checks[i];
    REQUIRE(got.t == want.t);
    REQUIRE(got.ell_min == want.ell_min);
    REQUIRE(got.n_min == want.n_min);
    REQUIRE(got.L_actual == want.L_actual);
  }
  for (const auto& tr : ref::expected_rank_transitions()) {
    REQUIRE(oed::rank(oed::hankel_io(result.log.prefix(tr.t_enter), tr.depth)) == tr.rank_enter);
    REQUIRE(oed::rank(oed::hankel_io(result.log.prefix(tr.t_exit), tr.depth)) == tr.rank_exit);
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(elapsed < 1.0);
  pass(1, "reference replay is bit-exact, T = 14, runtime < 1 s");
}

TEST_CASE("criterion 2: excitation of order 4 without informativity") {
  const auto start = std::chrono::steady_clock::now();

  const auto log = ref::counterexample_log<Rational>();
  REQUIRE(oed::rank(oed::hankel(log.u, 3)) == 8);
  REQUIRE(oed::is_persistently_exciting(log.u, 4));
  REQUIRE(oed::rank(oed::hankel_io(log, 3)) == 10);
  const auto report = oed::check_informativity(log, ref::bound_L, ref::bound_N);
  REQUIRE(report.rank_H == 10);
  REQUIRE_FALSE(report.rank_ok);
  REQUIRE_FALSE(report.informative);

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(elapsed < 1.0);
  pass(2, "rank H_3(u) = 8 yet rank 10 != 11, verdict negative, runtime < 1 s");
}

TEST_CASE("criterion 3: sample-count comparison") {
  const auto start = std::chrono::steady_clock::now();
  const auto counts = oed::baseline_sample_counts(80, 100, 150, 20, 100);
  REQUIRE(counts.t_online == 5850);
  REQUIRE(counts.t_pe == 20330);
  REQUIRE(counts.t_fixed == 8280);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(elapsed < 0.001);
  pass(3, "(5850, 20330, 8280), runtime < 1 ms");
}

TEST_CASE("criterion 4: termination at the provable minimum length, 100 seeded systems") {
  const auto start = std::chrono::steady_clock::now();
  for (const auto& trial : trials()) {
    const Count expected = oed::minimal_experiment_length(
        oed::lag(trial.system), trial.system.n(), trial.system.m(), trial.L, trial.N);
    REQUIRE(trial.result.trace.final_t == expected);
    REQUIRE(trial.result.trace.final_k == trial.report.L_actual);
    REQUIRE(trial.report.informative);
    REQUIRE(trial.report.ell_min == oed::lag(trial.system));
    REQUIRE(trial.report.n_min == trial.system.n());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(elapsed < 60.0);
  pass(4, "100/100 runs terminate at T, informative, with true lag and order");
}

TEST_CASE("criterion 5: end-to-end identification on every trial") {
  const auto start = std::chrono::steady_clock::now();
  for (const auto& trial : trials()) {
    const auto model = oed::identify(trial.result.log, trial.report);
    REQUIRE(model.residual == Rational(0));
    REQUIRE(oed::are_isomorphic(model.system, trial.system));
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(elapsed < 60.0);
  pass(5, "100/100 identified models have zero residual and are isomorphic to the truth");
}

TEST_CASE("criterion 6: every inner-loop step raises the working rank by one") {
  int steps = 0;
  for (const auto& trial : trials()) {
    for (const auto& step : trial.result.trace.steps) {
      if (step.kind != oed::DesignTrace<Rational>::StepKind::Avoidance) continue;
      REQUIRE(step.rank_H_after == step.rank_H + 1);
      // Full column rank at entry: t - k columns, all independent.
      REQUIRE(step.rank_H == step.t - step.k);
      ++steps;
    }
  }
  REQUIRE(steps > 100);
  pass(6, "rank H_{k,t+1} = rank H_{k,t} + 1 in every recorded avoidance step");
}

TEST_CASE("criterion 7: full column rank propagates to deeper Hankel matrices") {
  const auto start = std::chrono::steady_clock::now();
  oed::SplitMix64 rng(77);
  int checked = 0;
  while (checked < 200) {
    const int m = static_cast<int>(rng.int_in(1, 3));
    const int p = static_cast<int>(rng.int_in(1, 3));
    const int k = static_cast<int>(rng.int_in(0, 3));
    const int t = k + 2 + static_cast<int>(rng.int_in(0, 3));
    const ExperimentLog<Rational> log(oracle::random_matrix(rng, m, t, -3, 3),
                                      oracle::random_matrix(rng, p, t, -3, 3));
    const RatMat h = oed::hankel_io(log, k);
    if (oed::rank(h) != h.cols()) continue;  // need a full-column-rank sample
    const RatMat deeper = oed::hankel_io(log, k + 1);
    REQUIRE(oed::rank(deeper) == deeper.cols());
    ++checked;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(elapsed < 10.0);
  pass(7, "200/200 full-column-rank logs stay full column rank one depth deeper");
}

TEST_CASE("criterion 8: excitation designs hit the guaranteed Hankel rank") {
  const auto start = std::chrono::steady_clock::now();
  oed::SplitMix64 rng(88);
  for (int i = 0; i < 50; ++i) {
    const int n = static_cast<int>(rng.int_in(1, 3));
    const int m = static_cast<int>(rng.int_in(1, 2));
    const int p = static_cast<int>(rng.int_in(1, 2));
    const auto sys = oed::random_minimal_system<Rational>(n, m, p, 7000 + i);
    const Count ell = oed::lag(sys);
    REQUIRE(ell >= 1);  // minimal systems with n >= 1 always have lag >= 1
    const Count L = ell + rng.int_in(0, 1);
    const Count N = n + rng.int_in(0, 1);
    const RatMat u = oed::design_pe_input<Rational>(m, static_cast<int>(N + L + 1), 7100 + i);
    RatMat x0(n, 1);
    for (int j = 0; j < n; ++j) x0(j, 0) = Rational(rng.int_in(-3, 3));
    const auto traj = oed::simulate(sys, x0, u);
    const ExperimentLog<Rational> log(u, traj.y);
    REQUIRE(oed::rank(oed::hankel_io(log, static_cast<int>(L))) == (L + 1) * m + n);
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(elapsed < 30.0);
  pass(8, "50/50 excitation designs give rank H_L = (L+1)m + n_true");
}

TEST_CASE("criterion 9: float mode reproduces the exact-mode verdicts and ranks") {
  // Criterion 1 in float mode.
  oed::SimulatedPlant<double> plant(ref::system<double>(), ref::initial_state<double>());
  const auto result = oed::online_experiment<double>(
      plant, ref::bound_L, ref::bound_N, InputPolicy<double>::replay(ref::inputs<double>()));
  REQUIRE(result.trace.final_t == 14);
  REQUIRE(result.trace.final_k == 3);
  REQUIRE(result.log.u == ref::inputs<double>());
  REQUIRE(result.log.y == ref::outputs<double>());
  for (std::size_t i = 0; i < ref::expected_checks().size(); ++i) {
    const auto& want = ref::expected_checks()[i];
    const auto& got = result.trace.checks[i];
    REQUIRE(got.ell_min == want.ell_min);
    REQUIRE(got.n_min == want.n_min);
    REQUIRE(got.L_actual == want.L_actual);
  }
  for (const auto& tr : ref::expected_rank_transitions()) {
    REQUIRE(oed::rank(oed::hankel_io(result.log.prefix(tr.t_enter), tr.depth)) == tr.rank_enter);
    REQUIRE(oed::rank(oed::hankel_io(result.log.prefix(tr.t_exit), tr.depth)) == tr.rank_exit);
  }
  const auto report = oed::check_informativity(result.log, ref::bound_L, ref::bound_N);
  REQUIRE(report.informative);
  REQUIRE(report.rank_H == 11);

  // Criterion 2 in float mode.
  const auto cx = ref::counterexample_log<double>();
  REQUIRE(oed::rank(oed::hankel(cx.u, 3)) == 8);
  const auto cx_report = oed::check_informativity(cx, ref::bound_L, ref::bound_N);
  REQUIRE_FALSE(cx_report.informative);
  REQUIRE(cx_report.rank_H == 10);

  pass(9, "float-mode verdicts and integer ranks match exact mode");
}
