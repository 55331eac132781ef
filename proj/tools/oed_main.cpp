// Command-line surface: run online experiments against configured plants,
// check informativity of recorded logs, identify models, re-run the bundled
// reference experiment, and compare models or sample counts.
//
// Exit codes: 0 success/informative, 1 negative domain verdict, 2 usage or
// configuration error, 3 internal guard (violated priors, replay mismatch).

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "oed/errors.hpp"
#include "oed/experiment_design.hpp"
#include "oed/informativity.hpp"
#include "oed/io.hpp"
#include "oed/plant.hpp"
#include "oed/realization.hpp"
#include "oed/reference_experiment.hpp"
#include "oed/state_space.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictNegative = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;

struct CommonOptions {
  std::string mode = "exact";
  std::uint64_t seed = 0;
  std::string out_dir;
  long long L = -1;
  long long N = -1;
};

struct RunOptions : CommonOptions {
  std::string config_path;
  int trials = 1;
};

struct LogOptions : CommonOptions {
  std::string log_path;
  std::string out_path;
};

struct ReproduceOptions : CommonOptions {
  int mutate_sample = -1;
};

struct CompareOptions : CommonOptions {
  std::string model_a;
  std::string model_b;
  bool samples = false;
  long long m = 0;
  long long ell_true = 0;
  long long n_true = 0;
};

template <typename T>
struct ParsedConfig {
  std::unique_ptr<oed::Plant<T>> plant;
  oed::InputPolicy<T> policy = oed::InputPolicy<T>::canonical_scan();
  long long L = 0;
  long long N = 0;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string policy_name = "canonical-scan";
};

template <typename T>
oed::Matrix<T> matrix_from_rows_json(const oed::Json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw oed::ConfigError("'" + name + "' must be an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.front().size());
  oed::Json flat = oed::Json::array();
  for (const auto& row : j) {
    if (static_cast<int>(row.size()) != cols) throw oed::ConfigError("'" + name + "' is ragged");
    for (const auto& e : row) flat.push_back(e);
  }
  return oed::detail::matrix_from_json<T>(flat, rows, cols, name);
}

template <typename T>
oed::Matrix<T> x0_from_json(const oed::Json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw oed::ConfigError("'x0' must hold n = " + std::to_string(n) + " entries");
  oed::Json flat = oed::Json::array();
  for (const auto& e : j) flat.push_back(e);
  return oed::detail::matrix_from_json<T>(flat, n, 1, "x0");
}

template <typename T>
ParsedConfig<T> parse_run_config(const oed::Json& cfg, const RunOptions& opts) {
  ParsedConfig<T> parsed;
  if (!cfg.contains("plant")) throw oed::ConfigError("config is missing 'plant'");
  const oed::Json& plant = cfg.at("plant");

  int sources = 0;
  for (const char* key : {"system", "system_path", "replay_log"})
    if (plant.contains(key)) ++sources;
  if (sources != 1)
    throw oed::ConfigError("plant must name exactly one of system, system_path, replay_log");

  std::optional<oed::ExperimentLog<T>> replay_log;
  if (plant.contains("replay_log")) {
    replay_log = oed::log_from_csv<T>(oed::read_file(plant.at("replay_log").get<std::string>()));
    parsed.plant = std::make_unique<oed::ReplayPlant<T>>(*replay_log);
  } else {
    const oed::Json sys_json =
        plant.contains("system")
            ? plant.at("system")
            : oed::parse_json(oed::read_file(plant.at("system_path").get<std::string>()),
                              "system file");
    oed::StateSpaceSystem<T> sys = oed::system_from_json<T>(sys_json);
    oed::Matrix<T> x0(sys.n(), 1);
    if (plant.contains("x0")) x0 = x0_from_json<T>(plant.at("x0"), sys.n());
    parsed.plant = std::make_unique<oed::SimulatedPlant<T>>(std::move(sys), std::move(x0));
  }

  parsed.L = opts.L >= 0 ? opts.L : cfg.value("L", -1LL);
  parsed.N = opts.N >= 0 ? opts.N : cfg.value("N", -1LL);
  if (parsed.L < 0 || parsed.N < 0)
    throw oed::ConfigError("bounds L and N must be given and nonnegative");
  parsed.seed = cfg.value("seed", opts.seed);
  parsed.out_dir = !opts.out_dir.empty() ? opts.out_dir : cfg.value("out_dir", std::string("out"));

  std::string type = replay_log.has_value() ? "replay" : "canonical-scan";
  oed::Json policy = cfg.value("policy", oed::Json::object());
  if (policy.contains("type")) type = policy.at("type").get<std::string>();
  parsed.policy_name = type;
  if (type == "canonical-scan") {
    parsed.policy = oed::InputPolicy<T>::canonical_scan();
  } else if (type == "closed-form") {
    parsed.policy = oed::InputPolicy<T>::closed_form();
  } else if (type == "seeded-random") {
    parsed.policy = oed::InputPolicy<T>::seeded_random(policy.value("seed", parsed.seed));
  } else if (type == "replay") {
    oed::Matrix<T> inputs;
    if (policy.contains("inputs"))
      inputs = matrix_from_rows_json<T>(policy.at("inputs"), "policy.inputs");
    else if (policy.contains("inputs_path"))
      inputs = oed::log_from_csv<T>(oed::read_file(policy.at("inputs_path").get<std::string>())).u;
    else if (replay_log.has_value())
      inputs = replay_log->u;
    else
      throw oed::ConfigError("replay policy needs 'inputs' or 'inputs_path'");
    parsed.policy = oed::InputPolicy<T>::replay(std::move(inputs));
  } else {
    throw oed::ConfigError("unknown policy type '" + type + "'");
  }
  return parsed;
}

template <typename T>
int cmd_run_one(ParsedConfig<T>& parsed, const std::string& mode, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  oed::OnlineExperimentResult<T> result =
      oed::online_experiment<T>(*parsed.plant, parsed.L, parsed.N, parsed.policy);
  const oed::InformativityReport report =
      oed::check_informativity(result.log, parsed.L, parsed.N);

  oed::write_file(out_dir + "/log.csv", oed::log_to_csv(result.log));
  oed::write_file(out_dir + "/trace.jsonl", oed::trace_to_jsonl(result.trace));
  oed::write_file(out_dir + "/report.json", oed::report_to_json(report).dump(2) + "\n");
  oed::Json meta;
  meta["mode"] = mode;
  meta["seed"] = parsed.seed;
  meta["L"] = parsed.L;
  meta["N"] = parsed.N;
  meta["policy"] = parsed.policy_name;
  meta["final_t"] = result.trace.final_t;
  meta["final_k"] = result.trace.final_k;
  meta["informative"] = report.informative;
  oed::write_file(out_dir + "/run.json", meta.dump(2) + "\n");

  std::cout << "t = " << result.trace.final_t << ", depth = " << result.trace.final_k
            << ", informative = " << (report.informative ? "true" : "false") << "\n";
  std::cout << "artifacts written to " << out_dir << "\n";
  return report.informative ? kExitOk : kExitVerdictNegative;
}

template <typename T>
int cmd_run(const RunOptions& opts) {
  const oed::Json cfg = oed::parse_json(oed::read_file(opts.config_path), "config");
  if (opts.trials < 1) throw oed::ConfigError("--trials must be >= 1");
  if (opts.trials == 1) {
    ParsedConfig<T> parsed = parse_run_config<T>(cfg, opts);
    return cmd_run_one<T>(parsed, opts.mode, parsed.out_dir);
  }
  int worst = kExitOk;
  for (int trial = 0; trial < opts.trials; ++trial) {
    RunOptions trial_opts = opts;
    trial_opts.seed = opts.seed + static_cast<std::uint64_t>(trial);
    ParsedConfig<T> parsed = parse_run_config<T>(cfg, trial_opts);
    if (parsed.policy_name == "seeded-random")
      parsed.policy = oed::InputPolicy<T>::seeded_random(trial_opts.seed);
    parsed.seed = trial_opts.seed;
    const int status =
        cmd_run_one<T>(parsed, opts.mode, parsed.out_dir + "/trial_" + std::to_string(trial));
    worst = std::max(worst, status);
  }
  return worst;
}

template <typename T>
int cmd_check(const LogOptions& opts) {
  if (opts.L < 0 || opts.N < 0) throw oed::ConfigError("check needs -L and --upper-n");
  const oed::ExperimentLog<T> log = oed::log_from_csv<T>(oed::read_file(opts.log_path));
  const oed::InformativityReport report = oed::check_informativity(log, opts.L, opts.N);
  const std::string text = oed::report_to_json(report).dump(2) + "\n";
  std::cout << text;
  if (!opts.out_path.empty()) oed::write_file(opts.out_path, text);
  return report.informative ? kExitOk : kExitVerdictNegative;
}

template <typename T>
int cmd_identify(const LogOptions& opts) {
  if (opts.L < 0 || opts.N < 0) throw oed::ConfigError("identify needs -L and --upper-n");
  const oed::ExperimentLog<T> log = oed::log_from_csv<T>(oed::read_file(opts.log_path));
  const oed::InformativityReport report = oed::check_informativity(log, opts.L, opts.N);
  if (!report.informative) {
    std::cerr << "log is not informative: "
              << (!report.length_ok ? "length condition failed" : "rank condition failed")
              << " (rank_H = " << report.rank_H << ", t = " << report.t << ", T = " << report.T
              << ")\n";
    return kExitVerdictNegative;
  }
  const oed::IdentifiedModel<T> model = oed::identify(log, report);
  const std::string text = oed::identified_model_to_json(model).dump(2) + "\n";
  if (!opts.out_path.empty())
    oed::write_file(opts.out_path, text);
  else
    std::cout << text;
  std::cout << "residual = " << oed::detail::entry_to_string(model.residual) << "\n";
  return kExitOk;
}

/// One reproduce-paper assertion; prints its own pass line or the first
/// mismatch.
class Assertions {
 public:
  bool expect(bool ok, const std::string& what, const std::string& detail = "") {
    if (failed_) return false;
    if (ok) {
      std::cout << "ok: " << what << "\n";
    } else {
      std::cout << "MISMATCH: " << what << (detail.empty() ? "" : " — " + detail) << "\n";
      failed_ = true;
    }
    return ok;
  }
  template <typename V>
  bool expect_eq(const V& got, const V& want, const std::string& what) {
    std::ostringstream detail;
    detail << "expected " << want << ", got " << got;
    return expect(got == want, what, detail.str());
  }
  bool failed() const { return failed_; }

 private:
  bool failed_ = false;
};

template <typename T>
int cmd_reproduce(const ReproduceOptions& opts) {
  namespace ref = oed::reference;
  Assertions check;

  oed::ExperimentLog<T> fixture = ref::log<T>();
  if (opts.mutate_sample >= 0) {
    if (opts.mutate_sample >= fixture.t()) throw oed::ConfigError("mutation index out of range");
    fixture.y(0, opts.mutate_sample) = fixture.y(0, opts.mutate_sample) + T(1);
  }

  // Intermediate analysis values on the recorded experiment.
  for (const auto& expected : ref::expected_checks()) {
    const auto prefix = fixture.prefix(expected.t);
    const auto [ell, n] = oed::shortest_lag_min_states(prefix);
    const auto la = oed::actual_lag_bound(prefix, ref::bound_L, ref::bound_N);
    check.expect_eq(ell, expected.ell_min, "ell_min at t = " + std::to_string(expected.t));
    check.expect_eq(n, expected.n_min, "n_min at t = " + std::to_string(expected.t));
    check.expect_eq(la, expected.L_actual, "L^a at t = " + std::to_string(expected.t));
    if (check.failed()) return kExitVerdictNegative;
  }
  for (const auto& tr : ref::expected_rank_transitions()) {
    check.expect_eq<long long>(
        oed::rank(oed::hankel_io(fixture.prefix(tr.t_enter), tr.depth)), tr.rank_enter,
        "depth-" + std::to_string(tr.depth) + " rank at t = " + std::to_string(tr.t_enter));
    check.expect_eq<long long>(
        oed::rank(oed::hankel_io(fixture.prefix(tr.t_exit), tr.depth)), tr.rank_exit,
        "depth-" + std::to_string(tr.depth) + " rank at t = " + std::to_string(tr.t_exit));
    if (check.failed()) return kExitVerdictNegative;
  }
  const oed::InformativityReport report =
      oed::check_informativity(fixture, ref::bound_L, ref::bound_N);
  check.expect(report.informative, "recorded experiment is informative");
  check.expect_eq(report.T, ref::experiment_length, "termination length T");
  if (check.failed()) return kExitVerdictNegative;

  // Re-run the experiment against the simulated plant with replayed inputs.
  oed::SimulatedPlant<T> plant(ref::system<T>(), ref::initial_state<T>());
  auto result = oed::online_experiment<T>(plant, ref::bound_L, ref::bound_N,
                                          oed::InputPolicy<T>::replay(ref::inputs<T>()));
  check.expect_eq<long long>(result.trace.final_t, ref::experiment_length, "replayed run length");
  check.expect(result.log.u == ref::inputs<T>(), "replayed inputs match the recording");
  check.expect(result.log.y == fixture.y, "measured outputs match the recording");
  if (check.failed()) return kExitVerdictNegative;

  // Counterexample: excitation of order L^a+1 alone does not certify
  // informativity.
  const auto cx = ref::counterexample_log<T>();
  check.expect(oed::is_persistently_exciting(cx.u, 4), "counterexample input is exciting of order 4");
  check.expect_eq(oed::rank(oed::hankel(cx.u, 3)), 8, "counterexample input Hankel rank");
  const oed::InformativityReport cx_report = oed::check_informativity(cx, ref::bound_L, ref::bound_N);
  check.expect(!cx_report.informative, "counterexample data are not informative");
  check.expect_eq(cx_report.rank_H, 10LL, "counterexample depth-3 rank");
  if (check.failed()) return kExitVerdictNegative;

  // Sample-count comparison at the published large-scale configuration.
  const oed::SampleCounts counts = oed::baseline_sample_counts(80, 100, 150, 20, 100);
  check.expect_eq(counts.t_online, 5850LL, "online sample count");
  check.expect_eq(counts.t_pe, 20330LL, "persistency-of-excitation sample count");
  check.expect_eq(counts.t_fixed, 8280LL, "fixed-depth sample count");
  if (check.failed()) return kExitVerdictNegative;

  std::cout << "all reference values reproduced\n";
  return kExitOk;
}

template <typename T>
int cmd_compare(const CompareOptions& opts) {
  if (opts.samples) {
    const oed::SampleCounts counts =
        oed::baseline_sample_counts(opts.m, opts.L, opts.N, opts.ell_true, opts.n_true);
    std::cout << "t_online = " << counts.t_online << "\n"
              << "t_pe = " << counts.t_pe << "\n"
              << "t_fixed = " << counts.t_fixed << "\n";
    return kExitOk;
  }
  if (opts.model_a.empty() || opts.model_b.empty())
    throw oed::ConfigError("compare needs two model files (or --samples)");
  const auto sys_a =
      oed::system_from_json<T>(oed::parse_json(oed::read_file(opts.model_a), opts.model_a));
  const auto sys_b =
      oed::system_from_json<T>(oed::parse_json(oed::read_file(opts.model_b), opts.model_b));
  bool isomorphic = false;
  try {
    isomorphic = oed::are_isomorphic(sys_a, sys_b);
  } catch (const oed::NotMinimalError& e) {
    throw oed::ConfigError(std::string("compare requires minimal systems: ") + e.what());
  }
  std::cout << (isomorphic ? "isomorphic" : "not isomorphic") << "\n";
  return isomorphic ? kExitOk : kExitVerdictNegative;
}

template <typename Fn>
int dispatch(const std::string& mode, Fn&& fn) {
  if (mode == "exact") return fn.template operator()<oed::Rational>();
  if (mode == "float") return fn.template operator()<double>();
  throw oed::ConfigError("mode must be 'exact' or 'float'");
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--mode", opts.mode, "scalar mode: exact or float")
      ->check(CLI::IsMember({"exact", "float"}));
  cmd->add_option("--seed", opts.seed, "seed for any randomized choice");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online experiment design and informativity analysis for LTI identification"};
  app.require_subcommand(1);

  RunOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "run an online experiment from a config file");
  run->add_option("--config", run_opts.config_path, "JSON run configuration")->required();
  run->add_option("-L", run_opts.L, "override: upper bound on the lag");
  run->add_option("--upper-n", run_opts.N, "override: upper bound on the state dimension");
  run->add_option("--out-dir", run_opts.out_dir, "override: artifact directory");
  run->add_option("--trials", run_opts.trials, "number of independent trials");
  add_common(run, run_opts);

  LogOptions check_opts;
  CLI::App* chk = app.add_subcommand("check", "informativity verdict for a recorded log");
  chk->add_option("--log", check_opts.log_path, "CSV log file")->required();
  chk->add_option("-L", check_opts.L, "upper bound on the lag")->required();
  chk->add_option("--upper-n", check_opts.N, "upper bound on the state dimension")->required();
  chk->add_option("--report", check_opts.out_path, "also write the report JSON here");
  add_common(chk, check_opts);

  LogOptions id_opts;
  CLI::App* ident = app.add_subcommand("identify", "recover a model from an informative log");
  ident->add_option("--log", id_opts.log_path, "CSV log file")->required();
  ident->add_option("-L", id_opts.L, "upper bound on the lag")->required();
  ident->add_option("--upper-n", id_opts.N, "upper bound on the state dimension")->required();
  ident->add_option("--out", id_opts.out_path, "model JSON output path");
  add_common(ident, id_opts);

  ReproduceOptions rp_opts;
  CLI::App* rp = app.add_subcommand(
      "reproduce-paper", "re-run the bundled reference experiment and verify every value");
  rp->add_option("--mutate-sample", rp_opts.mutate_sample,
                 "self-test: corrupt one output sample before checking")
      ->check(CLI::NonNegativeNumber);
  add_common(rp, rp_opts);

  CompareOptions cmp_opts;
  CLI::App* cmp = app.add_subcommand("compare", "isomorphism of two models, or sample counts");
  cmp->add_option("model_a", cmp_opts.model_a, "first model JSON");
  cmp->add_option("model_b", cmp_opts.model_b, "second model JSON");
  cmp->add_flag("--samples", cmp_opts.samples, "print sample counts instead");
  cmp->add_option("--m", cmp_opts.m, "input dimension (with --samples)");
  cmp->add_option("-L", cmp_opts.L, "upper bound on the lag");
  cmp->add_option("--upper-n", cmp_opts.N, "upper bound on the state dimension");
  cmp->add_option("--ell-true", cmp_opts.ell_true, "true lag (with --samples)");
  cmp->add_option("--n-true", cmp_opts.n_true, "true state dimension (with --samples)");
  add_common(cmp, cmp_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed())
      return dispatch(run_opts.mode, [&]<typename T>() { return cmd_run<T>(run_opts); });
    if (chk->parsed())
      return dispatch(check_opts.mode, [&]<typename T>() { return cmd_check<T>(check_opts); });
    if (ident->parsed())
      return dispatch(id_opts.mode, [&]<typename T>() { return cmd_identify<T>(id_opts); });
    if (rp->parsed())
      return dispatch(rp_opts.mode, [&]<typename T>() { return cmd_reproduce<T>(rp_opts); });
    if (cmp->parsed())
      return dispatch(cmp_opts.mode, [&]<typename T>() { return cmd_compare<T>(cmp_opts); });
    return kExitConfig;
  } catch (const oed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const oed::DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const oed::NotInformativeError& e) {
    std::cerr << "verdict: " << e.what() << "\n";
    return kExitVerdictNegative;
  } catch (const oed::ZeroInputError& e) {
    std::cerr << "verdict: " << e.what() << "\n";
    return kExitVerdictNegative;
  } catch (const oed::PriorBoundsError& e) {
    std::cerr << "guard: prior bounds violated: " << e.what() << "\n";
    return kExitGuard;
  } catch (const oed::Error& e) {
    std::cerr << "guard: " << e.what() << "\n";
    return kExitGuard;
  }
}
