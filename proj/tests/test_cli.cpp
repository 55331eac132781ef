#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "oed/informativity.hpp"
#include "oed/io.hpp"
#include "oed/reference_experiment.hpp"
#include "oed/state_space.hpp"

namespace fs = std::filesystem;
namespace ref = oed::reference;
using oed::Rational;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("oed_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args, const Workspace& ws, const std::string& log_name) {
  const std::string out = ws.path(log_name);
  const std::string cmd = std::string(OED_CLI_PATH) + " " + args + " > " + out + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const Workspace& ws, const std::string& name) {
  return oed::read_file(ws.path(name));
}

void write_reference_fixtures(const Workspace& ws) {
  oed::write_file(ws.path("system.json"),
                  oed::system_to_json(ref::system<Rational>()).dump(2));
  oed::write_file(ws.path("log.csv"), oed::log_to_csv(ref::log<Rational>()));
  oed::write_file(ws.path("counterexample.csv"),
                  oed::log_to_csv(ref::counterexample_log<Rational>()));
  oed::write_file(ws.path("truncated.csv"),
                  oed::log_to_csv(ref::log<Rational>().prefix(8)));

  oed::Json cfg;
  cfg["plant"]["system_path"] = ws.path("system.json");
  cfg["plant"]["x0"] = {"1", "1", "0"};
  cfg["L"] = 4;
  cfg["N"] = 4;
  cfg["policy"]["type"] = "replay";
  cfg["policy"]["inputs_path"] = ws.path("log.csv");
  cfg["out_dir"] = ws.path("out");
  oed::write_file(ws.path("config.json"), cfg.dump(2));
}

}  // namespace

TEST_CASE("run reproduces the reference experiment and writes artifacts") {
  Workspace ws;
  write_reference_fixtures(ws);
  CHECK(run_cli("run --config " + ws.path("config.json"), ws, "run.txt") == 0);

  const auto log = oed::log_from_csv<Rational>(slurp(ws, "out/log.csv"));
  CHECK(log == ref::log<Rational>());
  // Byte-identical round trip through the CLI artifacts.
  CHECK(slurp(ws, "out/log.csv") == oed::log_to_csv(ref::log<Rational>()));

  const auto report = oed::report_from_json(oed::Json::parse(slurp(ws, "out/report.json")));
  CHECK(report.informative);
  CHECK(report.t == 14);
  CHECK(report.T == 14);

  CHECK(fs::exists(ws.path("out/trace.jsonl")));
  const auto meta = oed::Json::parse(slurp(ws, "out/run.json"));
  CHECK(meta.at("final_t").get<int>() == 14);
  CHECK(meta.contains("seed"));
}

TEST_CASE("run with a violated state prior exits with the guard code") {
  Workspace ws;
  write_reference_fixtures(ws);
  auto cfg = oed::Json::parse(slurp(ws, "config.json"));
  cfg["N"] = 2;
  cfg["out_dir"] = ws.path("out_guard");
  oed::write_file(ws.path("config_guard.json"), cfg.dump(2));
  CHECK(run_cli("run --config " + ws.path("config_guard.json"), ws, "guard.txt") == 3);
  CHECK(slurp(ws, "guard.txt").find("prior bounds violated") != std::string::npos);
}

TEST_CASE("run with a zero-state plant") {
  Workspace ws;
  const oed::StateSpaceSystem<Rational> gain(
      oed::Matrix<Rational>(0, 0), oed::Matrix<Rational>(0, 2), oed::Matrix<Rational>(2, 0),
      oed::Matrix<Rational>{{3, 0}, {1, 2}});
  oed::write_file(ws.path("gain.json"), oed::system_to_json(gain).dump(2));
  oed::Json cfg;
  cfg["plant"]["system_path"] = ws.path("gain.json");
  cfg["L"] = 2;
  cfg["N"] = 2;
  cfg["out_dir"] = ws.path("out_gain");
  oed::write_file(ws.path("config_gain.json"), cfg.dump(2));
  CHECK(run_cli("run --config " + ws.path("config_gain.json"), ws, "gain.txt") == 0);
  const auto report =
      oed::report_from_json(oed::Json::parse(slurp(ws, "out_gain/report.json")));
  // T = L^a + (L^a + 1) m with no state contribution.
  CHECK(report.t == 2 + 3 * 2);
  CHECK(report.n_min == 0);

  // Identifying the collected log returns the pure gain.
  CHECK(run_cli("identify --log " + ws.path("out_gain/log.csv") +
                    " -L 2 --upper-n 2 --out " + ws.path("gain_model.json"),
                ws, "gain_id.txt") == 0);
  const auto model =
      oed::system_from_json<Rational>(oed::Json::parse(slurp(ws, "gain_model.json")));
  CHECK(model.n() == 0);
  CHECK(model.D == gain.D);
}

TEST_CASE("run dispatches independent trials") {
  Workspace ws;
  write_reference_fixtures(ws);
  auto cfg = oed::Json::parse(slurp(ws, "config.json"));
  cfg["policy"] = oed::Json{{"type", "seeded-random"}};
  cfg["out_dir"] = ws.path("out_trials");
  oed::write_file(ws.path("config_trials.json"), cfg.dump(2));
  CHECK(run_cli("run --config " + ws.path("config_trials.json") + " --trials 2 --seed 7", ws,
                "trials.txt") == 0);
  const auto r0 =
      oed::report_from_json(oed::Json::parse(slurp(ws, "out_trials/trial_0/report.json")));
  const auto r1 =
      oed::report_from_json(oed::Json::parse(slurp(ws, "out_trials/trial_1/report.json")));
  CHECK(r0.informative);
  CHECK(r1.informative);
  CHECK(r0.t == 14);
  CHECK(r1.t == 14);
  // Different seeds produce different data.
  CHECK(slurp(ws, "out_trials/trial_0/log.csv") != slurp(ws, "out_trials/trial_1/log.csv"));
}

TEST_CASE("check verdicts and exit codes") {
  Workspace ws;
  write_reference_fixtures(ws);
  CHECK(run_cli("check --log " + ws.path("log.csv") + " -L 4 --upper-n 4", ws, "c1.txt") == 0);

  // Float mode reads the same files and reaches the same verdict.
  CHECK(run_cli("check --log " + ws.path("log.csv") + " -L 4 --upper-n 4 --mode float", ws,
                "c1f.txt") == 0);
  CHECK(oed::Json::parse(slurp(ws, "c1f.txt")).at("rank_H").get<int>() == 11);

  CHECK(run_cli("check --log " + ws.path("counterexample.csv") + " -L 4 --upper-n 4", ws,
                "c2.txt") == 1);
  const auto cx = oed::Json::parse(slurp(ws, "c2.txt"));
  CHECK(cx.at("rank_H").get<int>() == 10);

  CHECK(run_cli("check --log " + ws.path("truncated.csv") + " -L 4 --upper-n 4", ws,
                "c3.txt") == 1);
  CHECK_FALSE(oed::Json::parse(slurp(ws, "c3.txt")).at("length_ok").get<bool>());

  oed::write_file(ws.path("bad.csv"), "not,a,log\n");
  CHECK(run_cli("check --log " + ws.path("bad.csv") + " -L 4 --upper-n 4", ws, "c4.txt") == 2);
}

TEST_CASE("identify writes a model isomorphic to the truth") {
  Workspace ws;
  write_reference_fixtures(ws);
  CHECK(run_cli("identify --log " + ws.path("log.csv") + " -L 4 --upper-n 4 --out " +
                    ws.path("model.json"),
                ws, "i1.txt") == 0);
  CHECK(slurp(ws, "i1.txt").find("residual = 0") != std::string::npos);

  CHECK(run_cli("compare " + ws.path("model.json") + " " + ws.path("system.json"), ws,
                "cmp.txt") == 0);
  CHECK(slurp(ws, "cmp.txt").find("isomorphic") == 0);

  // A non-informative log names the failing condition.
  CHECK(run_cli("identify --log " + ws.path("counterexample.csv") + " -L 4 --upper-n 4", ws,
                "i2.txt") == 1);
  CHECK(slurp(ws, "i2.txt").find("rank condition failed") != std::string::npos);

  CHECK(run_cli("identify --log " + ws.path("truncated.csv") + " -L 4 --upper-n 4", ws,
                "i3.txt") == 1);
  CHECK(slurp(ws, "i3.txt").find("length condition failed") != std::string::npos);
}

TEST_CASE("compare distinguishes models and prints sample counts") {
  Workspace ws;
  write_reference_fixtures(ws);
  auto other = ref::system<Rational>();
  other.D = oed::Matrix<Rational>(2, 2);
  oed::write_file(ws.path("other.json"), oed::system_to_json(other).dump(2));
  CHECK(run_cli("compare " + ws.path("system.json") + " " + ws.path("other.json"), ws,
                "cmp2.txt") == 1);

  CHECK(run_cli("compare --samples --m 80 -L 100 --upper-n 150 --ell-true 20 --n-true 100", ws,
                "cmp3.txt") == 0);
  const std::string table = slurp(ws, "cmp3.txt");
  CHECK(table.find("5850") != std::string::npos);
  CHECK(table.find("20330") != std::string::npos);
  CHECK(table.find("8280") != std::string::npos);
}

TEST_CASE("reproduce-paper verifies every recorded value in both modes") {
  Workspace ws;
  CHECK(run_cli("reproduce-paper", ws, "rp.txt") == 0);
  CHECK(slurp(ws, "rp.txt").find("all reference values reproduced") != std::string::npos);
  CHECK(run_cli("reproduce-paper --mode float", ws, "rpf.txt") == 0);

  // A corrupted output sample is caught at the first divergent value.
  CHECK(run_cli("reproduce-paper --mutate-sample 5", ws, "rpm.txt") != 0);
  CHECK(slurp(ws, "rpm.txt").find("MISMATCH") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  Workspace ws;
  CHECK(run_cli("frobnicate", ws, "u1.txt") == 2);
  CHECK(run_cli("check --log nowhere.csv -L 4 --upper-n 4", ws, "u2.txt") == 2);
  CHECK(run_cli("run --config nowhere.json", ws, "u3.txt") == 2);
}
