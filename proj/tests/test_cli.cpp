#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "gmr/config.hpp"
#include "gmr/eos.hpp"
#include "gmr/errors.hpp"
#include "gmr/io.hpp"
#include "gmr/runner.hpp"

using namespace gmr;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "grid": {"nx": 12, "ny": 12, "nz": 12, "Lx": 1000, "Ly": 1000, "h": 1000},
  "physics": {"K_I": 1000, "K_D": 0.1, "kappa": 1000, "Re1": 0.01, "Re2": 0.1, "f": 1e-4},
  "regularization": {"eta": 200, "s0": 5e-4, "eps0": 2.5e-4, "r": 0.1, "closure": "full"},
  "eos": {"table": "default"},
  "boundary": {"tau": {"type": "constant", "x": 1e-4, "y": 0}, "thetaStar": {"type": "constant", "value": 16}, "k_theta": 1e-4},
  "run": {"dt_max": 1.0, "steps": 3, "snapshot_every": 0, "seed": 7, "out_dir": "unused"},
  "initial": {"scenario": "baroclinic_front", "noise": 0.05}
})";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gmr_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SimConfig small_config(const fs::path& out, std::vector<std::string> extra = {}) {
  extra.push_back("run.out_dir=\"" + out.string() + "\"");
  return parse_config(kSmall, extra);
}

int run_cli(const std::string& args) {
  const char* exe = std::getenv("GMR_CLI");
  REQUIRE(exe != nullptr);
  const int status = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("snapshot round trip is bit exact") {
  const Setup s = build_setup(small_config("x"));
  OceanState st = s.initial;
  st.t = 1.0 / 3.0;
  const Snapshot snap = snapshot_of(st);
  const fs::path p = scratch("snap.gmr");
  write_snapshot(snap, p.string());
  const Snapshot back = read_snapshot(p.string());
  CHECK(back == snap);
  CHECK(read_file(p).rfind(kSnapshotVersion, 0) == 0);
  CHECK(back.names == std::vector<std::string>{"u", "v", "theta", "S"});

  // Truncated payload and garbage headers are rejected.
  const std::string bytes = read_file(p);
  {
    std::ofstream out(p, std::ios::binary);
    out << bytes.substr(0, bytes.size() - 8);
  }
  CHECK_THROWS_AS(read_snapshot(p.string()), ArgumentError);
  {
    std::ofstream out(p, std::ios::binary);
    out << "NOPE\nend\n";
  }
  CHECK_THROWS_AS(read_snapshot(p.string()), ArgumentError);
  fs::remove(p);
}

TEST_CASE("config round trip and overrides") {
  const SimConfig c = parse_config(kSmall);
  CHECK(parse_config(config_to_json(c)) == c);
  CHECK(c.grid.nx == 12);
  CHECK(c.reg.eta == 200.0);
  CHECK(c.boundary.tau.x == 1e-4);

  const SimConfig o = parse_config(kSmall, {"physics.K_I=500", "regularization.closure=small-slope", "run.steps=9"});
  CHECK(o.physics.mixing.K_I == 500.0);
  CHECK(o.closure == Closure::SmallSlope);
  CHECK(o.run.steps == 9);
  CHECK_THROWS_AS(parse_config(kSmall, {"physics.K_I"}), ConfigError);
}

TEST_CASE("config errors are reported all at once") {
  try {
    parse_config(R"({"grid": {"nx": -1, "Lx": "wide"}, "physics": {"K_I": 1, "bogus": 2},
                     "eos": {"table": "default"}, "extra": {}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() >= 3);
  }
  CHECK_THROWS_AS(parse_config(R"({"grid": {"nx": 12}})"), ConfigError);  // eos.table missing
  CHECK_THROWS_AS(parse_config("{oops"), ConfigError);
  // Semantic problems from several blocks are collected by build_setup.
  try {
    build_setup(small_config("x", {"physics.K_I=-1", "physics.Re1=0", "regularization.eta=5000"}));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() >= 3);
  }
}

TEST_CASE("run writes budgets with the documented columns") {
  const fs::path out = scratch("run");
  const RunOutcome r = run_simulation(small_config(out), std::cout);
  CHECK(r.exit_code == 0);
  CHECK(r.budgets.size() == 4);
  std::vector<std::string> header;
  const auto rows = read_csv_numbers((out / "budgets.csv").string(), &header);
  CHECK(header == std::vector<std::string>{"t", "ke", "theta_l2", "s_l2", "theta_min", "theta_max", "s_min",
                                           "s_max", "s_mean", "iso_dissipation", "gm_variance", "robin_term",
                                           "energy_residual"});
  CHECK(header == budget_columns());
  REQUIRE(rows.size() == 4);
  for (std::size_t n = 0; n < rows.size(); ++n) CHECK(rows[n] == budget_values(r.budgets[n]));
  CHECK(fs::exists(out / "snap_000000.gmr"));
  CHECK(fs::exists(out / "snap_000003.gmr"));
  CHECK(fs::exists(out / "plot_data.csv"));
  CHECK(load_config((out / "config.json").string()) == small_config(out));
  fs::remove_all(out);
}

TEST_CASE("identical config and seed give bit-identical budgets") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run_simulation(small_config(a), std::cout);
  run_simulation(small_config(b), std::cout);
  CHECK(read_file(a / "budgets.csv") == read_file(b / "budgets.csv"));
  CHECK(read_file(a / "snap_000003.gmr") == read_file(b / "snap_000003.gmr"));
  const fs::path c = scratch("det_c");
  run_simulation(small_config(c, {"run.seed=8"}), std::cout);
  CHECK(read_file(a / "budgets.csv") != read_file(c / "budgets.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST_CASE("equilibrium run has constant budget rows") {
  const fs::path out = scratch("eq");
  const RunOutcome r =
      run_simulation(small_config(out, {"initial.scenario=equilibrium", "initial.noise=0", "boundary.tau.x=0", "boundary.k_theta=0",
                                        "run.steps=5"}),
                     std::cout);
  REQUIRE(r.exit_code == 0);
  const auto rows = read_csv_numbers((out / "budgets.csv").string());
  REQUIRE(rows.size() == 6);
  for (const auto& row : rows)
    for (std::size_t c = 1; c < row.size(); ++c) CHECK(row[c] == rows[0][c]);
  fs::remove_all(out);
}

TEST_CASE("zero steps writes only the initial snapshot") {
  const fs::path out = scratch("zero");
  const RunOutcome r = run_simulation(small_config(out, {"run.steps=0"}), std::cout);
  CHECK(r.exit_code == 0);
  int snaps = 0;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().extension() == ".gmr") ++snaps;
  CHECK(snaps == 1);
  CHECK(fs::exists(out / "snap_000000.gmr"));
  fs::remove_all(out);
}

TEST_CASE("a runtime failure leaves a report and the last valid snapshot") {
  const fs::path out = scratch("fail");
  // Restoring toward a temperature outside the table range drives the surface out of range.
  const RunOutcome r = run_simulation(
      small_config(out, {"initial.scenario=equilibrium", "boundary.thetaStar.value=1000", "boundary.k_theta=10",
                         "run.steps=50"}),
      std::cout);
  CHECK(r.exit_code == 3);
  REQUIRE(fs::exists(out / "failure.json"));
  const auto j = nlohmann::json::parse(read_file(out / "failure.json"));
  CHECK(j.contains("error"));
  CHECK(j.contains("message"));
  const std::string snap = j.at("last_valid_snapshot");
  CHECK(fs::exists(out / snap));
  CHECK(read_snapshot((out / snap).string()).time == j.at("t").get<double>());
  fs::remove_all(out);
}

TEST_CASE("compare-closures writes both budgets and the difference table") {
  const fs::path out = scratch("cmp");
  const CompareOutcome r = compare_closures(small_config(out, {"run.steps=2"}), std::cout);
  CHECK(r.exit_code == 0);
  CHECK(r.full.size() == r.small.size());
  CHECK(fs::exists(out / "budgets_full.csv"));
  CHECK(fs::exists(out / "budgets_small.csv"));
  std::vector<std::string> header;
  const auto rows = read_csv_numbers((out / "closure_diff.csv").string(), &header);
  CHECK(!header.empty());
  CHECK(!rows.empty());
  for (const ClosureGap& g : r.gaps) CHECK(g.max_formula_error <= 1e-12 * std::max(1.0, g.max_bound));
  fs::remove_all(out);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("exe");
  fs::create_directories(dir);
  const fs::path cfg = dir / "c.json";
  {
    std::ofstream out(cfg);
    out << kSmall;
  }
  const std::string base = "--config " + cfg.string() + " --out " + (dir / "o").string();
  CHECK(run_cli("run " + base + " --steps 1") == 0);
  CHECK(fs::exists(dir / "o" / "snap_000001.gmr"));
  CHECK(run_cli("run " + base + " --set physics.K_I=-5") == 2);
  CHECK(run_cli("run " + base + " --set boundary.thetaStar.value=1000 --set boundary.k_theta=10 "
                "--set initial.scenario=equilibrium --steps 50") == 3);
  CHECK(run_cli("run --config /nonexistent.json") != 0);
  CHECK(run_cli("verify eos") == 0);
  CHECK(run_cli("compare-closures " + base + " --steps 1") == 0);
  CHECK(run_cli("") != 0);
  fs::remove_all(dir);
}

TEST_CASE("shipped configs and tables load") {
  const fs::path root(GMR_SOURCE_DIR);
  CHECK(load_eos_table((root / "data" / "eos_default.json").string()) == default_eos_table());
  CHECK(load_eos_table((root / "data" / "eos_linear.json").string()).is_linear());
  for (const char* name : {"baroclinic.json", "equilibrium.json"}) {
    SimConfig c = load_config((root / "configs" / name).string());
    if (c.eos_table != "default") c.eos_table = (root / c.eos_table).string();
    CHECK_NOTHROW(build_setup(c));
  }
}
