// Command-line driver: run | verify | compare-closures.
#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "gmr/config.hpp"
#include "gmr/errors.hpp"
#include "gmr/runner.hpp"
#include "gmr/verify.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  int steps = -1;
  int snapshot_every = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (overrides run.out_dir)");
  cmd->add_option("--set", f.sets, "override a config value, e.g. --set physics.K_I=500 (repeatable)");
  cmd->add_option("--steps", f.steps, "number of time steps (overrides run.steps)");
  cmd->add_option("--snapshot-every", f.snapshot_every, "snapshot cadence in steps (overrides run.snapshot_every)");
}

gmr::SimConfig load(const CommonFlags& f) {
  std::vector<std::string> overrides = f.sets;
  if (!f.out.empty()) overrides.push_back("run.out_dir=\"" + f.out + "\"");
  if (f.steps >= 0) overrides.push_back("run.steps=" + std::to_string(f.steps));
  if (f.snapshot_every >= 0) overrides.push_back("run.snapshot_every=" + std::to_string(f.snapshot_every));
  return gmr::load_config(f.config, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primitive-equation ocean box model with regularized GM/Redi eddy closures"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run a configured scenario");
  add_common(run, run_flags);

  CommonFlags cmp_flags;
  CLI::App* cmp = app.add_subcommand("compare-closures", "run full and small-slope closures side by side");
  add_common(cmp, cmp_flags);

  std::string suite = "all";
  std::uint64_t seed = 1;
  CLI::App* verify = app.add_subcommand("verify", "run a property suite and print a pass/fail table");
  verify->add_option("suite", suite, "ellipticity | skewness | bounds | energy | slopes | eos | elliptic | all");
  verify->add_option("--seed", seed, "random seed for the sampled checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return gmr::run_simulation(load(run_flags), std::cout).exit_code;
    if (*cmp) return gmr::compare_closures(load(cmp_flags), std::cout).exit_code;
    if (*verify) {
      const auto rows = gmr::run_verify_suite(suite, seed);
      return gmr::print_check_table(rows, std::cout) ? 0 : 1;
    }
  } catch (const gmr::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const gmr::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
