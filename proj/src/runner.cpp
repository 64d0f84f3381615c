#include "gmr/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "gmr/errors.hpp"
#include "gmr/io.hpp"

namespace gmr {

namespace fs = std::filesystem;

namespace {

std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06d.gmr", step);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write '" + path.string() + "'");
  out << text;
}

void prepare_out_dir(const SimConfig& config) {
  std::error_code ec;
  fs::create_directories(config.run.out_dir, ec);
  if (ec) throw ConfigError("run.out_dir: cannot create '" + config.run.out_dir + "': " + ec.message());
  write_text(fs::path(config.run.out_dir) / "config.json", config_to_json(config));
}

double l2_diff(const ScalarField& a, const ScalarField& b, const Grid& g) {
  ScalarField d = a;
  d -= b;
  return l2_norm(d, g);
}

}  // namespace

RunOutcome run_simulation(const SimConfig& config, std::ostream& log) {
  Setup setup = build_setup(config);
  prepare_out_dir(config);
  const fs::path dir(config.run.out_dir);

  RunOutcome out;
  OceanState state = setup.initial;
  write_snapshot(snapshot_of(state), (dir / snapshot_name(0)).string());
  int last_snapshot = 0;

  int n = 0;
  try {
    for (; n < config.run.steps; ++n) {
      StepResult r = step_adaptive(state, setup.model);
      out.budgets.push_back(r.budget);
      state = std::move(r.state);
      const int done = n + 1;
      if (config.run.snapshot_every > 0 && done % config.run.snapshot_every == 0) {
        write_snapshot(snapshot_of(state), (dir / snapshot_name(done)).string());
        last_snapshot = done;
      }
    }
    out.budgets.push_back(budgets(state, setup.model));
  } catch (const std::exception& e) {
    // `state` still holds the last valid state.
    const std::string snap = snapshot_name(n);
    write_snapshot(snapshot_of(state), (dir / snap).string());
    nlohmann::ordered_json j;
    const char* kind = dynamic_cast<const IntegrationAborted*>(&e)    ? "integration_aborted"
                       : dynamic_cast<const AdmissibilityError*>(&e) ? "admissibility"
                       : dynamic_cast<const EosDomainError*>(&e)     ? "eos_domain"
                       : dynamic_cast<const ArgumentError*>(&e)      ? "argument"
                                                                     : "numerical";
    j["error"] = kind;
    j["message"] = e.what();
    j["step"] = n;
    j["t"] = state.t;
    j["last_valid_snapshot"] = snap;
    write_text(dir / "failure.json", j.dump(2) + "\n");
    write_budgets_csv(out.budgets, (dir / "budgets.csv").string());
    write_plot_data(out.budgets, (dir / "plot_data.csv").string());
    out.exit_code = 3;
    out.failure = e.what();
    out.final_state = std::move(state);
    log << "run aborted at step " << n << ": " << out.failure << "\n";
    return out;
  }

  if (last_snapshot != config.run.steps)
    write_snapshot(snapshot_of(state), (dir / snapshot_name(config.run.steps)).string());
  write_budgets_csv(out.budgets, (dir / "budgets.csv").string());
  write_plot_data(out.budgets, (dir / "plot_data.csv").string());
  const BudgetRecord& b = out.budgets.back();
  log << "run complete: " << config.run.steps << " steps, t = " << format_double(b.t)
      << " s, ke = " << format_double(b.ke) << ", theta in [" << format_double(b.theta_min) << ", "
      << format_double(b.theta_max) << "]\n";
  out.final_state = std::move(state);
  return out;
}

ClosureGap closure_gap(const SlopeField& L, const MixingParams& p, double r) {
  const SymTensorField full = assemble_kiso_full(L, p);
  const SymTensorField small = assemble_kiso_small(L, p);
  const double d = p.delta();
  ClosureGap gap;
  for (std::size_t n = 0; n < full.cells.size(); ++n) {
    const double lx = L.Lx[n], ly = L.Ly[n];
    const double l2 = lx * lx + ly * ly;
    if (!(std::sqrt(l2) < r)) continue;
    const double q = p.K_I / (1.0 + l2);
    const Sym3& a = full.cells[n];
    const Sym3& b = small.cells[n];
    const double diff[6] = {a.k11 - b.k11, a.k12 - b.k12, a.k13 - b.k13, a.k22 - b.k22, a.k23 - b.k23, a.k33 - b.k33};
    const double formula[6] = {q * (d - 1.0) * lx * lx, q * (d - 1.0) * lx * ly, -q * lx * (d + l2),
                               q * (d - 1.0) * ly * ly, -q * ly * (d + l2),     -q * (d + l2) * l2};
    for (int e = 0; e < 6; ++e) {
      gap.max_entry_gap = std::max(gap.max_entry_gap, std::abs(diff[e]));
      gap.max_formula_error = std::max(gap.max_formula_error, std::abs(diff[e] - formula[e]));
    }
    gap.max_bound = std::max(gap.max_bound, p.K_I * (l2 + d * std::sqrt(l2)));
    ++gap.cells;
  }
  return gap;
}

CompareOutcome compare_closures(const SimConfig& config, std::ostream& log) {
  SimConfig cf = config;
  cf.closure = Closure::Full;
  SimConfig cs = config;
  cs.closure = Closure::SmallSlope;
  const Setup full = build_setup(cf);
  const Setup small = build_setup(cs);
  prepare_out_dir(config);
  const fs::path dir(config.run.out_dir);
  const Grid& g = full.model.grid;

  CompareOutcome out;
  OceanState a = full.initial;
  OceanState b = small.initial;
  std::ofstream diff(dir / "closure_diff.csv");
  if (!diff) throw ArgumentError("cannot write closure_diff.csv");
  diff << "t,theta_l2_diff,s_l2_diff,tensor_gap,tensor_gap_bound,tensor_formula_error\n";
  auto record = [&](double t) {
    const Diagnostics d = diagnose(a, full.model);
    const ClosureGap gap = closure_gap(d.L, config.physics.mixing, config.reg.r);
    out.theta_diff.push_back(l2_diff(a.theta, b.theta, g));
    out.s_diff.push_back(l2_diff(a.S, b.S, g));
    out.gaps.push_back(gap);
    diff << format_double(t) << "," << format_double(out.theta_diff.back()) << ","
         << format_double(out.s_diff.back()) << "," << format_double(gap.max_entry_gap) << ","
         << format_double(gap.max_bound) << "," << format_double(gap.max_formula_error) << "\n";
  };

  int n = 0;
  try {
    record(a.t);
    for (; n < config.run.steps; ++n) {
      const double dt = std::min(cfl_dt(a, full.model), cfl_dt(b, small.model));
      StepResult ra = step(a, dt, full.model);
      StepResult rb = step(b, dt, small.model);
      out.full.push_back(ra.budget);
      out.small.push_back(rb.budget);
      a = std::move(ra.state);
      b = std::move(rb.state);
      record(a.t);
    }
    out.full.push_back(budgets(a, full.model));
    out.small.push_back(budgets(b, small.model));
  } catch (const std::exception& e) {
    nlohmann::ordered_json j;
    j["error"] = "compare_closures";
    j["message"] = e.what();
    j["step"] = n;
    write_text(dir / "failure.json", j.dump(2) + "\n");
    out.exit_code = 3;
    log << "compare-closures aborted at step " << n << ": " << e.what() << "\n";
  }
  write_budgets_csv(out.full, (dir / "budgets_full.csv").string());
  write_budgets_csv(out.small, (dir / "budgets_small.csv").string());
  if (out.exit_code == 0)
    log << "compare-closures: " << config.run.steps << " steps, final theta L2 difference "
        << format_double(out.theta_diff.back()) << ", S L2 difference " << format_double(out.s_diff.back()) << "\n";
  return out;
}

}  // namespace gmr
