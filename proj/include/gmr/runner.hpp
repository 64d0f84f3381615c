#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gmr/config.hpp"
#include "gmr/dynamics.hpp"

namespace gmr {

struct RunOutcome {
  int exit_code = 0;  ///< 0 clean, 3 aborted (failure.json written)
  std::vector<BudgetRecord> budgets;
  OceanState final_state;
  std::string failure;
};

/// Executes a configured scenario into config.run.out_dir: config.json (the
/// effective config), budgets.csv, plot_data.csv and snap_<step>.gmr files.
/// ConfigError propagates; runtime failures end in failure.json and exit code 3.
RunOutcome run_simulation(const SimConfig& config, std::ostream& log);

struct ClosureGap {
  double max_entry_gap = 0.0;    ///< max |K_full - K_small| over cells with |L| < r
  double max_bound = 0.0;        ///< max K_I (|L|^2 + delta |L|) over the same cells
  double max_formula_error = 0.0;  ///< max deviation of the gaps from their closed forms
  std::size_t cells = 0;
};

/// Entrywise comparison of the two tensor forms at one slope field.
ClosureGap closure_gap(const SlopeField& L, const MixingParams& mixing, double r);

struct CompareOutcome {
  int exit_code = 0;
  std::vector<BudgetRecord> full;
  std::vector<BudgetRecord> small;
  std::vector<double> theta_diff;  ///< L2 difference per output time
  std::vector<double> s_diff;
  std::vector<ClosureGap> gaps;
};

/// Runs the scenario under both closures from the same initial state with a
/// shared step sequence; writes budgets_full.csv, budgets_small.csv and closure_diff.csv.
CompareOutcome compare_closures(const SimConfig& config, std::ostream& log);

}  // namespace gmr
