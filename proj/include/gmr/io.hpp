#pragma once

#include <string>
#include <vector>

#include "gmr/dynamics.hpp"
#include "gmr/field.hpp"

namespace gmr {

/// Flat binary snapshot: a text header terminated by an "end" line, then
/// float64 little-endian payload, field-major and x-fastest within a field.
struct Snapshot {
  Shape shape{};
  double time = 0.0;
  std::vector<std::string> names;
  std::vector<ScalarField> fields;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

inline constexpr const char* kSnapshotVersion = "GMR1";

Snapshot snapshot_of(const OceanState& state);
void write_snapshot(const Snapshot& snap, const std::string& path);
/// Throws ArgumentError on a malformed header or a payload of the wrong length.
Snapshot read_snapshot(const std::string& path);

/// Column order of budgets.csv.
const std::vector<std::string>& budget_columns();
std::vector<double> budget_values(const BudgetRecord& record);

/// Header row plus one row per record, every value printed with 17 significant digits.
void write_budgets_csv(const std::vector<BudgetRecord>& records, const std::string& path);
std::vector<std::vector<double>> read_csv_numbers(const std::string& path, std::vector<std::string>* header = nullptr);

/// Long-format export (t, variable, value) for external plotting.
void write_plot_data(const std::vector<BudgetRecord>& records, const std::string& path);

std::string format_double(double value);

}  // namespace gmr
