#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gmr {

struct CheckRow {
  std::string suite;
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// ellipticity, skewness, bounds, energy, slopes, eos, elliptic
const std::vector<std::string>& verify_suite_names();

/// Runs one suite, or every suite for "all". Unknown names throw ArgumentError.
std::vector<CheckRow> run_verify_suite(const std::string& name, std::uint64_t seed = 1);

/// Fixed-width pass/fail table; returns true when every row passed.
bool print_check_table(const std::vector<CheckRow>& rows, std::ostream& out);

}  // namespace gmr
