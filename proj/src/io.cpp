#include "gmr/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gmr/errors.hpp"

namespace gmr {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Snapshot snapshot_of(const OceanState& state) {
  Snapshot s;
  s.shape = state.theta.shape();
  s.time = state.t;
  s.names = {"u", "v", "theta", "S"};
  s.fields = {state.v.u, state.v.v, state.theta, state.S};
  return s;
}

namespace {

std::uint64_t to_little(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::little) return x;
  std::uint64_t r = 0;
  for (int b = 0; b < 8; ++b) r |= ((x >> (8 * b)) & 0xffu) << (8 * (7 - b));
  return r;
}

}  // namespace

void write_snapshot(const Snapshot& snap, const std::string& path) {
  if (snap.names.size() != snap.fields.size()) throw ArgumentError("write_snapshot: names and fields differ in count");
  for (const auto& f : snap.fields)
    if (f.shape() != snap.shape) throw ArgumentError("write_snapshot: field shape differs from snapshot shape");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write snapshot '" + path + "'");
  out << kSnapshotVersion << "\n";
  out << "dims " << snap.shape.nx << " " << snap.shape.ny << " " << snap.shape.nz << "\n";
  out << "time " << format_double(snap.time) << "\n";
  out << "fields";
  for (const auto& n : snap.names) out << " " << n;
  out << "\n";
  out << "byte_order little\n";
  out << "end\n";
  for (const auto& f : snap.fields) {
    for (double v : f.values()) {
      const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  if (!out) throw ArgumentError("failed writing snapshot '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read snapshot '" + path + "'");
  Snapshot s;
  std::string line;
  if (!std::getline(in, line) || line != kSnapshotVersion)
    throw ArgumentError("snapshot '" + path + "': missing version line " + kSnapshotVersion);
  bool have_dims = false, have_time = false, have_fields = false;
  while (std::getline(in, line)) {
    if (line == "end") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "dims") {
      have_dims = static_cast<bool>(ls >> s.shape.nx >> s.shape.ny >> s.shape.nz);
    } else if (key == "time") {
      std::string t;
      ls >> t;
      s.time = std::strtod(t.c_str(), nullptr);
      have_time = true;
    } else if (key == "fields") {
      std::string n;
      while (ls >> n) s.names.push_back(n);
      have_fields = true;
    } else if (key == "byte_order") {
      std::string b;
      ls >> b;
      if (b != "little") throw ArgumentError("snapshot '" + path + "': unsupported byte order " + b);
    } else {
      throw ArgumentError("snapshot '" + path + "': unknown header line '" + line + "'");
    }
  }
  if (line != "end" || !have_dims || !have_time || !have_fields || s.shape.nx <= 0 || s.shape.ny <= 0 ||
      s.shape.nz <= 0)
    throw ArgumentError("snapshot '" + path + "': incomplete header");

  const std::streampos start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg() - start);
  const std::size_t expected = s.names.size() * s.shape.size() * 8;
  if (bytes != expected)
    throw ArgumentError("snapshot '" + path + "': payload has " + std::to_string(bytes) + " bytes, expected " +
                        std::to_string(expected));
  in.seekg(start);
  for (std::size_t q = 0; q < s.names.size(); ++q) {
    ScalarField f(s.shape);
    for (double& v : f.values()) {
      std::uint64_t bits;
      in.read(reinterpret_cast<char*>(&bits), sizeof bits);
      v = std::bit_cast<double>(to_little(bits));
    }
    s.fields.push_back(std::move(f));
  }
  return s;
}

const std::vector<std::string>& budget_columns() {
  static const std::vector<std::string> cols = {"t",        "ke",       "theta_l2",        "s_l2",
                                                "theta_min", "theta_max", "s_min",          "s_max",
                                                "s_mean",   "iso_dissipation", "gm_variance", "robin_term",
                                                "energy_residual"};
  return cols;
}

std::vector<double> budget_values(const BudgetRecord& r) {
  return {r.t,     r.ke,    r.theta_l2, r.s_l2,           r.theta_min,   r.theta_max, r.s_min,
          r.s_max, r.s_mean, r.iso_dissipation, r.gm_variance, r.robin_term, r.energy_residual};
}

void write_budgets_csv(const std::vector<BudgetRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  const auto& cols = budget_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << "\n";
  for (const auto& r : records) {
    const auto vals = budget_values(r);
    for (std::size_t c = 0; c < vals.size(); ++c) out << (c ? "," : "") << format_double(vals[c]);
    out << "\n";
  }
}

std::vector<std::vector<double>> read_csv_numbers(const std::string& path, std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read '" + path + "'");
  std::string line;
  std::vector<std::vector<double>> rows;
  if (std::getline(in, line) && header) {
    header->clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header->push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_plot_data(const std::vector<BudgetRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  out << "t,variable,value\n";
  const auto& cols = budget_columns();
  for (const auto& r : records) {
    const auto vals = budget_values(r);
    for (std::size_t c = 1; c < vals.size(); ++c)
      out << format_double(r.t) << "," << cols[c] << "," << format_double(vals[c]) << "\n";
  }
}

}  // namespace gmr
