#include "gmr/eos.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gmr/errors.hpp"

namespace gmr {

namespace {

double ipow(double x, int n) noexcept {
  double r = 1.0;
  for (int m = 0; m < n; ++m) r *= x;
  return r;
}

std::string cell_name(const Shape& s, std::size_t n) {
  const std::size_t i = n % s.nx;
  const std::size_t j = (n / s.nx) % s.ny;
  const std::size_t k = n / s.columns();
  std::ostringstream os;
  os << "cell (" << i << ", " << j << ", " << k << ")";
  return os.str();
}

void check_shapes(const ThermoState& state) {
  if (state.theta.shape() != state.S.shape() || state.theta.shape() != state.p_st.shape())
    throw ArgumentError("thermodynamic state fields have mismatched shapes");
}

void check_admissible(const ThermoState& state, const EosTable& table, std::size_t n) {
  const auto& shape = state.theta.shape();
  if (!table.theta_range.contains(state.theta[n]))
    throw AdmissibilityError("temperature " + std::to_string(state.theta[n]) + " outside admissible range at " +
                                 cell_name(shape, n),
                             n);
  if (!table.s_range.contains(state.S[n]))
    throw AdmissibilityError("salinity " + std::to_string(state.S[n]) + " outside admissible range at " +
                                 cell_name(shape, n),
                             n);
  if (!table.p_range.contains(state.p_st[n]))
    throw AdmissibilityError("pressure " + std::to_string(state.p_st[n]) + " outside admissible range at " +
                                 cell_name(shape, n),
                             n);
}

double checked_volume(const ThermoState& state, const EosTable& table, std::size_t n) {
  check_admissible(state, table, n);
  const double v = table.specific_volume(state.theta[n], state.S[n], state.p_st[n]);
  if (!(v > 0.0))
    throw EosDomainError("non-positive specific volume at " + cell_name(state.theta.shape(), n), n);
  return v;
}

template <class F>
void for_lattice(const EosTable& t, int m, F&& f) {
  auto pt = [m](const Interval& r, int q) {
    return m == 1 ? r.lo : r.lo + (r.hi - r.lo) * static_cast<double>(q) / (m - 1);
  };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) f(pt(t.theta_range, a), pt(t.s_range, b), pt(t.p_range, c));
}

}  // namespace

double EosTable::specific_volume(double theta, double s, double p) const noexcept {
  double v = 0.0;
  for (const auto& t : terms) v += t.c * ipow(s, t.i) * ipow(theta, t.j) * ipow(p, t.k);
  return v;
}

double EosTable::dv_dtheta(double theta, double s, double p) const noexcept {
  double d = 0.0;
  for (const auto& t : terms)
    if (t.j > 0) d += t.c * t.j * ipow(s, t.i) * ipow(theta, t.j - 1) * ipow(p, t.k);
  return d;
}

double EosTable::dv_ds(double theta, double s, double p) const noexcept {
  double d = 0.0;
  for (const auto& t : terms)
    if (t.i > 0) d += t.c * t.i * ipow(s, t.i - 1) * ipow(theta, t.j) * ipow(p, t.k);
  return d;
}

bool EosTable::is_linear() const noexcept {
  return std::all_of(terms.begin(), terms.end(), [](const EosTerm& t) {
    return t.c == 0.0 || (t.k == 0 && t.i + t.j <= 1);
  });
}

EosTable default_eos_table() {
  EosTable t;
  t.terms = {
      {0, 0, 0, 9.977e-4},   // reference specific volume
      {0, 1, 0, 1.9e-7},     // thermal expansion
      {1, 0, 0, -7.4e-7},    // haline contraction
      {0, 1, 1, 2.5e-15},    // thermobaric coupling
  };
  t.theta_range = {-2.0, 32.0};
  t.s_range = {30.0, 40.0};
  t.p_range = {1.0, 5.0e7};
  t.rho_range = {1000.0, 1050.0};
  t.rho0 = 1027.0;
  t.g = 9.81;
  return t;
}

void validate_eos_table(const EosTable& t) {
  std::vector<std::string> problems;
  auto interval = [&](const Interval& r, const char* name, bool positive_lo) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi))
      problems.push_back(std::string("eos.") + name + " must be a finite interval with lo < hi");
    else if (positive_lo && r.lo < 0.0)
      problems.push_back(std::string("eos.") + name + " lower bound must be non-negative");
  };
  interval(t.theta_range, "theta_range", false);
  interval(t.s_range, "s_range", true);
  interval(t.p_range, "p_range", true);
  interval(t.rho_range, "rho_range", true);
  if (t.rho_range.lo <= 0.0) problems.push_back("eos.rho_range lower bound must be positive");
  if (!(t.rho0 > 0.0)) problems.push_back("eos.rho0 must be positive");
  if (!(t.g > 0.0)) problems.push_back("eos.g must be positive");
  if (t.terms.empty()) problems.push_back("eos.coeffs must not be empty");
  for (const auto& term : t.terms) {
    if (term.i < 0 || term.j < 0 || term.k < 0 || !std::isfinite(term.c))
      problems.push_back("eos.coeffs entry (" + std::to_string(term.i) + "," + std::to_string(term.j) + "," +
                         std::to_string(term.k) + ") is malformed");
  }
  if (!problems.empty()) throw ConfigError(problems);

  for_lattice(t, 9, [&](double th, double s, double p) {
    if (!problems.empty()) return;
    const double v = t.specific_volume(th, s, p);
    if (!(v > 0.0)) {
      problems.push_back("eos: specific volume not positive at theta=" + std::to_string(th) +
                         " S=" + std::to_string(s) + " p=" + std::to_string(p));
      return;
    }
    if (!t.rho_range.contains(1.0 / v))
      problems.push_back("eos: density " + std::to_string(1.0 / v) + " outside rho_range at theta=" +
                         std::to_string(th) + " S=" + std::to_string(s) + " p=" + std::to_string(p));
  });
  if (!problems.empty()) throw ConfigError(problems);
}

std::string eos_table_to_json(const EosTable& t) {
  nlohmann::ordered_json j;
  auto coeffs = nlohmann::ordered_json::array();
  for (const auto& term : t.terms)
    coeffs.push_back({{"i", term.i}, {"j", term.j}, {"k", term.k}, {"c", term.c}});
  j["coeffs"] = coeffs;
  j["theta_range"] = {t.theta_range.lo, t.theta_range.hi};
  j["s_range"] = {t.s_range.lo, t.s_range.hi};
  j["p_range"] = {t.p_range.lo, t.p_range.hi};
  j["rho_range"] = {t.rho_range.lo, t.rho_range.hi};
  j["rho0"] = t.rho0;
  j["g"] = t.g;
  return j.dump(2) + "\n";
}

EosTable eos_table_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("eos: malformed JSON: ") + e.what());
  }
  std::vector<std::string> problems;
  EosTable t;
  auto range = [&](const char* key, Interval& out) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2 || !j[key][0].is_number() ||
        !j[key][1].is_number()) {
      problems.push_back(std::string("eos.") + key + " must be a [lo, hi] pair");
      return;
    }
    out = {j[key][0].get<double>(), j[key][1].get<double>()};
  };
  auto number = [&](const char* key, double& out) {
    if (!j.contains(key) || !j[key].is_number()) {
      problems.push_back(std::string("eos.") + key + " must be a number");
      return;
    }
    out = j[key].get<double>();
  };
  if (!j.contains("coeffs") || !j["coeffs"].is_array()) {
    problems.push_back("eos.coeffs must be a list of {i,j,k,c}");
  } else {
    for (const auto& e : j["coeffs"]) {
      if (!e.is_object() || !e.contains("i") || !e.contains("j") || !e.contains("k") || !e.contains("c") ||
          !e["i"].is_number_integer() || !e["j"].is_number_integer() || !e["k"].is_number_integer() ||
          !e["c"].is_number()) {
        problems.push_back("eos.coeffs entries must be {i,j,k,c} with integer powers");
        continue;
      }
      t.terms.push_back({e["i"].get<int>(), e["j"].get<int>(), e["k"].get<int>(), e["c"].get<double>()});
    }
  }
  range("theta_range", t.theta_range);
  range("s_range", t.s_range);
  range("p_range", t.p_range);
  range("rho_range", t.rho_range);
  number("rho0", t.rho0);
  number("g", t.g);
  if (!problems.empty()) throw ConfigError(problems);
  validate_eos_table(t);
  return t;
}

EosTable load_eos_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("eos.table: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return eos_table_from_json(ss.str());
}

void save_eos_table(const EosTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write EOS table to '" + path + "'");
  out << eos_table_to_json(table);
}

ScalarField static_pressure(const Grid& grid, const EosTable& table) {
  return sample(grid, [&](double, double, double z) { return -table.g * table.rho0 * z; });
}

ScalarField density(const ThermoState& state, const EosTable& table) {
  check_shapes(state);
  ScalarField rho(state.theta.shape());
  for (std::size_t n = 0; n < rho.size(); ++n) {
    const double r = 1.0 / checked_volume(state, table, n);
    if (!table.rho_range.contains(r))
      throw EosDomainError("density " + std::to_string(r) + " outside rho_range at " +
                               cell_name(rho.shape(), n),
                           n);
    rho[n] = r;
  }
  return rho;
}

std::pair<ScalarField, ScalarField> expansion_contraction(const ThermoState& state, const EosTable& table) {
  check_shapes(state);
  ScalarField a(state.theta.shape());
  ScalarField b(state.theta.shape());
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double v = checked_volume(state, table, n);
    const double v2 = v * v;
    a[n] = table.dv_dtheta(state.theta[n], state.S[n], state.p_st[n]) / v2;
    b[n] = -table.dv_ds(state.theta[n], state.S[n], state.p_st[n]) / v2;
  }
  return {std::move(a), std::move(b)};
}

double derivative_sup(const EosTable& table, int samples_per_axis) {
  double sup = 0.0;
  for_lattice(table, std::max(samples_per_axis, 2), [&](double th, double s, double p) {
    const double v = table.specific_volume(th, s, p);
    const double v2 = v * v;
    sup = std::max({sup, std::abs(table.dv_dtheta(th, s, p) / v2), std::abs(table.dv_ds(th, s, p) / v2)});
  });
  return sup;
}

double lipschitz_bound(const EosTable& table) { return 2.0 * derivative_sup(table, 32); }

}  // namespace gmr
