#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gmr/field.hpp"
#include "gmr/grid.hpp"

namespace gmr {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  double width() const noexcept { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// One term c * S^i * theta^j * p^k of the specific-volume polynomial.
struct EosTerm {
  int i = 0;  ///< salinity power
  int j = 0;  ///< temperature power
  int k = 0;  ///< pressure power
  double c = 0.0;
  friend bool operator==(const EosTerm&, const EosTerm&) = default;
};

/// Polynomial equation of state given through the specific volume
///   v(theta, S, p) = sum c_ijk S^i theta^j p^k,  rho = 1 / v,
/// together with the admissible ranges of its arguments and of rho.
struct EosTable {
  std::vector<EosTerm> terms;
  Interval theta_range;
  Interval s_range;
  Interval p_range;
  Interval rho_range;
  double rho0 = 1027.0;
  double g = 9.81;

  double specific_volume(double theta, double s, double p) const noexcept;
  double dv_dtheta(double theta, double s, double p) const noexcept;
  double dv_ds(double theta, double s, double p) const noexcept;
  /// True when v has no pressure dependence and is affine in (theta, S).
  bool is_linear() const noexcept;

  friend bool operator==(const EosTable&, const EosTable&) = default;
};

/// Reduced shipped table: constant + theta + S + theta*p terms.
EosTable default_eos_table();

/// Structural checks plus lattice sampling of v > 0 and rho in rho_range.
/// Throws ConfigError listing every violation.
void validate_eos_table(const EosTable& table);

std::string eos_table_to_json(const EosTable& table);
/// Parses and validates.
EosTable eos_table_from_json(std::string_view text);
EosTable load_eos_table(const std::string& path);
void save_eos_table(const EosTable& table, const std::string& path);

struct ThermoState {
  ScalarField theta;
  ScalarField S;
  ScalarField p_st;
};

/// p_st(z) = -g rho0 z at every cell centre.
ScalarField static_pressure(const Grid& grid, const EosTable& table);

/// Pointwise rho = 1/v. Inputs outside their admissible intervals raise
/// AdmissibilityError; v <= 0 or rho outside rho_range raise EosDomainError.
ScalarField density(const ThermoState& state, const EosTable& table);

/// a = -d rho/d theta, b = d rho/d S, from the analytic derivative of v.
std::pair<ScalarField, ScalarField> expansion_contraction(const ThermoState& state,
                                                          const EosTable& table);

/// sup of max(|d rho/d theta|, |d rho/d S|) over a samples^3 lattice of the admissible box.
double derivative_sup(const EosTable& table, int samples_per_axis = 32);

/// Constant K of |rho1 - rho2| <= K (|theta1 - theta2| + |S1 - S2|):
/// the lattice sup of the partial derivatives times a safety factor of 2.
double lipschitz_bound(const EosTable& table);

}  // namespace gmr
