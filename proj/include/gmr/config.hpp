#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmr/dynamics.hpp"
#include "gmr/eddy.hpp"
#include "gmr/grid.hpp"
#include "gmr/neutral.hpp"

namespace gmr {

struct PhysicsConfig {
  MixingParams mixing;
  double Re1 = 1.0e-2;
  double Re2 = 1.0e-1;
  double f = 1.0e-4;
  std::optional<double> g;     ///< must agree with the EOS table when given
  std::optional<double> rho0;

  friend bool operator==(const PhysicsConfig&, const PhysicsConfig&) = default;
};

/// Wind stress: "constant" (x, y) or "gyre" tau_x = -amplitude cos(2 pi y / Ly).
struct TauSpec {
  std::string type = "constant";
  double x = 0.0;
  double y = 0.0;
  double amplitude = 0.0;
  friend bool operator==(const TauSpec&, const TauSpec&) = default;
};

/// Restoring temperature: "constant" (value) or "linear_y" from south to north.
struct ThetaStarSpec {
  std::string type = "constant";
  double value = 16.0;
  double south = 16.0;
  double north = 16.0;
  friend bool operator==(const ThetaStarSpec&, const ThetaStarSpec&) = default;
};

struct BoundaryConfig {
  TauSpec tau;
  ThetaStarSpec theta_star;
  double k_theta = 0.0;
  friend bool operator==(const BoundaryConfig&, const BoundaryConfig&) = default;
};

struct RunConfig {
  double dt_max = 1.0;
  int steps = 100;
  int snapshot_every = 0;  ///< 0: initial and final snapshot only
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  double cfl_safety = 0.5;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Initial state. "equilibrium": rest, uniform theta0/S0.
/// "baroclinic_front": rest, linear stratification plus a tanh front in y.
struct InitialConfig {
  std::string scenario = "baroclinic_front";
  double theta0 = 10.0;
  double s0 = 35.0;
  double theta_top = 16.0;
  double theta_bottom = 4.0;
  double s_top = 34.5;
  double s_bottom = 35.0;
  double front_dtheta = 1.0;
  double front_width = 200.0;
  double noise = 0.0;  ///< amplitude of a seeded uniform perturbation of theta
  friend bool operator==(const InitialConfig&, const InitialConfig&) = default;
};

struct SimConfig {
  GridSpec grid;
  PhysicsConfig physics;
  RegularizationParams reg;
  Closure closure = Closure::Full;
  std::string eos_table = "default";  ///< path, or "default" for the shipped table
  BoundaryConfig boundary;
  RunConfig run;
  InitialConfig initial;
  bool frozen_velocity = false;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Parses JSON text; unknown blocks/keys and every invalid value are collected
/// into one ConfigError. `overrides` are "dotted.path=value" strings applied
/// in order before parsing (value parsed as JSON, falling back to a string).
SimConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
SimConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
std::string config_to_json(const SimConfig& config);

/// Everything needed to start a run.
struct Setup {
  Model model;
  OceanState initial;
};

/// Loads the EOS table, builds grid/model and the initial state; all
/// validation problems are reported together.
Setup build_setup(const SimConfig& config);

OceanState initial_state(const InitialConfig& init, const Model& model, std::uint64_t seed);

}  // namespace gmr
