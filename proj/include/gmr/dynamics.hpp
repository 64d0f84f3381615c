#pragma once

#include "gmr/eddy.hpp"
#include "gmr/elliptic.hpp"
#include "gmr/eos.hpp"
#include "gmr/field.hpp"
#include "gmr/grid.hpp"
#include "gmr/neutral.hpp"

namespace gmr {

enum class Closure { Full, SmallSlope };

/// Surface forcing and the rotation/viscosity numbers.
struct BoundaryData {
  Field2D tau_x;       ///< wind stress, dv/dz = h tau at the surface
  Field2D tau_y;
  Field2D theta_star;  ///< restoring temperature
  double k_theta = 0.0;  ///< restoring rate (m/s)
  double f = 1.0e-4;     ///< Coriolis parameter (1/s)
  double Re1 = 1.0e-2;   ///< 1 / horizontal viscosity
  double Re2 = 1.0e-1;   ///< 1 / vertical viscosity

  /// Throws ConfigError unless k_theta >= 0, Re1, Re2 > 0 and the surface fields fit the grid.
  void validate(const Grid& grid) const;
};

struct TimeControls {
  double dt_max = 1.0;
  double safety = 0.5;
};

/// Everything a step needs besides the state. Built by make_model, which also
/// precomputes the region mask, mollifier kernel and static pressure.
struct Model {
  Grid grid;
  EosTable table;
  MixingParams mixing;
  RegularizationParams reg;
  Closure closure = Closure::Full;
  BoundaryData bd;
  TimeControls time;
  bool frozen_velocity = false;  ///< keep v fixed (tracer-only runs)

  RegionMask mask;
  MollifierKernel kernel;
  ScalarField p_st;
};

Model make_model(const Grid& grid, const EosTable& table, const MixingParams& mixing,
                 const RegularizationParams& reg, Closure closure, BoundaryData bd, TimeControls time = {});

struct OceanState {
  VectorField v;
  ScalarField theta;
  ScalarField S;
  double t = 0.0;
  Field2D ps;  ///< surface pressure of the last projection (kinematic)

  friend bool operator==(const OceanState&, const OceanState&) = default;
};

OceanState make_state(const Grid& grid);

/// Per-stage diagnosed quantities: density, regularized density, slopes and tensors.
struct Diagnostics {
  ScalarField rho;
  ScalarField rho_tilde;
  SlopeField L;  ///< slope used by the tensors (clipped for the small-slope closure)
  SymTensorField Kiso;
  SkewTensorField Kgm;
};

Diagnostics diagnose(const OceanState& state, const Model& model);

/// Normal velocities on cell faces from averaged cell values; zero through the walls.
/// W comes from continuity integrated up from W(-h) = 0; its top value is the
/// rigid-lid residual and is replaced by 0 in `W` (see `w_surface`).
struct FaceFlow {
  ScalarField U;  ///< (nx+1) x ny x nz
  ScalarField V;  ///< nx x (ny+1) x nz
  ScalarField W;  ///< nx x ny x (nz+1)
  Field2D w_surface;
};

FaceFlow face_flow(const VectorField& v, const Grid& grid);

/// w at cell centres (mean of the two bounding faces), w(-h) = 0.
ScalarField vertical_velocity(const VectorField& v, const Grid& grid);

/// p(z) = p_s + g * int_z^0 rho, so dp/dz = -g rho. Same units as p_s (Pa).
ScalarField hydrostatic_pressure(const ScalarField& rho, const Field2D& ps, const Grid& grid,
                                 const EosTable& table);

/// Flux-form centred advection div(u C) with the face velocities of `flow`.
ScalarField advect(const ScalarField& C, const FaceFlow& flow, const Grid& grid);

/// Momentum tendency without the surface-pressure gradient (removed by projection).
VectorField momentum_rhs(const OceanState& state, const Diagnostics& diag, const FaceFlow& flow,
                         const Model& model);

enum class Tracer { Theta, Salinity };

/// Boundary closure of the eddy operator for a tracer (Robin at the surface for theta).
BoundarySpec tracer_bc(Tracer which, const Model& model);

ScalarField tracer_rhs(const OceanState& state, Tracer which, const Diagnostics& diag, const FaceFlow& flow,
                       const Model& model);

struct BudgetRecord {
  double t = 0.0;
  double ke = 0.0;
  double theta_l2 = 0.0;
  double s_l2 = 0.0;
  double theta_min = 0.0, theta_max = 0.0;
  double s_min = 0.0, s_max = 0.0;
  double s_mean = 0.0;
  double iso_dissipation = 0.0;  ///< sum over theta, S of int grad C . K_iso grad C
  double gm_variance = 0.0;      ///< sum over theta, S of int C D_GM(C)
  double robin_term = 0.0;       ///< k_theta int_surface theta (theta - theta*)
  double energy_residual = 0.0;  ///< relative defect of the tracer variance identity
};

BudgetRecord budgets(const OceanState& state, const Model& model);

/// Largest admissible step for this state, never above time.dt_max.
double cfl_dt(const OceanState& state, const Model& model);

struct StepResult {
  OceanState state;
  BudgetRecord budget;  ///< budget of the input state
};

/// Three-stage SSP Runge-Kutta step with a surface-pressure projection after every stage.
/// Throws ArgumentError if dt exceeds cfl_dt, IntegrationAborted on non-finite values.
StepResult step(const OceanState& state, double dt, const Model& model);
/// step() with dt = cfl_dt(state).
StepResult step_adaptive(const OceanState& state, const Model& model);

}  // namespace gmr
