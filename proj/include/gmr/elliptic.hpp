#pragma once

#include <functional>
#include <vector>

#include "gmr/eddy.hpp"
#include "gmr/field.hpp"
#include "gmr/grid.hpp"

namespace gmr {

enum class Krylov {
  CG,  ///< conjugate gradients: monotone error in the operator norm
  CR,  ///< conjugate residuals: monotone residual 2-norm
};

struct SolveOptions {
  double rtol = 1e-10;
  double atol = 0.0;
  int maxit = 5000;
  Krylov method = Krylov::CG;
  bool jacobi = false;  ///< diagonal scaling (CG only)
};

struct SolveReport {
  int iterations = 0;
  double initial_residual = 0.0;  ///< discrete L2 norm of b - A x0
  double final_residual = 0.0;
  bool converged = false;
  std::vector<double> residual_trace;  ///< residual after every iteration, starting with the initial one
};

struct IsoneutralSolution {
  ScalarField C;
  SolveReport report;
};

/// Solves D_iso(C) = F for the operator of apply_eddy_operator(K, ., grid, bc).
/// With a Robin face the operator is definite. Without one the problem is the
/// pure-Neumann variant: F must have zero mean (ArgumentError otherwise) and
/// the zero-mean solution is returned. Non-convergence is reported, not thrown;
/// negative curvature throws NumericalError naming the offending cell.
IsoneutralSolution solve_isoneutral(const SymTensorField& K, const ScalarField& F, const Grid& grid,
                                    const BoundarySpec& bc, const SolveOptions& options = {});

struct SurfacePressure {
  Field2D ps;  ///< kinematic surface pressure (m^2/s^2), zero mean
  SolveReport report;
};

/// Depth mean of a horizontal velocity, per column.
std::pair<Field2D, Field2D> depth_mean(const VectorField& v, const Grid& grid);
/// Horizontal divergence of a column field with face values averaged from
/// neighbouring columns and zero normal flow through the walls.
Field2D column_divergence(const Field2D& u, const Field2D& v, const Grid& grid);
/// Gradient adjoint to column_divergence (G = -D^T), i.e. centred with mirrored walls.
std::pair<Field2D, Field2D> column_gradient(const Field2D& p, const Grid& grid);

/// Solves D G ps = D(mean v)/dt so that v - dt G ps has zero depth-integrated divergence.
SurfacePressure solve_surface_pressure(const VectorField& v_predictor, const Grid& grid, double dt,
                                       const SolveOptions& options = {});
/// v <- v - dt G ps at every level.
void apply_surface_pressure(VectorField& v, const Field2D& ps, const Grid& grid, double dt);

using TensorBuilder = std::function<SymTensorField(const ScalarField& theta, const ScalarField& S)>;

struct PicardOptions {
  double tol = 1e-8;
  int max_sweeps = 50;
};

struct PicardResult {
  ScalarField theta;
  ScalarField S;
  int sweeps = 0;
  double last_change = 0.0;  ///< relative L2 change of the final sweep
  bool converged = false;
  std::vector<SolveReport> solves;
};

/// Fixed-point coupling: K is rebuilt from the current (theta, S) and both
/// problems are re-solved until the relative change drops below tol.
PicardResult solve_isoneutral_coupled(const TensorBuilder& build, const ScalarField& F, const ScalarField& G,
                                      const Grid& grid, const BoundarySpec& bc_theta, const BoundarySpec& bc_s,
                                      ScalarField theta0, ScalarField S0, const SolveOptions& options = {},
                                      const PicardOptions& picard = {});

}  // namespace gmr
