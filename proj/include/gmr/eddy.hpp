#pragma once

#include <array>
#include <vector>

#include "gmr/eos.hpp"
#include "gmr/field.hpp"
#include "gmr/grid.hpp"
#include "gmr/neutral.hpp"

namespace gmr {

/// Isoneutral / dianeutral diffusivities and the eddy advection coefficient (m^2/s).
struct MixingParams {
  double K_I = 1.0e3;
  double K_D = 1.0e-1;
  double kappa = 1.0e3;

  double delta() const noexcept { return K_D / K_I; }
  /// Throws ConfigError unless K_I, K_D, kappa > 0 and K_D < K_I.
  void validate() const;
  friend bool operator==(const MixingParams&, const MixingParams&) = default;
};

/// Symmetric 3x3 matrix, upper triangle.
struct Sym3 {
  double k11 = 0, k12 = 0, k13 = 0, k22 = 0, k23 = 0, k33 = 0;

  std::array<double, 3> apply(const std::array<double, 3>& g) const noexcept {
    return {k11 * g[0] + k12 * g[1] + k13 * g[2], k12 * g[0] + k22 * g[1] + k23 * g[2],
            k13 * g[0] + k23 * g[1] + k33 * g[2]};
  }
  double entry(int a, int b) const noexcept;
};

/// Antisymmetric 3x3 matrix with zero horizontal block: k31 = -k13, k32 = -k23.
struct Skew3 {
  double k13 = 0, k23 = 0;

  std::array<double, 3> apply(const std::array<double, 3>& g) const noexcept {
    return {k13 * g[2], k23 * g[2], -k13 * g[0] - k23 * g[1]};
  }
  double entry(int a, int b) const noexcept;
};

struct SymTensorField {
  Shape shape{};
  std::vector<Sym3> cells;

  SymTensorField() = default;
  explicit SymTensorField(Shape s) : shape(s), cells(s.size()) {}
  /// Largest per-cell Gershgorin bound of the eigenvalues.
  double gershgorin_max() const;
};

struct SkewTensorField {
  Shape shape{};
  std::vector<Skew3> cells;

  SkewTensorField() = default;
  explicit SkewTensorField(Shape s) : shape(s), cells(s.size()) {}
};

/// Redi tensor K_I/(1+|L|^2) [[1+d Lx^2+Ly^2, (d-1)LxLy, (1-d)Lx], ..., d+|L|^2].
SymTensorField assemble_kiso_full(const SlopeField& L, const MixingParams& params);
/// Small-slope tensor K_I [[1,0,Lx],[0,1,Ly],[Lx,Ly,d+|L|^2]] from clipped slopes.
SymTensorField assemble_kiso_small(const SlopeField& L_clipped, const MixingParams& params);
/// Skew tensor: k13 = -kappa Lx, k23 = -kappa Ly.
SkewTensorField assemble_kgm(const SlopeField& L, const MixingParams& params);

/// D_iso(C) = -div(K grad C), including the surface/face flux closures of `bc`.
/// For this operator a FaceBc prescribes the outward diffusive flux (K grad C).n:
/// Robin gives -coefficient*(C - data), PrescribedFlux gives data.
ScalarField apply_eddy_operator(const SymTensorField& K, const ScalarField& C, const Grid& grid,
                                const BoundarySpec& bc);
/// D_GM(C) = +div(K_GM grad C). Requires a zero-flux `bc`.
ScalarField apply_eddy_operator(const SkewTensorField& K, const ScalarField& C, const Grid& grid,
                                const BoundarySpec& bc);

/// Linear part of the flux-form operator, G^T K G C, for K = sym + skew
/// (either may be null). Every gradient is one of the eight one-sided
/// "triad" gradients of a cell; components pointing through a face are zero.
ScalarField triad_operator(const ScalarField& C, const Grid& grid, const SymTensorField* sym,
                           const SkewTensorField* skew);

/// Zero-flux closure plus the affine boundary terms of `bc` for a symmetric operator:
/// adds (per unit volume) the outward flux contributions to `out`.
void add_boundary_flux_terms(ScalarField& out, const ScalarField& C, const Grid& grid,
                             const BoundarySpec& bc);
/// Linear part of the boundary terms only (Robin coefficient times C).
void add_boundary_linear_terms(ScalarField& out, const ScalarField& C, const Grid& grid,
                               const BoundarySpec& bc);

/// Per-cell mean over the eight triads of g.K g.
ScalarField triad_energy_density(const ScalarField& C, const Grid& grid, const SymTensorField& K);
/// sum_cells vol * mean_triads g.K g  (the discrete integral of grad C . K grad C).
double triad_energy(const ScalarField& C, const Grid& grid, const SymTensorField& K);
/// sum_cells vol * mean_triads |g|^2.
double triad_gradient_energy(const ScalarField& C, const Grid& grid);

/// Diagonal of G^T K G plus the Robin terms of `bc` (Jacobi scaling).
ScalarField triad_diagonal(const SymTensorField& K, const Grid& grid, const BoundarySpec& bc);

struct BolusVelocity {
  VectorField vstar;
  ScalarField wstar;
};

/// v* = -d_z(kappa L), w* = div_h(kappa L) on Omega_{0,1}; zero elsewhere.
BolusVelocity bolus_velocity(const SlopeField& L, const MixingParams& params, const Grid& grid,
                             const RegionMask& mask);

/// max over active slope cells of |a F(theta) - b F(S)|, F(C) = K grad C,
/// with centred gradients. Requires a linear table (ConfigError otherwise).
double isoneutral_flux_balance_check(const ThermoState& state, const EosTable& table,
                                     const SymTensorField& K, const SlopeField& L, const Grid& grid);

/// max over active slope cells of |K grad rho~| with centred gradients.
double isoneutral_residual(const SymTensorField& K, const ScalarField& rho_tilde, const SlopeField& L,
                           const Grid& grid);

}  // namespace gmr
