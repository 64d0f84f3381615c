#pragma once

#include <array>
#include <vector>

#include "gmr/field.hpp"
#include "gmr/grid.hpp"

namespace gmr {

/// Regularization controls of the neutral physics.
struct RegularizationParams {
  double eta = 125.0;   ///< mollifier scale and boundary band width (m)
  double s0 = 5.0e-4;   ///< minimal stratification |d rho/dz| for untapered slopes
  double eps0 = 2.5e-4; ///< width of the taper transition
  double r = 0.1;       ///< small-slope clip threshold

  /// Throws ConfigError unless s0 > eps0 > 0, eta > 0 and 0 <= r < 0.5.
  void validate() const;
  friend bool operator==(const RegularizationParams&, const RegularizationParams&) = default;
};

/// Isoneutral slope vector per cell; `active` marks cells where neither the
/// boundary cut-off nor the stratification taper reduce the slope.
struct SlopeField {
  ScalarField Lx;
  ScalarField Ly;
  std::vector<bool> active;

  SlopeField() = default;
  explicit SlopeField(Shape shape) : Lx(shape), Ly(shape), active(shape.size(), false) {}
  const Shape& shape() const noexcept { return Lx.shape(); }
  double max_magnitude() const;
};

/// Sampled bump kernel exp(-1/(1-|2x/eta|^2)) on |x| < eta/2, normalized to unit discrete sum.
struct MollifierKernel {
  std::vector<std::array<int, 3>> offsets;
  std::vector<double> weights;
};

/// Throws ConfigError when eta/2 does not exceed the largest grid spacing.
MollifierKernel make_mollifier_kernel(const Grid& grid, double eta);

/// Regularized density: kernel convolution on Omega_{1,2}, exactly zero elsewhere.
ScalarField mollify(const ScalarField& rho, const Grid& grid, const MollifierKernel& kernel,
                    const RegionMask& mask);
ScalarField mollify(const ScalarField& rho, const Grid& grid, const RegularizationParams& params,
                    const RegionMask& mask);

/// C2 quintic step: 0 for s <= 0, 1 for s >= 1.
double smoothstep(double s) noexcept;

/// Boundary cut-off xi(dist/eta) with xi = 0 on [0,1], 1 on [2,inf).
double cutoff_value(double distance, double eta) noexcept;
ScalarField cutoff(const Grid& grid, const RegularizationParams& params);

/// Stratification taper: 1 for x >= s0, 0 for x <= s0 - eps0.
double taper(double x, const RegularizationParams& params) noexcept;

/// L = -(grad_h rho~ / d_z rho~) * cutoff * taper(|d_z rho~|), zero where
/// |d_z rho~| <= s0 - eps0 or dist <= eta. Throws ArgumentError on NaN input.
SlopeField slope(const ScalarField& rho_tilde, const Grid& grid, const RegularizationParams& params,
                 const RegionMask& mask);

/// L where |L| < r, zero otherwise.
SlopeField clip_small_slope(const SlopeField& L, const RegularizationParams& params);

}  // namespace gmr
