#include "gmr/neutral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gmr/errors.hpp"

namespace gmr {

void RegularizationParams::validate() const {
  std::vector<std::string> problems;
  if (!(eta > 0.0)) problems.push_back("regularization.eta must be positive");
  if (!(eps0 > 0.0)) problems.push_back("regularization.eps0 must be positive");
  if (!(s0 > eps0)) problems.push_back("regularization.s0 must exceed regularization.eps0");
  if (!(r >= 0.0 && r < 0.5)) problems.push_back("regularization.r must lie in [0, 0.5)");
  if (!problems.empty()) throw ConfigError(problems);
}

double SlopeField::max_magnitude() const {
  double m = 0.0;
  for (std::size_t n = 0; n < Lx.size(); ++n) m = std::max(m, std::hypot(Lx[n], Ly[n]));
  return m;
}

MollifierKernel make_mollifier_kernel(const Grid& grid, double eta) {
  const double radius = 0.5 * eta;
  if (!(radius > grid.max_spacing()))
    throw ConfigError("regularization.eta: mollifier radius eta/2 must exceed the largest grid spacing");

  const int ri = static_cast<int>(std::ceil(radius / grid.dx));
  const int rj = static_cast<int>(std::ceil(radius / grid.dy));
  const int rk = static_cast<int>(std::ceil(radius / grid.dz));
  MollifierKernel kernel;
  double total = 0.0;
  for (int dk = -rk; dk <= rk; ++dk) {
    for (int dj = -rj; dj <= rj; ++dj) {
      for (int di = -ri; di <= ri; ++di) {
        const double x = di * grid.dx, y = dj * grid.dy, z = dk * grid.dz;
        const double s = std::sqrt(x * x + y * y + z * z) / radius;
        if (s >= 1.0) continue;
        const double w = std::exp(-1.0 / (1.0 - s * s));
        kernel.offsets.push_back({di, dj, dk});
        kernel.weights.push_back(w);
        total += w;
      }
    }
  }
  for (double& w : kernel.weights) w /= total;
  return kernel;
}

ScalarField mollify(const ScalarField& rho, const Grid& grid, const MollifierKernel& kernel,
                    const RegionMask& mask) {
  if (rho.shape() != grid.shape()) throw ArgumentError("mollify: field shape does not match grid");
  if (!rho.all_finite()) throw ArgumentError("mollify: density contains non-finite values");

  ScalarField out(grid.shape());
  for (int k = 0; k < grid.nz; ++k) {
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        const std::size_t n = grid.shape().index(i, j, k);
        if (!mask.in_omega12(n)) continue;
        // Written as centre + weighted deviations so constants reproduce exactly.
        const double centre = rho[n];
        double acc = 0.0;
        for (std::size_t q = 0; q < kernel.offsets.size(); ++q) {
          const auto& o = kernel.offsets[q];
          const int ii = i + o[0], jj = j + o[1], kk = k + o[2];
          const bool inside = ii >= 0 && ii < grid.nx && jj >= 0 && jj < grid.ny && kk >= 0 && kk < grid.nz;
          const double value = inside ? rho(ii, jj, kk) : 0.0;
          acc += kernel.weights[q] * (value - centre);
        }
        out[n] = centre + acc;
      }
    }
  }
  return out;
}

ScalarField mollify(const ScalarField& rho, const Grid& grid, const RegularizationParams& params,
                    const RegionMask& mask) {
  return mollify(rho, grid, make_mollifier_kernel(grid, params.eta), mask);
}

double smoothstep(double s) noexcept {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

double cutoff_value(double distance, double eta) noexcept { return smoothstep(distance / eta - 1.0); }

ScalarField cutoff(const Grid& grid, const RegularizationParams& params) {
  ScalarField out(grid.shape());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = cutoff_value(grid.boundary_distance[n], params.eta);
  return out;
}

double taper(double x, const RegularizationParams& params) noexcept {
  return smoothstep((x - (params.s0 - params.eps0)) / params.eps0);
}

SlopeField slope(const ScalarField& rho_tilde, const Grid& grid, const RegularizationParams& params,
                 const RegionMask& mask) {
  if (rho_tilde.shape() != grid.shape()) throw ArgumentError("slope: field shape does not match grid");
  if (!rho_tilde.all_finite()) throw ArgumentError("slope: regularized density contains NaN/Inf");

  const BoundarySpec bc = BoundarySpec::neumann_zero();
  const ScalarField drdx = diff(rho_tilde, Axis::X, grid, bc);
  const ScalarField drdy = diff(rho_tilde, Axis::Y, grid, bc);
  const ScalarField drdz = diff(rho_tilde, Axis::Z, grid, bc);

  SlopeField L(grid.shape());
  const double floor = params.s0 - params.eps0;
  for (std::size_t n = 0; n < L.Lx.size(); ++n) {
    const double pi = cutoff_value(mask.distance[n], params.eta);
    const double strat = std::abs(drdz[n]);
    if (pi == 0.0 || !(strat > floor)) continue;
    const double tp = taper(strat, params);
    const double factor = -pi * tp / drdz[n];
    L.Lx[n] = factor * drdx[n];
    L.Ly[n] = factor * drdy[n];
    L.active[n] = pi == 1.0 && tp == 1.0;
  }
  return L;
}

SlopeField clip_small_slope(const SlopeField& L, const RegularizationParams& params) {
  SlopeField out = L;
  for (std::size_t n = 0; n < out.Lx.size(); ++n) {
    if (std::hypot(out.Lx[n], out.Ly[n]) < params.r) continue;
    out.Lx[n] = 0.0;
    out.Ly[n] = 0.0;
  }
  return out;
}

}  // namespace gmr
