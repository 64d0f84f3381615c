#include "gmr/eddy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gmr/errors.hpp"

namespace gmr {

void MixingParams::validate() const {
  std::vector<std::string> problems;
  if (!(K_I > 0.0)) problems.push_back("physics.K_I must be positive");
  if (!(K_D > 0.0)) problems.push_back("physics.K_D must be positive");
  if (!(kappa > 0.0)) problems.push_back("physics.kappa must be positive");
  if (K_I > 0.0 && K_D > 0.0 && !(K_D < K_I)) problems.push_back("physics.K_D must be smaller than physics.K_I");
  if (!problems.empty()) throw ConfigError(problems);
}

double Sym3::entry(int a, int b) const noexcept {
  if (a > b) std::swap(a, b);
  if (a == 0) return b == 0 ? k11 : (b == 1 ? k12 : k13);
  if (a == 1) return b == 1 ? k22 : k23;
  return k33;
}

double Skew3::entry(int a, int b) const noexcept {
  if (a == 0 && b == 2) return k13;
  if (a == 1 && b == 2) return k23;
  if (a == 2 && b == 0) return -k13;
  if (a == 2 && b == 1) return -k23;
  return 0.0;
}

double SymTensorField::gershgorin_max() const {
  double m = 0.0;
  for (const auto& t : cells) {
    m = std::max({m, t.k11 + std::abs(t.k12) + std::abs(t.k13), std::abs(t.k12) + t.k22 + std::abs(t.k23),
                  std::abs(t.k13) + std::abs(t.k23) + t.k33});
  }
  return m;
}

SymTensorField assemble_kiso_full(const SlopeField& L, const MixingParams& p) {
  SymTensorField K(L.shape());
  for (std::size_t n = 0; n < K.cells.size(); ++n) {
    const double lx = L.Lx[n], ly = L.Ly[n];
    const double l2 = lx * lx + ly * ly;
    const double inv = 1.0 / (1.0 + l2);
    // Entries of K_I/(1+|L|^2) * M(L, K_D/K_I), expanded so that L = 0 gives diag(K_I, K_I, K_D) exactly.
    Sym3& t = K.cells[n];
    t.k11 = (p.K_I * (1.0 + ly * ly) + p.K_D * lx * lx) * inv;
    t.k12 = (p.K_D - p.K_I) * lx * ly * inv;
    t.k13 = (p.K_I - p.K_D) * lx * inv;
    t.k22 = (p.K_I * (1.0 + lx * lx) + p.K_D * ly * ly) * inv;
    t.k23 = (p.K_I - p.K_D) * ly * inv;
    t.k33 = (p.K_D + p.K_I * l2) * inv;
  }
  return K;
}

SymTensorField assemble_kiso_small(const SlopeField& L, const MixingParams& p) {
  SymTensorField K(L.shape());
  for (std::size_t n = 0; n < K.cells.size(); ++n) {
    const double lx = L.Lx[n], ly = L.Ly[n];
    Sym3& t = K.cells[n];
    t.k11 = p.K_I;
    t.k22 = p.K_I;
    t.k13 = p.K_I * lx;
    t.k23 = p.K_I * ly;
    t.k33 = p.K_D + p.K_I * (lx * lx + ly * ly);
  }
  return K;
}

SkewTensorField assemble_kgm(const SlopeField& L, const MixingParams& p) {
  SkewTensorField K(L.shape());
  for (std::size_t n = 0; n < K.cells.size(); ++n) {
    K.cells[n].k13 = -p.kappa * L.Lx[n];
    K.cells[n].k23 = -p.kappa * L.Ly[n];
  }
  return K;
}

namespace {

struct OneSided {
  double plus[3];
  double minus[3];
  bool has_plus[3];
  bool has_minus[3];
};

inline OneSided one_sided(const ScalarField& C, const Grid& g, int i, int j, int k) {
  OneSided o{};
  const double c = C(i, j, k);
  o.has_plus[0] = i + 1 < g.nx;
  o.has_minus[0] = i > 0;
  o.has_plus[1] = j + 1 < g.ny;
  o.has_minus[1] = j > 0;
  o.has_plus[2] = k + 1 < g.nz;
  o.has_minus[2] = k > 0;
  o.plus[0] = o.has_plus[0] ? (C(i + 1, j, k) - c) / g.dx : 0.0;
  o.minus[0] = o.has_minus[0] ? (c - C(i - 1, j, k)) / g.dx : 0.0;
  o.plus[1] = o.has_plus[1] ? (C(i, j + 1, k) - c) / g.dy : 0.0;
  o.minus[1] = o.has_minus[1] ? (c - C(i, j - 1, k)) / g.dy : 0.0;
  o.plus[2] = o.has_plus[2] ? (C(i, j, k + 1) - c) / g.dz : 0.0;
  o.minus[2] = o.has_minus[2] ? (c - C(i, j, k - 1)) / g.dz : 0.0;
  return o;
}

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 combined(const SymTensorField* sym, const SkewTensorField* skew, std::size_t n) {
  Mat3 m{};
  if (sym) {
    const Sym3& s = sym->cells[n];
    m = {{{s.k11, s.k12, s.k13}, {s.k12, s.k22, s.k23}, {s.k13, s.k23, s.k33}}};
  }
  if (skew) {
    const Skew3& a = skew->cells[n];
    m[0][2] += a.k13;
    m[1][2] += a.k23;
    m[2][0] -= a.k13;
    m[2][1] -= a.k23;
  }
  return m;
}

void check_shape(const Grid& grid, const ScalarField& C, const Shape& tensor_shape, const char* who) {
  if (C.shape() != grid.shape() || tensor_shape != grid.shape())
    throw ArgumentError(std::string(who) + ": tensor, field and grid shapes differ");
}

}  // namespace

ScalarField triad_operator(const ScalarField& C, const Grid& grid, const SymTensorField* sym,
                           const SkewTensorField* skew) {
  if (C.shape() != grid.shape()) throw ArgumentError("triad_operator: field shape does not match grid");
  if ((sym && sym->shape != grid.shape()) || (skew && skew->shape != grid.shape()))
    throw ArgumentError("triad_operator: tensor shape does not match grid");

  const Shape s = grid.shape();
  const std::size_t stride[3] = {1, static_cast<std::size_t>(s.nx), s.columns()};
  const double h[3] = {grid.dx, grid.dy, grid.dz};
  ScalarField out(s);
  for (int k = 0; k < s.nz; ++k) {
    for (int j = 0; j < s.ny; ++j) {
      for (int i = 0; i < s.nx; ++i) {
        const std::size_t n = s.index(i, j, k);
        const Mat3 K = combined(sym, skew, n);
        const OneSided o = one_sided(C, grid, i, j, k);
        double sum[3];
        for (int a = 0; a < 3; ++a) sum[a] = o.plus[a] + o.minus[a];
        for (int a = 0; a < 3; ++a) {
          // Mean over the triads sharing a direction of the a-component of K g,
          // split into the own-axis part and the part from the other two axes.
          double cross = 0.0;
          for (int b = 0; b < 3; ++b)
            if (b != a) cross += K[a][b] * sum[b];
          cross *= 0.25;
          if (o.has_plus[a]) {
            const double f = (0.5 * K[a][a] * o.plus[a] + cross) / h[a];
            out[n + stride[a]] += f;
            out[n] -= f;
          }
          if (o.has_minus[a]) {
            const double f = (0.5 * K[a][a] * o.minus[a] + cross) / h[a];
            out[n - stride[a]] -= f;
            out[n] += f;
          }
        }
      }
    }
  }
  return out;
}

namespace {

template <class F>
void for_each_boundary_cell(const Grid& g, const BoundarySpec& bc, F&& f) {
  for (int face = 0; face < 6; ++face) {
    const FaceBc& fb = bc.faces[face];
    if (fb.kind == BcKind::NeumannZero) continue;
    const int axis = face / 2;
    const bool high = face % 2 == 1;
    const double h = g.spacing(axis);
    for (int k = 0; k < g.nz; ++k) {
      if (axis == 2 && k != (high ? g.nz - 1 : 0)) continue;
      for (int j = 0; j < g.ny; ++j) {
        if (axis == 1 && j != (high ? g.ny - 1 : 0)) continue;
        for (int i = 0; i < g.nx; ++i) {
          if (axis == 0 && i != (high ? g.nx - 1 : 0)) continue;
          f(fb, g.shape().index(i, j, k), face_cell_index(g, static_cast<Face>(face), i, j, k), h);
        }
      }
    }
  }
}

}  // namespace

void add_boundary_flux_terms(ScalarField& out, const ScalarField& C, const Grid& grid, const BoundarySpec& bc) {
  for_each_boundary_cell(grid, bc, [&](const FaceBc& fb, std::size_t n, std::size_t fc, double h) {
    if (fb.kind == BcKind::Robin)
      out[n] += fb.coefficient * (C[n] - fb.value(fc)) / h;
    else if (fb.kind == BcKind::PrescribedFlux)
      out[n] -= fb.value(fc) / h;
  });
}

void add_boundary_linear_terms(ScalarField& out, const ScalarField& C, const Grid& grid,
                               const BoundarySpec& bc) {
  for_each_boundary_cell(grid, bc, [&](const FaceBc& fb, std::size_t n, std::size_t, double h) {
    if (fb.kind == BcKind::Robin) out[n] += fb.coefficient * C[n] / h;
  });
}

ScalarField apply_eddy_operator(const SymTensorField& K, const ScalarField& C, const Grid& grid,
                                const BoundarySpec& bc) {
  check_shape(grid, C, K.shape, "apply_eddy_operator");
  ScalarField out = triad_operator(C, grid, &K, nullptr);
  add_boundary_flux_terms(out, C, grid, bc);
  return out;
}

ScalarField apply_eddy_operator(const SkewTensorField& K, const ScalarField& C, const Grid& grid,
                                const BoundarySpec& bc) {
  check_shape(grid, C, K.shape, "apply_eddy_operator");
  if (!bc.all_zero_flux())
    throw ArgumentError("apply_eddy_operator: the skew (GM) operator requires zero-flux boundaries");
  ScalarField out = triad_operator(C, grid, nullptr, &K);
  out *= -1.0;
  return out;
}

ScalarField triad_energy_density(const ScalarField& C, const Grid& grid, const SymTensorField& K) {
  check_shape(grid, C, K.shape, "triad_energy_density");
  ScalarField out(grid.shape());
  for (int k = 0; k < grid.nz; ++k) {
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        const std::size_t n = grid.shape().index(i, j, k);
        const Sym3& t = K.cells[n];
        const OneSided o = one_sided(C, grid, i, j, k);
        const double Kd[3] = {t.k11, t.k22, t.k33};
        double e = 0.0;
        for (int a = 0; a < 3; ++a) e += 0.5 * Kd[a] * (o.plus[a] * o.plus[a] + o.minus[a] * o.minus[a]);
        const double G[3] = {o.plus[0] + o.minus[0], o.plus[1] + o.minus[1], o.plus[2] + o.minus[2]};
        e += 0.5 * (t.k12 * G[0] * G[1] + t.k13 * G[0] * G[2] + t.k23 * G[1] * G[2]);
        out[n] = e;
      }
    }
  }
  return out;
}

double triad_energy(const ScalarField& C, const Grid& grid, const SymTensorField& K) {
  const ScalarField e = triad_energy_density(C, grid, K);
  double total = 0.0;
  for (double x : e.values()) total += x;
  return total * grid.cell_volume();
}

double triad_gradient_energy(const ScalarField& C, const Grid& grid) {
  if (C.shape() != grid.shape()) throw ArgumentError("triad_gradient_energy: shape mismatch");
  double total = 0.0;
  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const OneSided o = one_sided(C, grid, i, j, k);
        for (int a = 0; a < 3; ++a) total += 0.5 * (o.plus[a] * o.plus[a] + o.minus[a] * o.minus[a]);
      }
  return total * grid.cell_volume();
}

ScalarField triad_diagonal(const SymTensorField& K, const Grid& grid, const BoundarySpec& bc) {
  if (K.shape != grid.shape()) throw ArgumentError("triad_diagonal: shape mismatch");
  const Shape s = grid.shape();
  const std::size_t stride[3] = {1, static_cast<std::size_t>(s.nx), s.columns()};
  const double h[3] = {grid.dx, grid.dy, grid.dz};
  ScalarField d(s);
  for (int k = 0; k < s.nz; ++k) {
    for (int j = 0; j < s.ny; ++j) {
      for (int i = 0; i < s.nx; ++i) {
        const std::size_t n = s.index(i, j, k);
        const int idx[3] = {i, j, k};
        const int cnt[3] = {s.nx, s.ny, s.nz};
        const Sym3& t = K.cells[n];
        double e[3];  // has_plus - has_minus
        for (int a = 0; a < 3; ++a) {
          const bool p = idx[a] + 1 < cnt[a];
          const bool m = idx[a] > 0;
          const double kaa = t.entry(a, a);
          d[n] += 0.5 * kaa * ((p ? 1.0 : 0.0) + (m ? 1.0 : 0.0)) / (h[a] * h[a]);
          if (p) d[n + stride[a]] += 0.5 * kaa / (h[a] * h[a]);
          if (m) d[n - stride[a]] += 0.5 * kaa / (h[a] * h[a]);
          e[a] = (p ? 1.0 : 0.0) - (m ? 1.0 : 0.0);
        }
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            if (a != b) d[n] += 0.25 * t.entry(a, b) * e[a] * e[b] / (h[a] * h[b]);
      }
    }
  }
  ScalarField ones(s, 1.0);
  add_boundary_linear_terms(d, ones, grid, bc);
  return d;
}

BolusVelocity bolus_velocity(const SlopeField& L, const MixingParams& params, const Grid& grid,
                             const RegionMask& mask) {
  if (L.shape() != grid.shape()) throw ArgumentError("bolus_velocity: slope shape does not match grid");
  ScalarField kx = L.Lx;
  ScalarField ky = L.Ly;
  kx *= params.kappa;
  ky *= params.kappa;
  const BoundarySpec bc = BoundarySpec::neumann_zero();
  BolusVelocity out;
  out.vstar.u = diff(kx, Axis::Z, grid, bc);
  out.vstar.v = diff(ky, Axis::Z, grid, bc);
  out.vstar.u *= -1.0;
  out.vstar.v *= -1.0;
  out.wstar = diff(kx, Axis::X, grid, bc);
  out.wstar += diff(ky, Axis::Y, grid, bc);
  for (std::size_t n = 0; n < grid.cells(); ++n) {
    if (mask.in_omega01(n)) continue;
    out.vstar.u[n] = 0.0;
    out.vstar.v[n] = 0.0;
    out.wstar[n] = 0.0;
  }
  return out;
}

namespace {

std::array<ScalarField, 3> centred_gradient(const ScalarField& C, const Grid& grid) {
  const BoundarySpec bc = BoundarySpec::neumann_zero();
  return {diff(C, Axis::X, grid, bc), diff(C, Axis::Y, grid, bc), diff(C, Axis::Z, grid, bc)};
}

}  // namespace

double isoneutral_flux_balance_check(const ThermoState& state, const EosTable& table, const SymTensorField& K,
                                     const SlopeField& L, const Grid& grid) {
  if (!table.is_linear())
    throw ConfigError("flux balance check requires a linear equation of state (terms c000, c010, c100 only)");
  if (K.shape != grid.shape() || L.shape() != grid.shape())
    throw ArgumentError("isoneutral_flux_balance_check: shape mismatch");
  const auto [a, b] = expansion_contraction(state, table);
  const auto gt = centred_gradient(state.theta, grid);
  const auto gs = centred_gradient(state.S, grid);
  double worst = 0.0;
  for (std::size_t n = 0; n < grid.cells(); ++n) {
    if (!L.active[n]) continue;
    const std::array<double, 3> mix{a[n] * gt[0][n] - b[n] * gs[0][n], a[n] * gt[1][n] - b[n] * gs[1][n],
                                    a[n] * gt[2][n] - b[n] * gs[2][n]};
    const auto f = K.cells[n].apply(mix);
    worst = std::max(worst, std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]));
  }
  return worst;
}

double isoneutral_residual(const SymTensorField& K, const ScalarField& rho_tilde, const SlopeField& L,
                           const Grid& grid) {
  if (K.shape != grid.shape() || L.shape() != grid.shape() || rho_tilde.shape() != grid.shape())
    throw ArgumentError("isoneutral_residual: shape mismatch");
  const auto gr = centred_gradient(rho_tilde, grid);
  double worst = 0.0;
  for (std::size_t n = 0; n < grid.cells(); ++n) {
    if (!L.active[n]) continue;
    const auto f = K.cells[n].apply({gr[0][n], gr[1][n], gr[2][n]});
    worst = std::max(worst, std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]));
  }
  return worst;
}

}  // namespace gmr
