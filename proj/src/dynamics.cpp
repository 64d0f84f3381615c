#include "gmr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmr/errors.hpp"

namespace gmr {

void BoundaryData::validate(const Grid& grid) const {
  std::vector<std::string> problems;
  if (!(k_theta >= 0.0)) problems.push_back("boundary.k_theta must be non-negative");
  if (!(Re1 > 0.0)) problems.push_back("physics.Re1 must be positive");
  if (!(Re2 > 0.0)) problems.push_back("physics.Re2 must be positive");
  if (!std::isfinite(f)) problems.push_back("physics.f must be finite");
  auto surface = [&](const Field2D& field, const char* name) {
    if (field.size() == 0) return;
    if (field.nx() != grid.nx || field.ny() != grid.ny)
      problems.push_back(std::string("boundary.") + name + " does not match the horizontal grid");
    for (double x : field.values())
      if (!std::isfinite(x)) {
        problems.push_back(std::string("boundary.") + name + " contains non-finite values");
        break;
      }
  };
  surface(tau_x, "tau");
  surface(tau_y, "tau");
  surface(theta_star, "thetaStar");
  if (!problems.empty()) throw ConfigError(problems);
}

Model make_model(const Grid& grid, const EosTable& table, const MixingParams& mixing,
                 const RegularizationParams& reg, Closure closure, BoundaryData bd, TimeControls time) {
  mixing.validate();
  reg.validate();
  bd.validate(grid);
  std::vector<std::string> problems;
  if (!(time.dt_max > 0.0)) problems.push_back("run.dt_max must be positive");
  if (!(time.safety > 0.0 && time.safety <= 1.0)) problems.push_back("run.cfl_safety must lie in (0, 1]");
  if (!problems.empty()) throw ConfigError(problems);

  Model m;
  m.grid = grid;
  m.table = table;
  m.mixing = mixing;
  m.reg = reg;
  m.closure = closure;
  m.time = time;
  if (bd.tau_x.size() == 0) bd.tau_x = Field2D(grid.nx, grid.ny);
  if (bd.tau_y.size() == 0) bd.tau_y = Field2D(grid.nx, grid.ny);
  if (bd.theta_star.size() == 0) bd.theta_star = Field2D(grid.nx, grid.ny);
  m.bd = std::move(bd);
  m.mask = classify_regions(grid, reg.eta);
  m.kernel = make_mollifier_kernel(grid, reg.eta);
  m.p_st = static_pressure(grid, table);
  return m;
}

OceanState make_state(const Grid& grid) {
  OceanState s;
  s.v = VectorField(grid.shape());
  s.theta = ScalarField(grid.shape());
  s.S = ScalarField(grid.shape());
  s.ps = Field2D(grid.nx, grid.ny);
  return s;
}

Diagnostics diagnose(const OceanState& state, const Model& model) {
  Diagnostics d;
  d.rho = density(ThermoState{state.theta, state.S, model.p_st}, model.table);
  d.rho_tilde = mollify(d.rho, model.grid, model.kernel, model.mask);
  d.L = slope(d.rho_tilde, model.grid, model.reg, model.mask);
  if (model.closure == Closure::SmallSlope) {
    d.L = clip_small_slope(d.L, model.reg);
    d.Kiso = assemble_kiso_small(d.L, model.mixing);
  } else {
    d.Kiso = assemble_kiso_full(d.L, model.mixing);
  }
  d.Kgm = assemble_kgm(d.L, model.mixing);
  return d;
}

FaceFlow face_flow(const VectorField& v, const Grid& g) {
  FaceFlow f;
  f.U = ScalarField({g.nx + 1, g.ny, g.nz});
  f.V = ScalarField({g.nx, g.ny + 1, g.nz});
  f.W = ScalarField({g.nx, g.ny, g.nz + 1});
  f.w_surface = Field2D(g.nx, g.ny);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) f.U(i, j, k) = 0.5 * (v.u(i - 1, j, k) + v.u(i, j, k));
  for (int k = 0; k < g.nz; ++k)
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f.V(i, j, k) = 0.5 * (v.v(i, j - 1, k) + v.v(i, j, k));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double w = 0.0;
      for (int k = 0; k < g.nz; ++k) {
        const double div = (f.U(i + 1, j, k) - f.U(i, j, k)) / g.dx + (f.V(i, j + 1, k) - f.V(i, j, k)) / g.dy;
        w -= g.dz * div;
        f.W(i, j, k + 1) = w;
      }
      f.w_surface(i, j) = w;
      f.W(i, j, g.nz) = 0.0;
    }
  }
  return f;
}

ScalarField vertical_velocity(const VectorField& v, const Grid& grid) {
  if (v.shape() != grid.shape()) throw ArgumentError("vertical_velocity: velocity shape does not match grid");
  const FaceFlow f = face_flow(v, grid);
  ScalarField w(grid.shape());
  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const double top = k + 1 == grid.nz ? f.w_surface(i, j) : f.W(i, j, k + 1);
        w(i, j, k) = 0.5 * (f.W(i, j, k) + top);
      }
  return w;
}

ScalarField hydrostatic_pressure(const ScalarField& rho, const Field2D& ps, const Grid& grid,
                                 const EosTable& table) {
  if (rho.shape() != grid.shape() || ps.nx() != grid.nx || ps.ny() != grid.ny)
    throw ArgumentError("hydrostatic_pressure: shape mismatch");
  ScalarField p(grid.shape());
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      double above = 0.0;  // g * int of rho from the top of cell k to the surface
      for (int k = grid.nz - 1; k >= 0; --k) {
        const double half = table.g * rho(i, j, k) * 0.5 * grid.dz;
        p(i, j, k) = ps(i, j) + (above + half);
        above += 2.0 * half;
      }
    }
  }
  return p;
}

ScalarField advect(const ScalarField& C, const FaceFlow& flow, const Grid& g) {
  ScalarField out(g.shape());
  for (int k = 0; k < g.nz; ++k) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double c = C(i, j, k);
        const double ce = i + 1 < g.nx ? 0.5 * (c + C(i + 1, j, k)) : c;
        const double cw = i > 0 ? 0.5 * (c + C(i - 1, j, k)) : c;
        const double cn = j + 1 < g.ny ? 0.5 * (c + C(i, j + 1, k)) : c;
        const double cs = j > 0 ? 0.5 * (c + C(i, j - 1, k)) : c;
        const double ct = k + 1 < g.nz ? 0.5 * (c + C(i, j, k + 1)) : c;
        const double cb = k > 0 ? 0.5 * (c + C(i, j, k - 1)) : c;
        out(i, j, k) = (flow.U(i + 1, j, k) * ce - flow.U(i, j, k) * cw) / g.dx +
                       (flow.V(i, j + 1, k) * cn - flow.V(i, j, k) * cs) / g.dy +
                       (flow.W(i, j, k + 1) * ct - flow.W(i, j, k) * cb) / g.dz;
      }
    }
  }
  return out;
}

namespace {

// nu_h (d_xx + d_yy) q + nu_v d_zz q with ghost cells: q is the normal
// component at the walls of `normal_axis` (ghost -q), tangential elsewhere
// (ghost q); surface ghost q + dz h tau, bottom ghost q.
ScalarField viscosity(const ScalarField& q, int normal_axis, const Field2D& tau, const Model& m) {
  const Grid& g = m.grid;
  const double nu_h = 1.0 / m.bd.Re1;
  const double nu_v = 1.0 / m.bd.Re2;
  ScalarField out(g.shape());
  for (int k = 0; k < g.nz; ++k) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double c = q(i, j, k);
        const double sx = normal_axis == 0 ? -c : c;
        const double sy = normal_axis == 1 ? -c : c;
        const double e = i + 1 < g.nx ? q(i + 1, j, k) : sx;
        const double w = i > 0 ? q(i - 1, j, k) : sx;
        const double n = j + 1 < g.ny ? q(i, j + 1, k) : sy;
        const double s = j > 0 ? q(i, j - 1, k) : sy;
        const double t = k + 1 < g.nz ? q(i, j, k + 1) : c + g.dz * g.h * tau(i, j);
        const double b = k > 0 ? q(i, j, k - 1) : c;
        out(i, j, k) = nu_h * ((e - 2.0 * c + w) / (g.dx * g.dx) + (n - 2.0 * c + s) / (g.dy * g.dy)) +
                       nu_v * (t - 2.0 * c + b) / (g.dz * g.dz);
      }
    }
  }
  return out;
}

std::string cell_label(const Shape& s, std::size_t n) {
  std::ostringstream os;
  os << "(" << n % s.nx << ", " << (n / s.nx) % s.ny << ", " << n / s.columns() << ")";
  return os.str();
}

}  // namespace

VectorField momentum_rhs(const OceanState& state, const Diagnostics& diag, const FaceFlow& flow,
                         const Model& model) {
  const Grid& g = model.grid;
  VectorField rhs(g.shape());
  const ScalarField p = hydrostatic_pressure(diag.rho, Field2D(g.nx, g.ny), g, model.table);
  const ScalarField adv_u = advect(state.v.u, flow, g);
  const ScalarField adv_v = advect(state.v.v, flow, g);
  const ScalarField visc_u = viscosity(state.v.u, 0, model.bd.tau_x, model);
  const ScalarField visc_v = viscosity(state.v.v, 1, model.bd.tau_y, model);
  const double inv_rho0 = 1.0 / model.table.rho0;
  const double f = model.bd.f;
  for (int k = 0; k < g.nz; ++k) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t n = g.shape().index(i, j, k);
        const double px = (p(i + 1 < g.nx ? i + 1 : i, j, k) - p(i > 0 ? i - 1 : i, j, k)) / (2.0 * g.dx);
        const double py = (p(i, j + 1 < g.ny ? j + 1 : j, k) - p(i, j > 0 ? j - 1 : j, k)) / (2.0 * g.dy);
        rhs.u[n] = -adv_u[n] - inv_rho0 * px + f * state.v.v[n] + visc_u[n];
        rhs.v[n] = -adv_v[n] - inv_rho0 * py - f * state.v.u[n] + visc_v[n];
      }
    }
  }
  return rhs;
}

BoundarySpec tracer_bc(Tracer which, const Model& model) {
  if (which == Tracer::Salinity) return BoundarySpec::neumann_zero();
  const auto ts = model.bd.theta_star.values();
  return BoundarySpec::surface_robin(model.bd.k_theta, std::vector<double>(ts.begin(), ts.end()));
}

ScalarField tracer_rhs(const OceanState& state, Tracer which, const Diagnostics& diag, const FaceFlow& flow,
                       const Model& model) {
  const ScalarField& C = which == Tracer::Theta ? state.theta : state.S;
  const Grid& g = model.grid;
  ScalarField rhs = advect(C, flow, g);
  rhs += apply_eddy_operator(diag.Kiso, C, g, tracer_bc(which, model));
  rhs -= apply_eddy_operator(diag.Kgm, C, g, BoundarySpec::neumann_zero());
  rhs *= -1.0;
  return rhs;
}

namespace {

double dot_vol(const ScalarField& a, const ScalarField& b, const Grid& g) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
  return s * g.cell_volume();
}

double robin_term(const ScalarField& theta, const Model& m) {
  const Grid& g = m.grid;
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double th = theta(i, j, g.nz - 1);
      s += th * (th - m.bd.theta_star(i, j));
    }
  return m.bd.k_theta * s * g.dx * g.dy;
}

BudgetRecord record(const OceanState& s, const Diagnostics& d, const ScalarField& r_theta, const ScalarField& r_s,
                    const Model& m) {
  const Grid& g = m.grid;
  BudgetRecord b;
  b.t = s.t;
  b.ke = 0.5 * (dot_vol(s.v.u, s.v.u, g) + dot_vol(s.v.v, s.v.v, g));
  b.theta_l2 = l2_norm(s.theta, g);
  b.s_l2 = l2_norm(s.S, g);
  b.theta_min = s.theta.min();
  b.theta_max = s.theta.max();
  b.s_min = s.S.min();
  b.s_max = s.S.max();
  b.s_mean = mean(s.S, g);

  const double e_theta = triad_energy(s.theta, g, d.Kiso);
  const double e_s = triad_energy(s.S, g, d.Kiso);
  b.iso_dissipation = e_theta + e_s;
  const BoundarySpec zero = BoundarySpec::neumann_zero();
  b.gm_variance = dot_vol(s.theta, apply_eddy_operator(d.Kgm, s.theta, g, zero), g) +
                  dot_vol(s.S, apply_eddy_operator(d.Kgm, s.S, g, zero), g);
  b.robin_term = robin_term(s.theta, m);

  // Variance identity per tracer: (1/2) d/dt |C|^2 + int grad C.K grad C + surface term = 0,
  // with the time derivative taken from the same right-hand side the integrator uses.
  const double dt_theta = dot_vol(s.theta, r_theta, g);
  const double dt_s = dot_vol(s.S, r_s, g);
  const double defect = (dt_theta + e_theta + b.robin_term) + (dt_s + e_s);
  const double scale = std::abs(dt_theta) + e_theta + std::abs(b.robin_term) + std::abs(dt_s) + e_s;
  b.energy_residual = scale > 0.0 ? std::abs(defect) / scale : 0.0;
  return b;
}

double cfl_from(const OceanState& s, const Diagnostics& d, const FaceFlow& flow, const Model& m) {
  const Grid& g = m.grid;
  const double h = g.min_spacing();
  double vmax = 0.0;
  for (std::size_t n = 0; n < s.v.u.size(); ++n) vmax = std::max({vmax, std::abs(s.v.u[n]), std::abs(s.v.v[n])});
  for (double w : flow.W.values()) vmax = std::max(vmax, std::abs(w));

  const double lmax = d.L.max_magnitude();
  const MixingParams& p = m.mixing;
  double mk = m.closure == Closure::Full ? std::max(p.K_I, p.K_D)
                                         : p.K_I * (1.0 + lmax + lmax * lmax) + p.K_D;
  mk += p.kappa * lmax;
  const double nu = std::max(1.0 / m.bd.Re1, 1.0 / m.bd.Re2);

  double dt = m.time.dt_max;
  double bound = h * h / (2.0 * 3.0 * std::max(mk, nu));
  if (vmax > 0.0) bound = std::min(bound, h / vmax);
  if (m.bd.f != 0.0) bound = std::min(bound, 1.0 / std::abs(m.bd.f));
  return std::min(dt, m.time.safety * bound);
}

void check_finite(const OceanState& s, double t, int stage) {
  auto first_bad = [](const ScalarField& f) -> long {
    for (std::size_t n = 0; n < f.size(); ++n)
      if (!std::isfinite(f[n])) return static_cast<long>(n);
    return -1;
  };
  const std::pair<const char*, const ScalarField*> fields[] = {
      {"u", &s.v.u}, {"v", &s.v.v}, {"theta", &s.theta}, {"S", &s.S}};
  for (const auto& [name, f] : fields) {
    const long n = first_bad(*f);
    if (n >= 0)
      throw IntegrationAborted(std::string("non-finite ") + name + " at cell " +
                                   cell_label(f->shape(), static_cast<std::size_t>(n)) + " in stage " +
                                   std::to_string(stage),
                               t, stage);
  }
}

void project(OceanState& s, double dt, const Model& m) {
  if (m.frozen_velocity) return;
  SolveOptions opt;
  opt.rtol = 1e-13;
  opt.atol = 1e-300;
  opt.maxit = 20000;
  SurfacePressure sp = solve_surface_pressure(s.v, m.grid, dt, opt);
  apply_surface_pressure(s.v, sp.ps, m.grid, dt);
  s.ps = std::move(sp.ps);
}

struct Tendency {
  VectorField v;
  ScalarField theta;
  ScalarField S;
};

Tendency tendency(const OceanState& s, const Diagnostics& d, const FaceFlow& flow, const Model& m) {
  Tendency r;
  if (m.frozen_velocity)
    r.v = VectorField(m.grid.shape());
  else
    r.v = momentum_rhs(s, d, flow, m);
  r.theta = tracer_rhs(s, Tracer::Theta, d, flow, m);
  r.S = tracer_rhs(s, Tracer::Salinity, d, flow, m);
  return r;
}

// out = a * x + b * (y + dt * r), fieldwise.
void combine(ScalarField& out, double a, const ScalarField& x, double b, const ScalarField& y, double dt,
             const ScalarField& r) {
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = a * x[n] + b * (y[n] + dt * r[n]);
}

OceanState stage(const OceanState& base, double a, const OceanState& cur, double b, double dt, const Tendency& r,
                 const Model& m) {
  OceanState next = cur;
  combine(next.theta, a, base.theta, b, cur.theta, dt, r.theta);
  combine(next.S, a, base.S, b, cur.S, dt, r.S);
  if (!m.frozen_velocity) {
    combine(next.v.u, a, base.v.u, b, cur.v.u, dt, r.v.u);
    combine(next.v.v, a, base.v.v, b, cur.v.v, dt, r.v.v);
  }
  return next;
}

}  // namespace

BudgetRecord budgets(const OceanState& state, const Model& model) {
  const Diagnostics d = diagnose(state, model);
  const FaceFlow flow = face_flow(state.v, model.grid);
  return record(state, d, tracer_rhs(state, Tracer::Theta, d, flow, model),
                tracer_rhs(state, Tracer::Salinity, d, flow, model), model);
}

double cfl_dt(const OceanState& state, const Model& model) {
  const Diagnostics d = diagnose(state, model);
  return cfl_from(state, d, face_flow(state.v, model.grid), model);
}

namespace {

// dt <= 0 requests the stability limit itself.
StepResult step_impl(const OceanState& s0, double dt, const Model& m) {
  check_finite(s0, s0.t, 0);

  const Diagnostics d0 = diagnose(s0, m);
  const FaceFlow f0 = face_flow(s0.v, m.grid);
  const double limit = cfl_from(s0, d0, f0, m);
  if (dt <= 0.0) dt = limit;
  if (dt > limit * (1.0 + 1e-12))
    throw ArgumentError("step: dt = " + std::to_string(dt) + " exceeds the stability limit " +
                        std::to_string(limit));

  const Tendency r0 = tendency(s0, d0, f0, m);
  StepResult out;
  out.budget = record(s0, d0, r0.theta, r0.S, m);

  OceanState s1 = stage(s0, 0.0, s0, 1.0, dt, r0, m);
  check_finite(s1, s0.t, 1);
  project(s1, dt, m);

  const Diagnostics d1 = diagnose(s1, m);
  const Tendency r1 = tendency(s1, d1, face_flow(s1.v, m.grid), m);
  OceanState s2 = stage(s0, 0.75, s1, 0.25, dt, r1, m);
  check_finite(s2, s0.t, 2);
  project(s2, dt, m);

  const Diagnostics d2 = diagnose(s2, m);
  const Tendency r2 = tendency(s2, d2, face_flow(s2.v, m.grid), m);
  OceanState s3 = stage(s0, 1.0 / 3.0, s2, 2.0 / 3.0, dt, r2, m);
  check_finite(s3, s0.t, 3);
  project(s3, dt, m);

  s3.t = s0.t + dt;
  out.state = std::move(s3);
  return out;
}

}  // namespace

StepResult step(const OceanState& state, double dt, const Model& model) {
  if (!(dt > 0.0)) throw ArgumentError("step: dt must be positive");
  return step_impl(state, dt, model);
}

StepResult step_adaptive(const OceanState& state, const Model& model) { return step_impl(state, 0.0, model); }

}  // namespace gmr
