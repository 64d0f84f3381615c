#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gmr/dynamics.hpp"
#include "gmr/elliptic.hpp"
#include "gmr/errors.hpp"

using namespace gmr;

namespace {

const double pi = std::acos(-1.0);

struct Options {
  int n = 12;
  double eta = 200.0;
  double s0 = 5e-4;
  double k_theta = 0.0;
  double f = 1e-4;
  Closure closure = Closure::Full;
};

Model test_model(const Options& o = {}) {
  const Grid g = make_grid({o.n, o.n, o.n, 1000.0, 1000.0, 1000.0});
  RegularizationParams reg;
  reg.eta = o.eta;
  reg.s0 = o.s0;
  reg.eps0 = 0.5 * o.s0;
  BoundaryData bd;
  bd.k_theta = o.k_theta;
  bd.f = o.f;
  bd.theta_star = Field2D(g.nx, g.ny, 10.0);
  return make_model(g, default_eos_table(), MixingParams{}, reg, o.closure, bd);
}

OceanState uniform_state(const Model& m, double theta, double s) {
  OceanState st = make_state(m.grid);
  st.theta.fill(theta);
  st.S.fill(s);
  return st;
}

// Stratified state with a front in y and a little seeded noise.
OceanState front_state(const Model& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  OceanState st = make_state(m.grid);
  const Grid& g = m.grid;
  st.theta = sample(g, [&](double, double y, double z) {
    return 16.0 + 12.0 * z / g.h + 0.5 * std::tanh((y - 0.5 * g.Ly) / 200.0);
  });
  for (double& x : st.theta.values()) x += u(rng);
  st.S = sample(g, [&](double, double, double z) { return 34.5 - 0.5 * z / g.h; });
  return st;
}

double max_abs(const ScalarField& f) { return std::max(f.max(), -f.min()); }

}  // namespace

TEST_CASE("boundary data validation lists all problems") {
  const Grid g = make_grid({12, 12, 12, 1000.0, 1000.0, 1000.0});
  BoundaryData bd;
  bd.k_theta = -1.0;
  bd.Re1 = 0.0;
  bd.tau_x = Field2D(3, 3);
  try {
    bd.validate(g);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() == 3);
  }
}

TEST_CASE("vertical velocity") {
  const Grid g = make_grid({10, 8, 6, 1000.0, 800.0, 600.0});
  SUBCASE("zero for v = 0") {
    const ScalarField w = vertical_velocity(VectorField(g.shape()), g);
    CHECK(max_abs(w) == 0.0);
  }
  SUBCASE("zero for flow along the walls that is uniform across them") {
    VectorField v(g.shape());
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.u(i, j, k) = std::sin(pi * g.y[j] / g.Ly) * (i == 0 || i + 1 == g.nx ? 0.0 : 1.0);
    // Only the columns next to the east and west walls see a flux jump.
    const ScalarField w = vertical_velocity(v, g);
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 2; i + 2 < g.nx; ++i) CHECK(w(i, j, k) == 0.0);
  }
  SUBCASE("vanishes at the bottom face, and at the surface after projection") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorField v(g.shape());
    for (std::size_t n = 0; n < v.u.size(); ++n) {
      v.u[n] = u(rng);
      v.v[n] = u(rng);
    }
    const FaceFlow before = face_flow(v, g);
    double w0 = 0.0;
    for (double x : before.w_surface.values()) w0 = std::max(w0, std::abs(x));
    CHECK(w0 > 1e-3);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) CHECK(before.W(i, j, 0) == 0.0);

    SolveOptions opt;
    opt.rtol = 1e-13;
    opt.maxit = 20000;
    const SurfacePressure sp = solve_surface_pressure(v, g, 1.0, opt);
    apply_surface_pressure(v, sp.ps, g, 1.0);
    const FaceFlow after = face_flow(v, g);
    double w1 = 0.0;
    for (double x : after.w_surface.values()) w1 = std::max(w1, std::abs(x));
    CHECK(w1 <= 1e-10 * w0);
  }
}

TEST_CASE("hydrostatic pressure") {
  const Grid g = make_grid({4, 3, 8, 400.0, 300.0, 800.0});
  const EosTable t = default_eos_table();
  const ScalarField rho(g.shape(), 1025.0);
  const ScalarField p = hydrostatic_pressure(rho, Field2D(g.nx, g.ny), g, t);
  for (int k = 0; k < g.nz; ++k) CHECK(p(1, 1, k) == doctest::Approx(-t.g * 1025.0 * g.z[k]).epsilon(1e-14));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(1020.0, 1030.0);
  ScalarField r(g.shape());
  for (double& x : r.values()) x = u(rng);
  const ScalarField q = hydrostatic_pressure(r, Field2D(g.nx, g.ny), g, t);
  for (int k = 0; k + 1 < g.nz; ++k) {
    // Face-centred balance: (p_k+1 - p_k)/dz = -g (rho_k + rho_k+1)/2
    const double dpdz = (q(2, 1, k + 1) - q(2, 1, k)) / g.dz;
    CHECK(dpdz == doctest::Approx(-t.g * 0.5 * (r(2, 1, k) + r(2, 1, k + 1))).epsilon(1e-12));
  }
  const ScalarField shifted = hydrostatic_pressure(r, Field2D(g.nx, g.ny, 123.0), g, t);
  for (std::size_t n = 0; n < q.size(); ++n) CHECK(shifted[n] - q[n] == doctest::Approx(123.0).epsilon(1e-9));
}

TEST_CASE("momentum tendency at rest with uniform tracers is zero") {
  const Model m = test_model();
  const OceanState st = uniform_state(m, 10.0, 35.0);
  const VectorField r = momentum_rhs(st, diagnose(st, m), face_flow(st.v, m.grid), m);
  CHECK(max_abs(r.u) == 0.0);
  CHECK(max_abs(r.v) == 0.0);
}

TEST_CASE("uniform flow only feels rotation away from the walls") {
  const Model m = test_model();
  OceanState st = uniform_state(m, 10.0, 35.0);
  const double V = 0.05;
  st.v.u.fill(V);
  const VectorField r = momentum_rhs(st, diagnose(st, m), face_flow(st.v, m.grid), m);
  const Grid& g = m.grid;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i + 1 < g.nx; ++i) {
        CHECK(r.u(i, j, k) == doctest::Approx(0.0).epsilon(1e-15).scale(1e-12));
        CHECK(r.v(i, j, k) == doctest::Approx(-m.bd.f * V).epsilon(1e-12));
      }
}

TEST_CASE("manufactured viscous-Coriolis momentum tendency converges at second order") {
  // Amplitude is small enough that the quadratic advection terms are invisible.
  const double A = 1e-6;
  double prev = 0.0;
  for (int n : {12, 24, 48}) {
    Options o;
    o.n = n;
    o.eta = 200.0;
    const Model m = test_model(o);
    const Grid& g = m.grid;
    const double kx = pi / g.Lx, ky = pi / g.Ly, kz = pi / g.h;
    OceanState st = uniform_state(m, 10.0, 35.0);
    st.v.u = sample(g, [&](double x, double y, double z) { return A * std::sin(kx * x) * std::cos(ky * y) * std::cos(kz * z); });
    st.v.v = sample(g, [&](double x, double y, double z) { return A * std::cos(kx * x) * std::sin(ky * y) * std::cos(kz * z); });
    const VectorField r = momentum_rhs(st, diagnose(st, m), face_flow(st.v, g), m);
    const double decay = (kx * kx + ky * ky) / m.bd.Re1 + kz * kz / m.bd.Re2;
    double err = 0.0;
    for (std::size_t q = 0; q < g.cells(); ++q) {
      const double eu = -decay * st.v.u[q] + m.bd.f * st.v.v[q];
      const double ev = -decay * st.v.v[q] - m.bd.f * st.v.u[q];
      err = std::max({err, std::abs(r.u[q] - eu), std::abs(r.v[q] - ev)});
    }
    err /= decay * A;
    CHECK(err < 8e-3);
    if (prev > 0.0) CHECK(prev / err >= 3.5);
    prev = err;
  }
}

TEST_CASE("tracer tendency examples") {
  SUBCASE("uniform tracer equal to the restoring value, at rest") {
    Options o;
    o.k_theta = 1e-3;
    const Model m = test_model(o);
    const OceanState st = uniform_state(m, 10.0, 35.0);
    const Diagnostics d = diagnose(st, m);
    const FaceFlow f = face_flow(st.v, m.grid);
    CHECK(max_abs(tracer_rhs(st, Tracer::Theta, d, f, m)) == 0.0);
    CHECK(max_abs(tracer_rhs(st, Tracer::Salinity, d, f, m)) == 0.0);
  }
  SUBCASE("linear vertical profile without slopes has zero interior tendency") {
    Options o;
    o.s0 = 1.0;  // taper removes every slope
    const Model m = test_model(o);
    OceanState st = uniform_state(m, 10.0, 35.0);
    st.theta = sample(m.grid, [](double, double, double z) { return 16.0 + 0.01 * z; });
    const Diagnostics d = diagnose(st, m);
    CHECK(d.L.max_magnitude() == 0.0);
    const ScalarField r = tracer_rhs(st, Tracer::Theta, d, face_flow(st.v, m.grid), m);
    for (int k = 1; k + 1 < m.grid.nz; ++k)
      for (int j = 0; j < m.grid.ny; ++j)
        for (int i = 0; i < m.grid.nx; ++i) CHECK(std::abs(r(i, j, k)) <= 1e-15);
  }
}

TEST_CASE("budgets of a random stratified state") {
  const Model m = test_model();
  const OceanState st = front_state(m, 3);
  const Diagnostics d = diagnose(st, m);
  REQUIRE(d.L.max_magnitude() > 0.0);
  const BudgetRecord b = budgets(st, m);
  CHECK(std::abs(b.gm_variance) <= 1e-12 * m.mixing.kappa * (triad_gradient_energy(st.theta, m.grid) +
                                                             triad_gradient_energy(st.S, m.grid)));
  const double grad2 = triad_gradient_energy(st.theta, m.grid) + triad_gradient_energy(st.S, m.grid);
  CHECK(b.iso_dissipation >= m.mixing.K_D * grad2 * (1.0 - 1e-12));
  CHECK(b.iso_dissipation <= m.mixing.K_I * grad2 * (1.0 + 1e-12));
  CHECK(b.energy_residual <= 1e-12);
  CHECK(b.s_mean == doctest::Approx(mean(st.S, m.grid)));
}

TEST_CASE("equilibrium state is unchanged over 100 steps") {
  const Model m = test_model();
  OceanState st = uniform_state(m, 10.0, 35.0);
  const OceanState start = st;
  for (int n = 0; n < 100; ++n) {
    StepResult r = step_adaptive(st, m);
    CHECK(r.budget.iso_dissipation == 0.0);
    CHECK(r.budget.energy_residual == 0.0);
    st = std::move(r.state);
  }
  CHECK(st.theta == start.theta);
  CHECK(st.S == start.S);
  CHECK(max_abs(st.v.u) == 0.0);
  CHECK(max_abs(st.v.v) == 0.0);
  CHECK(st.t > 0.0);
}

TEST_CASE("pure diffusion decays the temperature norm monotonically") {
  Options o;
  o.s0 = 1.0;
  Model m = test_model(o);
  m.frozen_velocity = true;
  OceanState st = front_state(m, 4);
  double prev = l2_norm(st.theta, m.grid);
  const double mean0 = mean(st.theta, m.grid);
  for (int n = 0; n < 40; ++n) {
    st = step_adaptive(st, m).state;
    CHECK(mean(st.theta, m.grid) == doctest::Approx(mean0).epsilon(1e-13));
    const double now = l2_norm(st.theta, m.grid);
    CHECK(now <= prev);
    prev = now;
  }
}

TEST_CASE("a stratified run conserves salt and stays in range") {
  const Model m = test_model();
  OceanState st = front_state(m, 5);
  const double s_mean = mean(st.S, m.grid);
  const double s_norm = l2_norm(st.S, m.grid) / std::sqrt(1e9);
  const double tlo = st.theta.min(), thi = st.theta.max();
  for (int n = 0; n < 20; ++n) {
    const StepResult r = step_adaptive(st, m);
    CHECK(r.budget.energy_residual <= 1e-8);
    st = r.state;
    CHECK(std::abs(mean(st.S, m.grid) - s_mean) <= 1e-12 * s_norm);
    CHECK(st.theta.min() >= tlo - 1e-3 * (thi - tlo));
    CHECK(st.theta.max() <= thi + 1e-3 * (thi - tlo));
  }
  CHECK(max_abs(st.v.u) > 0.0);  // the front spins up a flow
}

TEST_CASE("CFL step") {
  Options o;
  o.f = 0.0;
  const Model m = test_model(o);
  const OceanState st = uniform_state(m, 10.0, 35.0);
  const double dt = cfl_dt(st, m);
  const double h = m.grid.min_spacing();
  const double diffusive = 0.5 * h * h / (6.0 * std::max(m.mixing.K_I, 1.0 / m.bd.Re1));
  CHECK(dt == doctest::Approx(diffusive).epsilon(1e-14));

  o.n = 24;
  o.eta = 100.0;
  const Model fine = test_model(o);
  CHECK(cfl_dt(uniform_state(fine, 10.0, 35.0), fine) == doctest::Approx(0.25 * dt).epsilon(1e-14));

  Model capped = m;
  capped.time.dt_max = 0.1 * dt;
  CHECK(cfl_dt(st, capped) == 0.1 * dt);

  CHECK_THROWS_AS(step(st, 2.0 * dt, m), ArgumentError);
  CHECK_THROWS_AS(step(st, -1.0, m), ArgumentError);
  CHECK_NOTHROW(step(st, dt, m));
}

TEST_CASE("non-finite state aborts the integration") {
  const Model m = test_model();
  OceanState st = uniform_state(m, 10.0, 35.0);
  st.t = 42.0;
  st.v.u[5] = std::numeric_limits<double>::quiet_NaN();
  try {
    step(st, 1e-3, m);
    FAIL("expected IntegrationAborted");
  } catch (const IntegrationAborted& e) {
    CHECK(e.time() == 42.0);
    CHECK(e.stage() == 0);
    CHECK(std::string(e.what()).find("u") != std::string::npos);
  }
}

TEST_CASE("small-slope closure with r = 0 matches the full closure with tapered slopes") {
  Options full;
  full.s0 = 1.0;  // slopes tapered to zero
  Options small;
  small.closure = Closure::SmallSlope;
  Model ms = test_model(small);
  ms.reg.r = 0.0;  // every slope clipped
  const Model mf = test_model(full);
  OceanState a = front_state(mf, 6), b = a;
  for (int n = 0; n < 10; ++n) {
    const double dt = std::min(cfl_dt(a, mf), cfl_dt(b, ms));
    a = step(a, dt, mf).state;
    b = step(b, dt, ms).state;
  }
  ScalarField d = a.theta;
  d -= b.theta;
  CHECK(l2_norm(d, mf.grid) <= 1e-12 * l2_norm(a.theta, mf.grid));
}
