#include "gmr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>

#include "gmr/config.hpp"
#include "gmr/dynamics.hpp"
#include "gmr/eddy.hpp"
#include "gmr/elliptic.hpp"
#include "gmr/eos.hpp"
#include "gmr/errors.hpp"

namespace gmr {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

CheckRow row(const std::string& suite, const std::string& name, double measured, double threshold) {
  return {suite, name, measured, threshold, measured <= threshold};
}

SlopeField random_slopes(const Shape& s, Rng& rng, double scale) {
  SlopeField L(s);
  for (std::size_t n = 0; n < s.size(); ++n) {
    L.Lx[n] = uniform(rng, -scale, scale);
    L.Ly[n] = uniform(rng, -scale, scale);
  }
  return L;
}

// Smooth random field: a few separable cosine modes with random amplitudes and phases.
ScalarField smooth_field(const Grid& g, Rng& rng, int modes = 4) {
  ScalarField f(g.shape());
  const double pi = std::acos(-1.0);
  for (int m = 0; m < modes; ++m) {
    const double a = uniform(rng, -1.0, 1.0);
    const double kx = std::floor(uniform(rng, 1.0, 4.0)) * pi / g.Lx;
    const double ky = std::floor(uniform(rng, 1.0, 4.0)) * pi / g.Ly;
    const double kz = std::floor(uniform(rng, 1.0, 4.0)) * pi / g.h;
    const double px = uniform(rng, 0.0, 2.0 * pi), py = uniform(rng, 0.0, 2.0 * pi), pz = uniform(rng, 0.0, 2.0 * pi);
    f += sample(g, [&](double x, double y, double z) {
      return a * std::cos(kx * x + px) * std::cos(ky * y + py) * std::cos(kz * z + pz);
    });
  }
  return f;
}

ScalarField random_field(const Shape& s, Rng& rng) {
  ScalarField f(s);
  for (double& x : f.values()) x = uniform(rng, -1.0, 1.0);
  return f;
}

std::vector<CheckRow> ellipticity(Rng& rng) {
  const std::string suite = "ellipticity";
  std::vector<CheckRow> rows;
  MixingParams p;
  p.K_I = 1.0e3;
  p.K_D = 1.0e-1;
  const double mu = std::min(p.K_I, p.K_D), M = std::max(p.K_I, p.K_D);
  const Shape s{10, 10, 100};  // 1e4 cells
  SlopeField L = random_slopes(s, rng, 1.0);
  for (std::size_t n = 0; n < s.size(); n += 10) {  // a tenth with steep slopes
    L.Lx[n] *= 50.0;
    L.Ly[n] *= 50.0;
  }
  const SymTensorField K = assemble_kiso_full(L, p);
  double below = 0.0, above = 0.0;
  for (const Sym3& t : K.cells) {
    Eigen::Matrix3d m;
    m << t.k11, t.k12, t.k13, t.k12, t.k22, t.k23, t.k13, t.k23, t.k33;
    const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m, Eigen::EigenvaluesOnly).eigenvalues();
    below = std::max(below, mu - ev.minCoeff());
    above = std::max(above, ev.maxCoeff() - M);
  }
  rows.push_back(row(suite, "full tensor: lowest eigenvalue deficit below min(K_I,K_D)", below / M, 1e-10));
  rows.push_back(row(suite, "full tensor: largest eigenvalue excess over max(K_I,K_D)", above / M, 1e-10));

  // Small-slope form: positive semidefinite for |L| < r.
  const double r = 0.1;
  SlopeField Ls = random_slopes(s, rng, r / std::sqrt(2.0));
  const SymTensorField Ks = assemble_kiso_small(clip_small_slope(Ls, RegularizationParams{125.0, 5e-4, 2.5e-4, r}), p);
  double negative = 0.0;
  for (const Sym3& t : Ks.cells) {
    Eigen::Matrix3d m;
    m << t.k11, t.k12, t.k13, t.k12, t.k22, t.k23, t.k13, t.k23, t.k33;
    const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m, Eigen::EigenvaluesOnly).eigenvalues();
    negative = std::max(negative, -ev.minCoeff());
  }
  rows.push_back(row(suite, "small-slope tensor: most negative eigenvalue / K_I", negative / p.K_I, 1e-12));
  return rows;
}

std::vector<CheckRow> skewness(Rng& rng) {
  const std::string suite = "skewness";
  const Grid g = make_grid({32, 32, 32, 1000.0, 1000.0, 1000.0});
  MixingParams p;
  const BoundarySpec bc = BoundarySpec::neumann_zero();
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const SkewTensorField K = assemble_kgm(random_slopes(g.shape(), rng, 1.0), p);
    const ScalarField C = random_field(g.shape(), rng);
    const ScalarField D = apply_eddy_operator(K, C, g, bc);
    double s = 0.0;
    for (std::size_t n = 0; n < C.size(); ++n) s += C[n] * D[n];
    s *= g.cell_volume();
    worst = std::max(worst, std::abs(s) / (p.kappa * triad_gradient_energy(C, g)));
  }
  return {row(suite, "max |int D_GM(C) C| / (kappa |grad C|^2), 10 random fields", worst, 1e-12)};
}

struct ShortRun {
  std::vector<BudgetRecord> budgets;
  OceanState initial;
  OceanState final_state;
  double mean_s0 = 0.0;
  double s_norm0 = 0.0;
};

ShortRun short_run(int steps) {
  SimConfig c;
  c.grid = {16, 16, 16, 1000.0, 1000.0, 1000.0};
  c.reg.eta = 200.0;
  c.boundary.k_theta = 0.0;
  Setup s = build_setup(c);
  ShortRun out;
  out.initial = s.initial;
  OceanState st = s.initial;
  for (int n = 0; n < steps; ++n) {
    StepResult r = step_adaptive(st, s.model);
    out.budgets.push_back(r.budget);
    st = std::move(r.state);
  }
  out.budgets.push_back(budgets(st, s.model));
  out.final_state = std::move(st);
  out.mean_s0 = mean(out.initial.S, s.model.grid);
  out.s_norm0 = l2_norm(out.initial.S, s.model.grid) / std::sqrt(s.model.grid.Lx * s.model.grid.Ly * s.model.grid.h);
  return out;
}

std::vector<CheckRow> bounds() {
  const std::string suite = "bounds";
  const ShortRun run = short_run(60);
  const auto& b0 = run.budgets.front();
  const double tw = 1e-3 * (b0.theta_max - b0.theta_min);
  const double sw = 1e-3 * (b0.s_max - b0.s_min);
  double theta_excess = 0.0, s_excess = 0.0, mean_drift = 0.0;
  for (const auto& b : run.budgets) {
    theta_excess = std::max({theta_excess, b0.theta_min - b.theta_min, b.theta_max - b0.theta_max});
    s_excess = std::max({s_excess, b0.s_min - b.s_min, b.s_max - b0.s_max});
    mean_drift = std::max(mean_drift, std::abs(b.s_mean - run.mean_s0) / run.s_norm0);
  }
  return {row(suite, "theta range excess / (1e-3 initial width)", theta_excess / tw, 1.0),
          row(suite, "S range excess / (1e-3 initial width)", s_excess / sw, 1.0),
          row(suite, "relative drift of mean(S)", mean_drift, 1e-12)};
}

std::vector<CheckRow> energy() {
  const std::string suite = "energy";
  const ShortRun run = short_run(60);
  double residual = 0.0, gm = 0.0, theta_rise = 0.0, s_rise = 0.0;
  for (std::size_t n = 0; n < run.budgets.size(); ++n) {
    const auto& b = run.budgets[n];
    residual = std::max(residual, b.energy_residual);
    gm = std::max(gm, std::abs(b.gm_variance) / std::max(b.iso_dissipation, 1e-300));
    if (n > 0) {
      theta_rise = std::max(theta_rise, (b.theta_l2 - run.budgets[n - 1].theta_l2) / run.budgets[n - 1].theta_l2);
      s_rise = std::max(s_rise, (b.s_l2 - run.budgets[n - 1].s_l2) / run.budgets[n - 1].s_l2);
    }
  }
  return {row(suite, "max relative tracer variance identity residual", residual, 1e-8),
          row(suite, "max |GM variance| / iso dissipation", gm, 1e-10),
          row(suite, "max relative step increase of |theta|_2", theta_rise, 1e-14),
          row(suite, "max relative step increase of |S|_2", s_rise, 1e-14)};
}

std::vector<CheckRow> slopes(Rng& rng) {
  const std::string suite = "slopes";
  std::vector<CheckRow> rows;
  SimConfig c;
  c.grid = {16, 16, 16, 1000.0, 1000.0, 1000.0};
  c.reg.eta = 200.0;
  const Setup s = build_setup(c);
  const Diagnostics d = diagnose(s.initial, s.model);
  const Grid& g = s.model.grid;
  double band = 0.0;
  bool finite = true;
  for (std::size_t n = 0; n < g.cells(); ++n) {
    if (g.boundary_distance[n] <= s.model.reg.eta) band = std::max(band, std::hypot(d.L.Lx[n], d.L.Ly[n]));
    finite = finite && std::isfinite(d.L.Lx[n]) && std::isfinite(d.L.Ly[n]);
  }
  rows.push_back(row(suite, "max |L| within eta of the boundary", band, 0.0));
  rows.push_back(row(suite, "non-finite slope cells", finite ? 0.0 : 1.0, 0.0));

  // Unstratified density: every slope is cut by the taper.
  const ScalarField flat(g.shape(), 1027.0);
  const SlopeField Lf = slope(mollify(flat, g, s.model.kernel, s.model.mask), g, s.model.reg, s.model.mask);
  rows.push_back(row(suite, "max |L| for constant density", Lf.max_magnitude(), 0.0));

  // Bolus velocity: divergence-free where the centred stencils commute, zero outside Omega_{0,1}.
  const Grid gb = make_grid({24, 24, 24, 1000.0, 1000.0, 1000.0});
  const RegionMask mask = classify_regions(gb, 125.0);
  SlopeField L(gb.shape());
  L.Lx = smooth_field(gb, rng);
  L.Ly = smooth_field(gb, rng);
  MixingParams p;
  const BolusVelocity bv = bolus_velocity(L, p, gb, mask);
  const BoundarySpec nz = BoundarySpec::neumann_zero();
  const ScalarField ux = diff(bv.vstar.u, Axis::X, gb, nz);
  const ScalarField vy = diff(bv.vstar.v, Axis::Y, gb, nz);
  const ScalarField wz = diff(bv.wstar, Axis::Z, gb, nz);
  double div = 0.0, scale = 0.0, outside = 0.0;
  for (int k = 0; k < gb.nz; ++k)
    for (int j = 0; j < gb.ny; ++j)
      for (int i = 0; i < gb.nx; ++i) {
        const std::size_t n = gb.shape().index(i, j, k);
        if (!mask.in_omega01(n)) {
          outside = std::max({outside, std::abs(bv.vstar.u[n]), std::abs(bv.vstar.v[n]), std::abs(bv.wstar[n])});
          continue;
        }
        bool interior = true;
        for (int di = -1; di <= 1 && interior; ++di)
          for (int dj = -1; dj <= 1 && interior; ++dj)
            for (int dk = -1; dk <= 1 && interior; ++dk)
              interior = mask.in_omega01(gb.shape().index(i + di, j + dj, k + dk));
        if (!interior) continue;
        div = std::max(div, std::abs(ux[n] + vy[n] + wz[n]));
        scale = std::max(scale, std::abs(ux[n]) + std::abs(vy[n]) + std::abs(wz[n]));
      }
  rows.push_back(row(suite, "bolus: max |div v* + d_z w*| / max term size", div / scale, 1e-12));
  rows.push_back(row(suite, "bolus: max |v*|, |w*| outside Omega_{0,1}", outside, 0.0));
  return rows;
}

std::vector<CheckRow> eos(Rng& rng) {
  const std::string suite = "eos";
  std::vector<CheckRow> rows;
  const EosTable t = default_eos_table();
  double outside = 0.0, fd = 0.0, lip = 0.0;
  const double K = lipschitz_bound(t);
  auto rho = [&](double th, double s, double p) { return 1.0 / t.specific_volume(th, s, p); };
  for (int q = 0; q < 1000; ++q) {
    const double th = uniform(rng, t.theta_range.lo, t.theta_range.hi);
    const double s = uniform(rng, t.s_range.lo, t.s_range.hi);
    const double p = uniform(rng, t.p_range.lo, t.p_range.hi);
    const double r = rho(th, s, p);
    if (!t.rho_range.contains(r)) outside += 1.0;

    const double v = t.specific_volume(th, s, p);
    const double a = t.dv_dtheta(th, s, p) / (v * v);
    const double b = -t.dv_ds(th, s, p) / (v * v);
    const double h = 1e-5;
    const double a_fd = -(rho(th + h, s, p) - rho(th - h, s, p)) / (2.0 * h);
    const double b_fd = (rho(th, s + h, p) - rho(th, s - h, p)) / (2.0 * h);
    fd = std::max({fd, std::abs(a - a_fd) / std::abs(a), std::abs(b - b_fd) / std::abs(b)});

    const double th2 = uniform(rng, t.theta_range.lo, t.theta_range.hi);
    const double s2 = uniform(rng, t.s_range.lo, t.s_range.hi);
    const double lhs = std::abs(r - rho(th2, s2, p));
    const double rhs = K * (std::abs(th - th2) + std::abs(s - s2));
    if (rhs > 0.0) lip = std::max(lip, lhs / rhs);
  }
  rows.push_back(row(suite, "random admissible samples with rho outside rho_range", outside, 0.0));
  rows.push_back(row(suite, "max relative error of a, b vs central differences", fd, 1e-6));
  rows.push_back(row(suite, "max |rho1-rho2| / (K (|dtheta|+|dS|))", lip, 1.0 + 1e-9));
  const bool same = eos_table_from_json(eos_table_to_json(t)) == t;
  rows.push_back(row(suite, "JSON round trip mismatch", same ? 0.0 : 1.0, 0.0));
  return rows;
}

std::vector<CheckRow> elliptic(Rng& rng) {
  const std::string suite = "elliptic";
  std::vector<CheckRow> rows;
  MixingParams p;
  p.K_I = 1.0e3;
  p.K_D = 1.0e2;
  const double pi = std::acos(-1.0);
  const Grid g = make_grid({16, 16, 16, 1000.0, 1000.0, 1000.0});
  const ScalarField exact = sample(g, [&](double x, double y, double z) {
    return std::cos(pi * x / g.Lx) * std::cos(2.0 * pi * y / g.Ly) * std::cos(pi * z / g.h);
  });
  const double lam = p.K_I * (std::pow(pi / g.Lx, 2) + std::pow(2.0 * pi / g.Ly, 2)) + p.K_D * std::pow(pi / g.h, 2);
  ScalarField F = exact;
  F *= lam;
  const SymTensorField K0 = assemble_kiso_full(SlopeField(g.shape()), p);
  SolveOptions opt;
  opt.rtol = 1e-12;
  const IsoneutralSolution sol = solve_isoneutral(K0, F, g, BoundarySpec::neumann_zero(), opt);
  ScalarField err = sol.C;
  err -= exact;
  rows.push_back(row(suite, "manufactured L=0 solve, relative L2 error at 16^3", l2_norm(err, g) / l2_norm(exact, g), 2e-2));

  // General tensor with a Robin surface: residual and the monotone residual of CR.
  MixingParams q;
  const SymTensorField K = assemble_kiso_full(random_slopes(g.shape(), rng, 0.3), q);
  const BoundarySpec bc = BoundarySpec::surface_robin(1e-2, {0.0});
  const ScalarField G = smooth_field(g, rng);
  opt.rtol = 1e-9;
  opt.maxit = 5000;
  opt.method = Krylov::CR;
  const IsoneutralSolution cr = solve_isoneutral(K, G, g, bc, opt);
  ScalarField res = apply_eddy_operator(K, cr.C, g, bc);
  res -= G;
  rows.push_back(row(suite, "general tensor (CR): |D_iso(C) - F| / |F|", l2_norm(res, g) / l2_norm(G, g), 1e-8));
  double rise = 0.0;
  for (std::size_t n = 1; n < cr.report.residual_trace.size(); ++n)
    rise = std::max(rise, cr.report.residual_trace[n] - cr.report.residual_trace[n - 1]);
  rows.push_back(row(suite, "CR residual trace: largest increase / initial", rise / cr.report.initial_residual, 1e-12));
  return rows;
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {"ellipticity", "skewness", "bounds", "energy",
                                                 "slopes",      "eos",      "elliptic"};
  return names;
}

std::vector<CheckRow> run_verify_suite(const std::string& name, std::uint64_t seed) {
  if (name == "all") {
    std::vector<CheckRow> rows;
    for (const auto& n : verify_suite_names()) {
      auto r = run_verify_suite(n, seed);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    return rows;
  }
  Rng rng(seed);
  if (name == "ellipticity") return ellipticity(rng);
  if (name == "skewness") return skewness(rng);
  if (name == "bounds") return bounds();
  if (name == "energy") return energy();
  if (name == "slopes") return slopes(rng);
  if (name == "eos") return eos(rng);
  if (name == "elliptic") return elliptic(rng);
  throw ArgumentError("unknown verify suite '" + name + "' (expected one of ellipticity, skewness, bounds, energy, "
                      "slopes, eos, elliptic, all)");
}

bool print_check_table(const std::vector<CheckRow>& rows, std::ostream& out) {
  bool ok = true;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-6s %-12s %-62s %14s %14s\n", "result", "suite", "check", "measured", "threshold");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-6s %-12s %-62s %14.6e %14.6e\n", r.pass ? "PASS" : "FAIL", r.suite.c_str(),
                  r.name.c_str(), r.measured, r.threshold);
    out << buf;
    ok = ok && r.pass;
  }
  return ok;
}

}  // namespace gmr
