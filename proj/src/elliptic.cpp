#include "gmr/elliptic.hpp"

#include <cmath>
#include <sstream>

#include "gmr/errors.hpp"

namespace gmr {

namespace {

double dot(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
  return s;
}

void remove_mean(ScalarField& f) {
  double s = 0.0;
  for (double x : f.values()) s += x;
  const double m = s / static_cast<double>(f.size());
  for (double& x : f.values()) x -= m;
}

std::string cell_label(const Shape& s, std::size_t n) {
  std::ostringstream os;
  os << "(" << n % s.nx << ", " << (n / s.nx) % s.ny << ", " << n / s.columns() << ")";
  return os.str();
}

using Apply = std::function<ScalarField(const ScalarField&)>;
using Locate = std::function<std::string(const ScalarField&)>;

// Krylov driver on the Euclidean inner product; norms are reported scaled by
// sqrt(weight) so they equal the discrete L2 norm. `singular` keeps the
// iterates orthogonal to constants.
SolveReport krylov(const Apply& A, const ScalarField& b, ScalarField& x, const ScalarField* diag, double weight,
                   bool singular, const SolveOptions& opt, const Locate& locate) {
  SolveReport rep;
  const double scale = std::sqrt(weight);
  ScalarField r = b;
  r -= A(x);
  if (singular) remove_mean(r);
  double rnorm = std::sqrt(dot(r, r)) * scale;
  rep.initial_residual = rnorm;
  rep.residual_trace.push_back(rnorm);
  const double target = opt.rtol * rnorm + opt.atol;
  if (rnorm <= target) {
    rep.final_residual = rnorm;
    rep.converged = true;
    return rep;
  }

  auto breakdown = [&](const ScalarField& dir) {
    throw NumericalError("solve_isoneutral: negative curvature, operator not positive at cell " + locate(dir));
  };

  if (opt.method == Krylov::CG) {
    auto precondition = [&](const ScalarField& res) {
      ScalarField z = res;
      if (opt.jacobi && diag) {
        for (std::size_t n = 0; n < z.size(); ++n) z[n] /= (*diag)[n];
        if (singular) remove_mean(z);
      }
      return z;
    };
    ScalarField z = precondition(r);
    ScalarField p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= opt.maxit; ++it) {
      ScalarField Ap = A(p);
      const double pAp = dot(p, Ap);
      if (pAp < 0.0) breakdown(p);
      if (pAp == 0.0) break;
      const double alpha = rz / pAp;
      x.axpy(alpha, p);
      r.axpy(-alpha, Ap);
      if (singular) remove_mean(r);
      rnorm = std::sqrt(dot(r, r)) * scale;
      rep.iterations = it;
      rep.residual_trace.push_back(rnorm);
      if (rnorm <= target) break;
      z = precondition(r);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      p *= beta;
      p += z;
    }
  } else {
    ScalarField Ar = A(r);
    double rAr = dot(r, Ar);
    if (rAr < 0.0) breakdown(r);
    ScalarField p = r;
    ScalarField Ap = Ar;
    for (int it = 1; it <= opt.maxit; ++it) {
      const double ApAp = dot(Ap, Ap);
      if (ApAp == 0.0 || rAr == 0.0) break;
      const double alpha = rAr / ApAp;
      x.axpy(alpha, p);
      r.axpy(-alpha, Ap);
      if (singular) remove_mean(r);
      rnorm = std::sqrt(dot(r, r)) * scale;
      rep.iterations = it;
      rep.residual_trace.push_back(rnorm);
      if (rnorm <= target) break;
      Ar = A(r);
      const double rAr_new = dot(r, Ar);
      if (rAr_new < 0.0) breakdown(r);
      const double beta = rAr_new / rAr;
      rAr = rAr_new;
      p *= beta;
      p += r;
      Ap *= beta;
      Ap += Ar;
    }
  }
  if (singular) remove_mean(x);
  rep.final_residual = rnorm;
  rep.converged = rnorm <= target;
  return rep;
}

bool has_robin(const BoundarySpec& bc) {
  for (const auto& f : bc.faces)
    if (f.kind == BcKind::Robin && f.coefficient > 0.0) return true;
  return false;
}

}  // namespace

IsoneutralSolution solve_isoneutral(const SymTensorField& K, const ScalarField& F, const Grid& grid,
                                    const BoundarySpec& bc, const SolveOptions& options) {
  if (F.shape() != grid.shape() || K.shape != grid.shape())
    throw ArgumentError("solve_isoneutral: tensor, right-hand side and grid shapes differ");
  if (!F.all_finite()) throw ArgumentError("solve_isoneutral: right-hand side contains NaN/Inf");

  // D_iso(C) = A C - D_iso-affine part; move the affine boundary data to the right.
  const ScalarField zero(grid.shape());
  ScalarField b = F;
  b -= apply_eddy_operator(K, zero, grid, bc);

  const bool singular = !has_robin(bc);
  if (singular) {
    double sum = 0.0, mag = 0.0;
    for (double v : b.values()) {
      sum += v;
      mag += std::abs(v);
    }
    if (std::abs(sum) > 1e-10 * mag)
      throw ArgumentError("solve_isoneutral: pure-Neumann problem needs a zero-mean right-hand side");
    remove_mean(b);
  }

  const Apply A = [&](const ScalarField& c) {
    ScalarField out = triad_operator(c, grid, &K, nullptr);
    add_boundary_linear_terms(out, c, grid, bc);
    return out;
  };
  const Locate locate = [&](const ScalarField& dir) {
    const ScalarField e = triad_energy_density(dir, grid, K);
    std::size_t worst = 0;
    for (std::size_t n = 1; n < e.size(); ++n)
      if (e[n] < e[worst]) worst = n;
    return cell_label(grid.shape(), worst);
  };
  ScalarField diag;
  if (options.jacobi) diag = triad_diagonal(K, grid, bc);

  IsoneutralSolution sol{ScalarField(grid.shape()), {}};
  sol.report = krylov(A, b, sol.C, options.jacobi ? &diag : nullptr, grid.cell_volume(), singular, options, locate);
  return sol;
}

std::pair<Field2D, Field2D> depth_mean(const VectorField& v, const Grid& grid) {
  Field2D ub(grid.nx, grid.ny), vb(grid.nx, grid.ny);
  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        ub(i, j) += v.u(i, j, k);
        vb(i, j) += v.v(i, j, k);
      }
  for (std::size_t n = 0; n < ub.size(); ++n) {
    ub[n] /= grid.nz;
    vb[n] /= grid.nz;
  }
  return {std::move(ub), std::move(vb)};
}

Field2D column_divergence(const Field2D& u, const Field2D& v, const Grid& grid) {
  Field2D d(grid.nx, grid.ny);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double ue = i + 1 < grid.nx ? 0.5 * (u(i, j) + u(i + 1, j)) : 0.0;
      const double uw = i > 0 ? 0.5 * (u(i - 1, j) + u(i, j)) : 0.0;
      const double vn = j + 1 < grid.ny ? 0.5 * (v(i, j) + v(i, j + 1)) : 0.0;
      const double vs = j > 0 ? 0.5 * (v(i, j - 1) + v(i, j)) : 0.0;
      d(i, j) = (ue - uw) / grid.dx + (vn - vs) / grid.dy;
    }
  }
  return d;
}

std::pair<Field2D, Field2D> column_gradient(const Field2D& p, const Grid& grid) {
  Field2D gx(grid.nx, grid.ny), gy(grid.nx, grid.ny);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double pe = p(i + 1 < grid.nx ? i + 1 : i, j);
      const double pw = p(i > 0 ? i - 1 : i, j);
      const double pn = p(i, j + 1 < grid.ny ? j + 1 : j);
      const double ps = p(i, j > 0 ? j - 1 : j);
      gx(i, j) = (pe - pw) / (2.0 * grid.dx);
      gy(i, j) = (pn - ps) / (2.0 * grid.dy);
    }
  }
  return {std::move(gx), std::move(gy)};
}

SurfacePressure solve_surface_pressure(const VectorField& v_predictor, const Grid& grid, double dt,
                                       const SolveOptions& options) {
  if (v_predictor.shape() != grid.shape()) throw ArgumentError("solve_surface_pressure: velocity shape mismatch");
  if (!(dt > 0.0)) throw ArgumentError("solve_surface_pressure: dt must be positive");
  if (!v_predictor.u.all_finite() || !v_predictor.v.all_finite())
    throw ArgumentError("solve_surface_pressure: predictor velocity contains NaN/Inf");

  const Shape s2{grid.nx, grid.ny, 1};
  auto to3 = [&](const Field2D& f) {
    ScalarField out(s2);
    for (std::size_t n = 0; n < f.size(); ++n) out[n] = f[n];
    return out;
  };
  auto to2 = [&](const ScalarField& f) {
    Field2D out(grid.nx, grid.ny);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = f[n];
    return out;
  };

  // -D G = D D^T is symmetric positive semidefinite with constants as kernel.
  const Apply A = [&](const ScalarField& p) {
    const auto [gx, gy] = column_gradient(to2(p), grid);
    ScalarField out = to3(column_divergence(gx, gy, grid));
    out *= -1.0;
    return out;
  };
  const auto [ub, vb] = depth_mean(v_predictor, grid);
  ScalarField b = to3(column_divergence(ub, vb, grid));
  b *= -1.0 / dt;
  remove_mean(b);

  const Locate locate = [&](const ScalarField&) { return std::string("(surface)"); };
  SolveOptions opt = options;
  opt.jacobi = false;
  ScalarField p(s2);
  SurfacePressure out;
  out.report = krylov(A, b, p, nullptr, grid.dx * grid.dy, true, opt, locate);
  out.ps = to2(p);
  return out;
}

void apply_surface_pressure(VectorField& v, const Field2D& ps, const Grid& grid, double dt) {
  const auto [gx, gy] = column_gradient(ps, grid);
  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        v.u(i, j, k) -= dt * gx(i, j);
        v.v(i, j, k) -= dt * gy(i, j);
      }
}

PicardResult solve_isoneutral_coupled(const TensorBuilder& build, const ScalarField& F, const ScalarField& G,
                                      const Grid& grid, const BoundarySpec& bc_theta, const BoundarySpec& bc_s,
                                      ScalarField theta0, ScalarField S0, const SolveOptions& options,
                                      const PicardOptions& picard) {
  PicardResult res;
  res.theta = std::move(theta0);
  res.S = std::move(S0);
  for (int sweep = 1; sweep <= picard.max_sweeps; ++sweep) {
    const SymTensorField K = build(res.theta, res.S);
    IsoneutralSolution th = solve_isoneutral(K, F, grid, bc_theta, options);
    IsoneutralSolution sa = solve_isoneutral(K, G, grid, bc_s, options);
    res.solves.push_back(th.report);
    res.solves.push_back(sa.report);

    auto rel_change = [&](const ScalarField& a, const ScalarField& b) {
      ScalarField d = a;
      d -= b;
      const double nb = l2_norm(a, grid);
      const double nd = l2_norm(d, grid);
      return nb > 0.0 ? nd / nb : nd;
    };
    res.last_change = std::max(rel_change(th.C, res.theta), rel_change(sa.C, res.S));
    res.theta = std::move(th.C);
    res.S = std::move(sa.C);
    res.sweeps = sweep;
    if (res.last_change <= picard.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace gmr
