#include "gmr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gmr/errors.hpp"

namespace gmr {

double Grid::min_spacing() const noexcept { return std::min({dx, dy, dz}); }
double Grid::max_spacing() const noexcept { return std::max({dx, dy, dz}); }

Grid make_grid(const GridSpec& spec) {
  std::vector<std::string> problems;
  auto positive_count = [&](int n, const char* name) {
    if (n <= 0) problems.push_back(std::string("grid.") + name + " must be a positive cell count");
  };
  auto positive_extent = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      problems.push_back(std::string("grid.") + name + " must be a positive finite extent");
  };
  positive_count(spec.nx, "nx");
  positive_count(spec.ny, "ny");
  positive_count(spec.nz, "nz");
  positive_extent(spec.Lx, "Lx");
  positive_extent(spec.Ly, "Ly");
  positive_extent(spec.h, "h");
  if (!problems.empty()) throw ConfigError(problems);

  Grid g;
  g.nx = spec.nx;
  g.ny = spec.ny;
  g.nz = spec.nz;
  g.Lx = spec.Lx;
  g.Ly = spec.Ly;
  g.h = spec.h;
  g.dx = spec.Lx / spec.nx;
  g.dy = spec.Ly / spec.ny;
  g.dz = spec.h / spec.nz;
  g.x.resize(g.nx);
  g.y.resize(g.ny);
  g.z.resize(g.nz);
  for (int i = 0; i < g.nx; ++i) g.x[i] = (i + 0.5) * g.dx;
  for (int j = 0; j < g.ny; ++j) g.y[j] = (j + 0.5) * g.dy;
  for (int k = 0; k < g.nz; ++k) g.z[k] = -g.h + (k + 0.5) * g.dz;

  g.boundary_distance = ScalarField(g.shape());
  for (int k = 0; k < g.nz; ++k) {
    const double dzb = std::min(g.z[k] + g.h, -g.z[k]);
    for (int j = 0; j < g.ny; ++j) {
      const double dyb = std::min(g.y[j], g.Ly - g.y[j]);
      for (int i = 0; i < g.nx; ++i) {
        const double dxb = std::min(g.x[i], g.Lx - g.x[i]);
        g.boundary_distance(i, j, k) = std::min({dxb, dyb, dzb});
      }
    }
  }
  return g;
}

std::vector<bool> RegionMask::omega01() const {
  std::vector<bool> m(label.size());
  for (std::size_t n = 0; n < m.size(); ++n) m[n] = in_omega01(n);
  return m;
}

std::vector<bool> RegionMask::omega12() const {
  std::vector<bool> m(label.size());
  for (std::size_t n = 0; n < m.size(); ++n) m[n] = in_omega12(n);
  return m;
}

RegionMask classify_regions(const Grid& grid, double eta) {
  const double limit = 0.5 * std::min({grid.Lx, grid.Ly, grid.h});
  if (!(eta > 0.0) || !(2.0 * eta < limit))
    throw ConfigError("regularization.eta must satisfy 0 < 2*eta < min(Lx, Ly, h)/2");

  RegionMask mask;
  mask.eta = eta;
  mask.distance = grid.boundary_distance;
  mask.label.resize(grid.cells());
  for (std::size_t n = 0; n < grid.cells(); ++n) {
    const double d = mask.distance[n];
    if (d >= 2.0 * eta)
      mask.label[n] = Region::Omega0;
    else if (d > eta)
      mask.label[n] = Region::Omega1;
    else
      mask.label[n] = Region::Omega2;
  }
  return mask;
}

BoundarySpec BoundarySpec::surface_robin(double k, std::vector<double> target) {
  BoundarySpec bc;
  bc[Face::Top] = FaceBc{BcKind::Robin, k, std::move(target)};
  return bc;
}

bool BoundarySpec::all_zero_flux() const noexcept {
  for (const auto& f : faces) {
    if (f.kind == BcKind::NeumannZero) continue;
    if (f.kind == BcKind::Robin && f.coefficient == 0.0) continue;
    if (f.kind == BcKind::PrescribedFlux &&
        std::all_of(f.data.begin(), f.data.end(), [](double q) { return q == 0.0; }))
      continue;
    return false;
  }
  return true;
}

std::size_t face_cell_index(const Grid& grid, Face face, int i, int j, int k) noexcept {
  switch (face) {
    case Face::West:
    case Face::East:
      return static_cast<std::size_t>(j) + static_cast<std::size_t>(grid.ny) * k;
    case Face::South:
    case Face::North:
      return static_cast<std::size_t>(i) + static_cast<std::size_t>(grid.nx) * k;
    case Face::Bottom:
    case Face::Top:
    default:
      return static_cast<std::size_t>(i) + static_cast<std::size_t>(grid.nx) * j;
  }
}

namespace {

// Ghost value beyond a face, given the adjacent interior value and the
// outward normal derivative rule of the face. The face value is taken as the
// mean of ghost and boundary cell.
double ghost_value(const FaceBc& bc, double boundary_value, double h, std::size_t face_cell) {
  switch (bc.kind) {
    case BcKind::NeumannZero:
      return boundary_value;
    case BcKind::PrescribedFlux:
      return boundary_value + h * bc.value(face_cell);
    case BcKind::Robin: {
      const double k = bc.coefficient;
      const double target = bc.value(face_cell);
      // Written as an increment so that C == target gives the boundary value exactly.
      return boundary_value + k * (target - boundary_value) / (1.0 / h + 0.5 * k);
    }
  }
  return boundary_value;
}

}  // namespace

ScalarField diff(const ScalarField& field, Axis axis, const Grid& grid, const BoundarySpec& bc) {
  if (field.shape() != grid.shape()) throw ArgumentError("diff: field shape does not match grid");
  const int a = static_cast<int>(axis);
  const int n = grid.count(a);
  const double h = grid.spacing(a);
  const Face low = static_cast<Face>(2 * a);
  const Face high = static_cast<Face>(2 * a + 1);

  ScalarField out(grid.shape());
  for (int k = 0; k < grid.nz; ++k) {
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        const int m = a == 0 ? i : (a == 1 ? j : k);
        auto at = [&](int mm) {
          int c[3] = {i, j, k};
          c[a] = mm;
          return field(c[0], c[1], c[2]);
        };
        double lo;
        double hi;
        if (m > 0) {
          lo = at(m - 1);
        } else {
          const std::size_t fc = face_cell_index(grid, low, i, j, k);
          lo = ghost_value(bc[low], at(0), h, fc);
        }
        if (m < n - 1) {
          hi = at(m + 1);
        } else {
          const std::size_t fc = face_cell_index(grid, high, i, j, k);
          hi = ghost_value(bc[high], at(n - 1), h, fc);
        }
        out(i, j, k) = (hi - lo) / (2.0 * h);
      }
    }
  }
  return out;
}

double integrate(const ScalarField& field, const Grid& grid) {
  if (field.shape() != grid.shape()) throw ArgumentError("integrate: field shape does not match grid");
  double sum = 0.0;
  for (double v : field.values()) sum += v;
  return sum * grid.cell_volume();
}

double l2_norm(const ScalarField& field, const Grid& grid) {
  if (field.shape() != grid.shape()) throw ArgumentError("l2_norm: field shape does not match grid");
  double sum = 0.0;
  for (double v : field.values()) sum += v * v;
  return std::sqrt(sum * grid.cell_volume());
}

double mean(const ScalarField& field, const Grid& grid) {
  return integrate(field, grid) / (grid.Lx * grid.Ly * grid.h);
}

double integrate_surface(const Field2D& field, const Grid& grid) {
  if (field.nx() != grid.nx || field.ny() != grid.ny)
    throw ArgumentError("integrate_surface: field shape does not match grid");
  double sum = 0.0;
  for (double v : field.values()) sum += v;
  return sum * grid.dx * grid.dy;
}

}  // namespace gmr
