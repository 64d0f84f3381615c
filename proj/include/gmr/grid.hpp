#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gmr/field.hpp"

namespace gmr {

/// Requested box geometry: Omega = [0,Lx] x [0,Ly] x (-h,0).
struct GridSpec {
  int nx = 32;
  int ny = 32;
  int nz = 32;
  double Lx = 1000.0;
  double Ly = 1000.0;
  double h = 1000.0;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Uniform cell-centred grid on the box.
struct Grid {
  int nx = 0, ny = 0, nz = 0;
  double Lx = 0, Ly = 0, h = 0;
  double dx = 0, dy = 0, dz = 0;
  std::vector<double> x;  ///< cell centres, size nx
  std::vector<double> y;  ///< size ny
  std::vector<double> z;  ///< size nz, ascending, all inside (-h, 0)
  ScalarField boundary_distance;  ///< distance of each cell centre to the nearest box face

  Shape shape() const noexcept { return {nx, ny, nz}; }
  std::size_t cells() const noexcept { return shape().size(); }
  double cell_volume() const noexcept { return dx * dy * dz; }
  double spacing(int axis) const noexcept { return axis == 0 ? dx : (axis == 1 ? dy : dz); }
  int count(int axis) const noexcept { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
  double min_spacing() const noexcept;
  double max_spacing() const noexcept;
};

Grid make_grid(const GridSpec& spec);

enum class Region : std::uint8_t { Omega0, Omega1, Omega2 };

/// Distance-band classification of the cells (interior / transition / boundary band).
struct RegionMask {
  double eta = 0;
  std::vector<Region> label;
  ScalarField distance;

  Region at(std::size_t n) const noexcept { return label[n]; }
  /// Omega_{0,1}: dist > eta
  bool in_omega01(std::size_t n) const noexcept { return distance[n] > eta; }
  /// Omega_{1,2}: dist > eta/2
  bool in_omega12(std::size_t n) const noexcept { return distance[n] > 0.5 * eta; }
  std::vector<bool> omega01() const;
  std::vector<bool> omega12() const;
};

RegionMask classify_regions(const Grid& grid, double eta);

enum class Axis : int { X = 0, Y = 1, Z = 2 };

/// Box faces. Top is z = 0 (surface), Bottom is z = -h.
enum class Face : int { West = 0, East = 1, South = 2, North = 3, Bottom = 4, Top = 5 };

enum class BcKind { NeumannZero, Robin, PrescribedFlux };

/// Boundary closure of one face, written in terms of the outward normal derivative:
///   NeumannZero:     dC/dn = 0
///   Robin:           dC/dn = -coefficient * (C - data)
///   PrescribedFlux:  dC/dn = data
/// `data` holds one value per boundary cell of the face (empty: all zero,
/// one entry: constant).
struct FaceBc {
  BcKind kind = BcKind::NeumannZero;
  double coefficient = 0.0;
  std::vector<double> data;

  double value(std::size_t face_cell) const noexcept {
    if (data.empty()) return 0.0;
    if (data.size() == 1) return data[0];
    return data[face_cell];
  }
};

struct BoundarySpec {
  std::array<FaceBc, 6> faces{};

  const FaceBc& operator[](Face f) const noexcept { return faces[static_cast<int>(f)]; }
  FaceBc& operator[](Face f) noexcept { return faces[static_cast<int>(f)]; }

  static BoundarySpec neumann_zero() { return {}; }
  /// Zero-flux everywhere except a Robin condition at the surface.
  static BoundarySpec surface_robin(double k, std::vector<double> target);
  bool all_zero_flux() const noexcept;
};

/// Index of cell (i,j,k) within the 2-D cell layout of a boundary face.
std::size_t face_cell_index(const Grid& grid, Face face, int i, int j, int k) noexcept;

/// Centred first derivative along `axis`; boundary cells use a ghost value
/// derived from the closure of the corresponding face.
ScalarField diff(const ScalarField& field, Axis axis, const Grid& grid, const BoundarySpec& bc);

/// Midpoint-rule integral over Omega.
double integrate(const ScalarField& field, const Grid& grid);
/// sqrt of the midpoint-rule integral of field^2.
double l2_norm(const ScalarField& field, const Grid& grid);
/// Volume-weighted mean.
double mean(const ScalarField& field, const Grid& grid);

/// Midpoint-rule integral of a surface field over M.
double integrate_surface(const Field2D& field, const Grid& grid);

/// Fresh field sampled from f(x, y, z) at cell centres.
template <class F>
ScalarField sample(const Grid& grid, F&& f) {
  ScalarField out(grid.shape());
  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) out(i, j, k) = f(grid.x[i], grid.y[j], grid.z[k]);
  return out;
}

}  // namespace gmr
