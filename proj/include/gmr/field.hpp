#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gmr {

/// Cell counts of a 3-D box grid. Flat storage is x-fastest: i + nx*(j + ny*k).
struct Shape {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  std::size_t columns() const noexcept {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(nx) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * k);
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Cell-centred samples of a scalar quantity on the box grid.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(Shape shape, double value = 0.0)
      : shape_(shape), data_(shape.size(), value) {}

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(int i, int j, int k) noexcept { return data_[shape_.index(i, j, k)]; }
  double operator()(int i, int j, int k) const noexcept { return data_[shape_.index(i, j, k)]; }
  double& operator[](std::size_t n) noexcept { return data_[n]; }
  double operator[](std::size_t n) const noexcept { return data_[n]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  void fill(double value);
  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double factor);
  /// this += factor * other
  void axpy(double factor, const ScalarField& other);

  double min() const;
  double max() const;
  bool all_finite() const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
  Shape shape_{};
  std::vector<double> data_;
};

/// Surface (2-D) field over the nx*ny columns, x-fastest.
class Field2D {
public:
  Field2D() = default;
  Field2D(int nx, int ny, double value = 0.0)
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny, value) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(int i, int j) noexcept { return data_[i + static_cast<std::size_t>(nx_) * j]; }
  double operator()(int i, int j) const noexcept { return data_[i + static_cast<std::size_t>(nx_) * j]; }
  double& operator[](std::size_t n) noexcept { return data_[n]; }
  double operator[](std::size_t n) const noexcept { return data_[n]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const Field2D&, const Field2D&) = default;

private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> data_;
};

/// Horizontal velocity (or any horizontal 2-vector) at cell centres.
struct VectorField {
  ScalarField u;
  ScalarField v;

  VectorField() = default;
  explicit VectorField(Shape shape, double value = 0.0) : u(shape, value), v(shape, value) {}

  const Shape& shape() const noexcept { return u.shape(); }
  friend bool operator==(const VectorField&, const VectorField&) = default;
};

}  // namespace gmr
