#include "gmr/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmr/errors.hpp"

namespace gmr {

void ScalarField::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  if (other.shape_ != shape_) throw ArgumentError("ScalarField::operator+=: shape mismatch");
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += other.data_[n];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  if (other.shape_ != shape_) throw ArgumentError("ScalarField::operator-=: shape mismatch");
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= other.data_[n];
  return *this;
}

ScalarField& ScalarField::operator*=(double factor) {
  for (double& x : data_) x *= factor;
  return *this;
}

void ScalarField::axpy(double factor, const ScalarField& other) {
  if (other.shape_ != shape_) throw ArgumentError("ScalarField::axpy: shape mismatch");
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += factor * other.data_[n];
}

double ScalarField::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double x : data_) m = std::min(m, x);
  return m;
}

double ScalarField::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : data_) m = std::max(m, x);
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace gmr
