#pragma once

// Real scalar field on a Grid with a lazily synchronised spectrum.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "mpfc/grid.hpp"

namespace mpfc {

class Field {
 public:
  Field() = default;

  explicit Field(GridPtr grid)
      : grid_(std::move(grid)),
        values_(grid_->size(), 0.0),
        spectrum_(grid_->size(), Complex{0.0, 0.0}) {}

  static Field from_values(GridPtr grid, std::vector<double> values) {
    if (values.size() != grid->size()) {
      throw InvalidField("sample count does not match grid size");
    }
    Field f(std::move(grid));
    f.values_ = std::move(values);
    f.spectrum_valid_ = false;
    return f;
  }

  // Samples fn(x, y, z) at every grid point (unused coordinates are 0).
  static Field from_function(GridPtr grid, const std::function<double(double, double, double)>& fn) {
    Field f(grid);
    auto v = f.mutable_values();
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const double x = grid->coordinate(i, 0);
      const double y = grid->dim() > 1 ? grid->coordinate(i, 1) : 0.0;
      const double z = grid->dim() > 2 ? grid->coordinate(i, 2) : 0.0;
      v[i] = fn(x, y, z);
    }
    return f;
  }

  static Field constant(GridPtr grid, double c) {
    Field f(std::move(grid));
    std::fill(f.values_.begin(), f.values_.end(), c);
    std::fill(f.spectrum_.begin(), f.spectrum_.end(), Complex{0.0, 0.0});
    f.spectrum_[0] = c;
    return f;
  }

  bool empty() const noexcept { return !grid_; }
  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const {
    sync_values();
    return values_;
  }

  std::span<const Complex> spectrum() const {
    sync_spectrum();
    return spectrum_;
  }

  std::span<double> mutable_values() {
    sync_values();
    spectrum_valid_ = false;
    return values_;
  }

  std::span<Complex> mutable_spectrum() {
    sync_spectrum();
    values_valid_ = false;
    return spectrum_;
  }

  bool same_grid(const Field& other) const noexcept {
    return grid_ == other.grid_ ||
           (grid_ && other.grid_ && grid_->dim() == other.grid_->dim() &&
            grid_->n_points() == other.grid_->n_points());
  }

  Field& operator+=(const Field& rhs) { return combine(rhs, 1.0); }
  Field& operator-=(const Field& rhs) { return combine(rhs, -1.0); }

  Field& operator*=(double s) {
    if (spectrum_valid_) {
      for (auto& c : spectrum_) c *= s;
    }
    if (values_valid_) {
      for (auto& v : values_) v *= s;
    }
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

 private:
  Field& combine(const Field& rhs, double sign) {
    if (!same_grid(rhs)) throw InvalidField("field grids differ");
    // Work in whichever representation both sides already hold.
    if (spectrum_valid_ && rhs.spectrum_valid_) {
      for (std::size_t i = 0; i < spectrum_.size(); ++i) spectrum_[i] += sign * rhs.spectrum_[i];
      values_valid_ = false;
    } else {
      auto v = mutable_values();
      auto r = rhs.values();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += sign * r[i];
    }
    return *this;
  }

  void sync_values() const {
    if (values_valid_ || !grid_) return;
    std::vector<Complex> out(spectrum_.size());
    grid_->inverse(spectrum_, out);
    for (std::size_t i = 0; i < out.size(); ++i) values_[i] = out[i].real();
    values_valid_ = true;
  }

  void sync_spectrum() const {
    if (spectrum_valid_ || !grid_) return;
    std::vector<Complex> in(values_.begin(), values_.end());
    grid_->forward(in, spectrum_);
    spectrum_valid_ = true;
  }

  GridPtr grid_;
  mutable std::vector<double> values_;
  mutable std::vector<Complex> spectrum_;
  mutable bool values_valid_ = true;
  mutable bool spectrum_valid_ = true;
};

}  // namespace mpfc
