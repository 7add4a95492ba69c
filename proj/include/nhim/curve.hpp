#pragma once

#include <span>
#include <vector>

#include "nhim/errors.hpp"

namespace nhim {

/// Uniform time grid t_i = t0 + i * dt, i = 0..steps.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  int steps = 0;

  int samples() const { return steps + 1; }
  double time(int i) const { return t0 + dt * i; }
  double t_end() const { return time(steps); }
  bool operator==(const TimeGrid&) const = default;

  /// Grid over [-horizon, 0]; horizon must be an integral multiple of dt.
  static TimeGrid backward_horizon(double horizon, double dt);
};

/// Vector-valued curve sampled on a uniform grid, evaluated between samples
/// by piecewise-cubic (4-point Lagrange) interpolation. Base-coordinate
/// curves store the continuous lift; wrapping happens only on output.
class Curve {
 public:
  Curve() = default;
  Curve(TimeGrid grid, int dim);
  static Curve zero(TimeGrid grid, int dim) { return Curve(grid, dim); }

  const TimeGrid& grid() const { return grid_; }
  int dim() const { return dim_; }

  std::span<double> at(int i);
  std::span<const double> at(int i) const;
  std::span<const double> front() const { return at(0); }
  std::span<const double> back() const { return at(grid_.steps); }

  /// Cubic interpolation at time t (clamped stencil near the ends).
  void eval(double t, std::span<double> out) const;

  double sup_norm() const;
  Curve slice(int i0, int i1) const;

  static double sup_distance(const Curve& a, const Curve& b);

 private:
  TimeGrid grid_;
  int dim_ = 0;
  std::vector<double> data_;  // samples() x dim, row-major
};

}  // namespace nhim
