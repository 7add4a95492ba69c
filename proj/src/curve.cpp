#include "nhim/curve.hpp"

#include <algorithm>
#include <cmath>

namespace nhim {

TimeGrid TimeGrid::backward_horizon(double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0))
    throw Error("horizon and step must be positive");
  const double ratio = horizon / dt;
  const int steps = static_cast<int>(std::llround(ratio));
  if (steps < 1 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio))
    throw Error("horizon must be an integral multiple of the step");
  return TimeGrid{-horizon, dt, steps};
}

Curve::Curve(TimeGrid grid, int dim)
    : grid_(grid),
      dim_(dim),
      data_(static_cast<std::size_t>(grid.samples()) * dim, 0.0) {}

std::span<double> Curve::at(int i) {
  return {data_.data() + static_cast<std::size_t>(i) * dim_,
          static_cast<std::size_t>(dim_)};
}

std::span<const double> Curve::at(int i) const {
  return {data_.data() + static_cast<std::size_t>(i) * dim_,
          static_cast<std::size_t>(dim_)};
}

void Curve::eval(double t, std::span<double> out) const {
  const int n = grid_.steps;
  if (n == 0) {
    for (int c = 0; c < dim_; ++c) out[c] = data_[c];
    return;
  }
  const double s = (t - grid_.t0) / grid_.dt;
  if (s < -0.5 || s > n + 0.5)
    throw Error("curve evaluated outside its time grid");

  if (n < 3) {  // not enough points for a cubic; fall back to linear
    int i = std::clamp(static_cast<int>(std::floor(s)), 0, n - 1);
    const double u = s - i;
    auto a = at(i), b = at(i + 1);
    for (int c = 0; c < dim_; ++c) out[c] = (1.0 - u) * a[c] + u * b[c];
    return;
  }

  // 4-point Lagrange stencil, clamped at the ends.
  int j0 = static_cast<int>(std::floor(s)) - 1;
  j0 = std::clamp(j0, 0, n - 3);
  const double u = s - j0;
  const double w0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
  const double w1 = u * (u - 2.0) * (u - 3.0) / 2.0;
  const double w2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
  const double w3 = u * (u - 1.0) * (u - 2.0) / 6.0;
  auto p0 = at(j0), p1 = at(j0 + 1), p2 = at(j0 + 2), p3 = at(j0 + 3);
  for (int c = 0; c < dim_; ++c)
    out[c] = w0 * p0[c] + w1 * p1[c] + w2 * p2[c] + w3 * p3[c];
}

double Curve::sup_norm() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Curve Curve::slice(int i0, int i1) const {
  if (i0 < 0 || i1 > grid_.steps || i0 >= i1)
    throw Error("bad curve slice");
  Curve out(TimeGrid{grid_.time(i0), grid_.dt, i1 - i0}, dim_);
  std::copy(data_.begin() + static_cast<std::size_t>(i0) * dim_,
            data_.begin() + static_cast<std::size_t>(i1 + 1) * dim_,
            out.data_.begin());
  return out;
}

double Curve::sup_distance(const Curve& a, const Curve& b) {
  if (!(a.grid_ == b.grid_) || a.dim_ != b.dim_)
    throw Error("sup distance needs curves on the same grid");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data_.size(); ++i)
    m = std::max(m, std::abs(a.data_[i] - b.data_[i]));
  return m;
}

}  // namespace nhim
