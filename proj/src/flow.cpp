#include "nhim/flow.hpp"

#include <cmath>

namespace nhim {

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// One RK4 step of Y' = A(x(t)) Y from the identity over [t0, t0 + h].
Mat linear_rk4_step(const SystemSpec& spec, const Curve& x, double t0,
                    double h) {
  const int n = spec.dim_y();
  std::vector<double> xv(spec.dim_x());
  Mat a1(n), a2(n), a4(n);
  x.eval(t0, xv);
  spec.eval_linear(xv, a1);
  x.eval(t0 + 0.5 * h, xv);
  spec.eval_linear(xv, a2);
  x.eval(t0 + h, xv);
  spec.eval_linear(xv, a4);

  auto plus_scaled = [n](const Mat& k, double s) {
    Mat out = Mat::identity(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) += s * k(i, j);
    return out;
  };

  const Mat k1 = a1;
  const Mat k2 = a2 * plus_scaled(k1, 0.5 * h);
  const Mat k3 = a2 * plus_scaled(k2, 0.5 * h);
  const Mat k4 = a4 * plus_scaled(k3, h);

  Mat m = Mat::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) += h * (k1(i, j) + 2.0 * k2(i, j) + 2.0 * k3(i, j) + k4(i, j)) / 6.0;
  return m;
}

}  // namespace

Cocycle::Cocycle(TimeGrid grid, int dim, std::vector<Mat> full,
                 std::vector<Mat> half)
    : grid_(grid), dim_(dim), full_(std::move(full)), half_(std::move(half)) {
  if (static_cast<int>(full_.size()) != grid_.steps ||
      half_.size() != full_.size())
    throw Error("cocycle needs one transition per grid step");
}

Mat Cocycle::transition(int i, int j) const {
  if (i > j) throw Error("cocycle transition needs i <= j");
  Mat m = Mat::identity(dim_);
  for (int k = i; k < j; ++k) m = full_[k] * m;
  return m;
}

Curve flow_horizontal(const SystemSpec& spec, const Curve& y,
                      std::span<const double> x0, const TimeGrid& grid) {
  if (!(y.grid() == grid)) throw Error("fiber curve grid mismatch");
  if (y.dim() != spec.dim_y() ||
      static_cast<int>(x0.size()) != spec.dim_x())
    throw Error("dimension mismatch in horizontal flow");

  const int dx = spec.dim_x();
  Curve x(grid, dx);
  {
    auto last = x.at(grid.steps);
    for (int c = 0; c < dx; ++c) last[c] = x0[c];
  }

  std::vector<double> yv(spec.dim_y()), k1(dx), k2(dx), k3(dx), k4(dx),
      tmp(dx);
  auto field = [&](double t, std::span<const double> xv,
                   std::vector<double>& out) {
    y.eval(t, yv);
    spec.eval_horizontal(xv, yv, out);
  };

  const double h = -grid.dt;  // backward
  for (int i = grid.steps; i > 0; --i) {
    const double t = grid.time(i);
    auto xi = x.at(i);
    try {
      field(t, xi, k1);
      for (int c = 0; c < dx; ++c) tmp[c] = xi[c] + 0.5 * h * k1[c];
      field(t + 0.5 * h, tmp, k2);
      for (int c = 0; c < dx; ++c) tmp[c] = xi[c] + 0.5 * h * k2[c];
      field(t + 0.5 * h, tmp, k3);
      for (int c = 0; c < dx; ++c) tmp[c] = xi[c] + h * k3[c];
      field(t + h, tmp, k4);
    } catch (const EvalError& e) {
      throw IntegrationError(std::string("base flow diverged: ") + e.what(),
                             t);
    }
    auto prev = x.at(i - 1);
    for (int c = 0; c < dx; ++c)
      prev[c] = xi[c] + h * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) / 6.0;
    if (!all_finite(prev))
      throw IntegrationError("base flow became non-finite", grid.time(i - 1));
  }
  return x;
}

Cocycle flow_linear(const SystemSpec& spec, const Curve& x) {
  if (x.dim() != spec.dim_x()) throw Error("base curve dimension mismatch");
  const TimeGrid& grid = x.grid();
  const int n = spec.dim_y();

  std::vector<Mat> full, half;
  full.reserve(grid.steps);
  half.reserve(grid.steps);
  for (int i = 0; i < grid.steps; ++i) {
    const double t = grid.time(i);
    const double hh = 0.5 * grid.dt;
    Mat m1(n), m2(n);
    try {
      m1 = linear_rk4_step(spec, x, t, hh);
      m2 = linear_rk4_step(spec, x, t + hh, hh);
    } catch (const EvalError& e) {
      throw IntegrationError(
          std::string("linear fiber flow diverged: ") + e.what(), t);
    }
    Mat f = m2 * m1;
    if (!f.finite())
      throw IntegrationError("linear fiber flow became non-finite",
                             grid.time(i + 1));
    full.push_back(std::move(f));
    half.push_back(m2);
  }
  return Cocycle(grid, n, std::move(full), std::move(half));
}

VariationalResult variational_flow(const SystemSpec& spec,
                                   std::span<const double> z0, double t_span,
                                   double h_t) {
  const int d = spec.dim();
  if (static_cast<int>(z0.size()) != d)
    throw Error("variational flow needs a full (x, y) start point");
  if (!(h_t > 0.0)) throw Error("step must be positive");

  const double span_abs = std::abs(t_span);
  const int m = static_cast<int>(std::llround(span_abs / h_t));
  if (span_abs > 0.0 &&
      (m < 1 || std::abs(span_abs / h_t - m) > 1e-9 * std::max(1.0, span_abs / h_t)))
    throw Error("time span must be an integral multiple of the step");
  const double dt = t_span < 0.0 ? -h_t : h_t;

  VariationalResult res;
  res.grid = TimeGrid{0.0, dt, m};
  res.state_dim = d;
  res.states.resize(static_cast<std::size_t>(m + 1) * d);
  res.transitions.reserve(m + 1);

  std::vector<double> z(z0.begin(), z0.end());
  Mat trans = Mat::identity(d);
  std::copy(z.begin(), z.end(), res.states.begin());
  res.transitions.push_back(trans);

  // Central-difference Jacobian of the full field, relative step 1e-6.
  std::vector<double> zp(d), zm(d), fp(d), fm(d);
  auto jacobian = [&](const std::vector<double>& at, Mat& j) {
    for (int col = 0; col < d; ++col) {
      const double eps = 1e-6 * std::max(1.0, std::abs(at[col]));
      std::copy(at.begin(), at.end(), zp.begin());
      std::copy(at.begin(), at.end(), zm.begin());
      zp[col] += eps;
      zm[col] -= eps;
      spec.eval_field(zp, fp);
      spec.eval_field(zm, fm);
      for (int row = 0; row < d; ++row)
        j(row, col) = (fp[row] - fm[row]) / (2.0 * eps);
    }
  };

  std::vector<double> kz1(d), kz2(d), kz3(d), kz4(d), ztmp(d);
  Mat j(d), km1(d), km2(d), km3(d), km4(d), mtmp(d);
  auto stage = [&](const std::vector<double>& zs, const Mat& ms,
                   std::vector<double>& kz, Mat& km) {
    spec.eval_field(zs, kz);
    jacobian(zs, j);
    km = j * ms;
  };

  for (int i = 0; i < m; ++i) {
    try {
      stage(z, trans, kz1, km1);
      for (int c = 0; c < d; ++c) ztmp[c] = z[c] + 0.5 * dt * kz1[c];
      for (int c = 0; c < d * d; ++c)
        mtmp.data()[c] = trans.data()[c] + 0.5 * dt * km1.data()[c];
      stage(ztmp, mtmp, kz2, km2);
      for (int c = 0; c < d; ++c) ztmp[c] = z[c] + 0.5 * dt * kz2[c];
      for (int c = 0; c < d * d; ++c)
        mtmp.data()[c] = trans.data()[c] + 0.5 * dt * km2.data()[c];
      stage(ztmp, mtmp, kz3, km3);
      for (int c = 0; c < d; ++c) ztmp[c] = z[c] + dt * kz3[c];
      for (int c = 0; c < d * d; ++c)
        mtmp.data()[c] = trans.data()[c] + dt * km3.data()[c];
      stage(ztmp, mtmp, kz4, km4);
    } catch (const EvalError& e) {
      throw IntegrationError(
          std::string("variational flow diverged: ") + e.what(),
          res.grid.time(i));
    }

    for (int c = 0; c < d; ++c)
      z[c] += dt * (kz1[c] + 2.0 * kz2[c] + 2.0 * kz3[c] + kz4[c]) / 6.0;
    for (int c = 0; c < d * d; ++c)
      trans.data()[c] += dt * (km1.data()[c] + 2.0 * km2.data()[c] +
                               2.0 * km3.data()[c] + km4.data()[c]) / 6.0;

    if (!all_finite(z) || !trans.finite())
      throw IntegrationError("variational flow became non-finite",
                             res.grid.time(i + 1));
    std::copy(z.begin(), z.end(),
              res.states.begin() + static_cast<std::size_t>(i + 1) * d);
    res.transitions.push_back(trans);
  }
  return res;
}

}  // namespace nhim
