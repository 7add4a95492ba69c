#include "nhim/linalg.hpp"

#include <cmath>

#include "nhim/errors.hpp"

namespace nhim {

Mat Mat::identity(int n) {
  Mat m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Mat::apply(std::span<const double> v, std::span<double> out) const {
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += a_[idx(i, j)] * v[j];
    out[i] = s;
  }
}

Mat Mat::block(int row0, int col0, int n) const {
  Mat b(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = (*this)(row0 + i, col0 + j);
  return b;
}

double Mat::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

bool Mat::finite() const {
  for (double v : a_)
    if (!std::isfinite(v)) return false;
  return true;
}

Mat operator*(const Mat& lhs, const Mat& rhs) {
  const int n = lhs.size();
  Mat out(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double l = lhs(i, k);
      for (int j = 0; j < n; ++j) out(i, j) += l * rhs(k, j);
    }
  return out;
}

Mat operator-(const Mat& lhs, const Mat& rhs) {
  const int n = lhs.size();
  Mat out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = lhs(i, j) - rhs(i, j);
  return out;
}

double operator_norm(const Mat& m) {
  const int n = m.size();
  if (n == 0) return 0.0;
  if (n == 1) return std::abs(m(0, 0));

  // S = M^T M, then cyclic Jacobi until the off-diagonal mass is negligible.
  Mat s(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) v += m(k, i) * m(k, j);
      s(i, j) = v;
    }

  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
    if (off < 1e-30 * (1.0 + s.max_abs() * s.max_abs())) break;

    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (s(p, q) == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (int k = 0; k < n; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
  }

  double lambda = 0.0;
  for (int i = 0; i < n; ++i) lambda = std::max(lambda, s(i, i));
  return std::sqrt(std::max(lambda, 0.0));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw Error("line fit needs at least two samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw Error("line fit is degenerate: no spread in x");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace nhim
