#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nhim {

/// Small dense square matrix, row-major. Fiber dimensions are single digit,
/// so no attempt is made at blocking or expression templates.
class Mat {
 public:
  Mat() = default;
  explicit Mat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

  static Mat identity(int n);

  int size() const { return n_; }
  double& operator()(int i, int j) { return a_[idx(i, j)]; }
  double operator()(int i, int j) const { return a_[idx(i, j)]; }
  std::span<double> data() { return a_; }
  std::span<const double> data() const { return a_; }

  /// out = M v
  void apply(std::span<const double> v, std::span<double> out) const;

  Mat block(int row0, int col0, int n) const;

  double max_abs() const;
  bool finite() const;

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }
  int n_ = 0;
  std::vector<double> a_;
};

Mat operator*(const Mat& lhs, const Mat& rhs);
Mat operator-(const Mat& lhs, const Mat& rhs);

/// Largest singular value (operator 2-norm), via Jacobi iteration on MᵀM.
double operator_norm(const Mat& m);

/// Least-squares slope and intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace nhim
