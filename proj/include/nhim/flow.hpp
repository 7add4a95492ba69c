#pragma once

#include <span>
#include <vector>

#include "nhim/curve.hpp"
#include "nhim/linalg.hpp"
#include "nhim/system.hpp"

namespace nhim {

/// Per-step transition matrices of the linear fiber flow Y' = A(x(t)) Y
/// along a base curve. Each grid step is integrated as two RK4 half-steps;
/// the half-step matrices are kept so that quadrature rules can reach the
/// step midpoints.
class Cocycle {
 public:
  Cocycle() = default;
  Cocycle(TimeGrid grid, int dim, std::vector<Mat> full, std::vector<Mat> half);

  const TimeGrid& grid() const { return grid_; }
  int dim() const { return dim_; }

  /// Psi(t_{i+1}, t_i)
  const Mat& step(int i) const { return full_[i]; }
  /// Psi(t_{i+1}, t_{i+1/2})
  const Mat& half_step(int i) const { return half_[i]; }

  /// Psi(t_j, t_i) for j >= i, as an ordered product of step matrices.
  Mat transition(int i, int j) const;

 private:
  TimeGrid grid_;
  int dim_ = 0;
  std::vector<Mat> full_;
  std::vector<Mat> half_;
};

/// Integrates dx/dt = vx(x, y(t)) backward from x(t_end) = x0 over the whole
/// grid with fixed-step RK4. The returned curve is the continuous lift.
Curve flow_horizontal(const SystemSpec& spec, const Curve& y,
                      std::span<const double> x0, const TimeGrid& grid);

/// Transition matrices of Y' = A(x(t)) Y on the base curve's grid.
Cocycle flow_linear(const SystemSpec& spec, const Curve& x);

/// Trajectory of the full field together with the transition matrices of its
/// linearization (Jacobian by central differences, relative step 1e-6).
/// t_span may be negative; |t_span| must be an integral multiple of h_t.
struct VariationalResult {
  TimeGrid grid;                 // t_0 = 0, dt = sign(t_span) * h_t
  int state_dim = 0;
  std::vector<double> states;    // samples() x state_dim
  std::vector<Mat> transitions;  // samples(); transitions[0] = I

  std::span<const double> state(int i) const {
    return {states.data() + static_cast<std::size_t>(i) * state_dim,
            static_cast<std::size_t>(state_dim)};
  }
};

VariationalResult variational_flow(const SystemSpec& spec,
                                   std::span<const double> z0, double t_span,
                                   double h_t);

}  // namespace nhim
