#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nhim/curve.hpp"
#include "nhim/flow.hpp"
#include "nhim/system.hpp"

namespace nhim {

/// Knobs for the Lyapunov-Perron fixed-point iteration. Defaults put the
/// truncation error of the backward horizon well below the fixed-point
/// tolerance for unit-rate contraction.
struct PerronConfig {
  double horizon = 30.0;
  double step = 1e-3;
  double eta = 0.5;        // admissible sup-norm for fiber curves
  double tol = 1e-10;      // sup-change convergence threshold
  int max_iterations = 50;
  std::optional<Curve> initial_curve;  // empty = zero curve

  TimeGrid grid() const { return TimeGrid::backward_horizon(horizon, step); }
  void validate(int dim_y) const;
};

/// State of the iteration at one base point.
struct PerronState {
  Curve x;  // base history for the final fiber curve
  Curve y;  // fiber curve; the fixed point once converged
  int iterations = 0;
  std::vector<double> distance_history;  // sup-change per iteration
  double contraction_factor = 0.0;       // ratio of the last two changes
  bool converged = false;
};

struct GridShape {
  std::vector<int> nodes_per_axis;
  int total() const;
};

/// The solved graph: fiber values on a regular periodic grid over the base
/// box, with periodic cubic interpolation between nodes.
class GraphManifold {
 public:
  GraphManifold() = default;
  GraphManifold(GridShape shape, std::vector<double> periods, int dim_y,
                std::vector<double> values);

  int dim_x() const { return static_cast<int>(shape_.nodes_per_axis.size()); }
  int dim_y() const { return dim_y_; }
  const GridShape& shape() const { return shape_; }
  const std::vector<double>& periods() const { return periods_; }
  int nodes() const { return shape_.total(); }

  double node_coordinate(int axis, int index) const;
  std::vector<int> unflatten(int flat) const;
  std::vector<double> node_point(int flat) const;
  std::span<const double> value_at(int flat) const;
  std::span<const double> value_at(std::span<const int> idx) const;

  /// Periodic cubic interpolation at an arbitrary base point.
  void eval(std::span<const double> x, std::span<double> out) const;

  double sup_norm() const;
  const std::vector<double>& values() const { return values_; }

 private:
  GridShape shape_;
  std::vector<double> periods_;
  int dim_y_ = 0;
  std::vector<double> values_;  // nodes() x dim_y, lexicographic nodes
};

/// One base sweep of the iteration: the base history curve for a fixed fiber
/// curve, anchored at x(0) = x0 and integrated backward over the grid.
Curve base_history(const SystemSpec& spec, const Curve& y,
                   std::span<const double> x0, const TimeGrid& grid);

/// One fiber sweep: the damped variation-of-constants integral
///   t -> integral over [-horizon, t] of Psi_x(t, tau) f(x(tau), y(tau)) dtau
/// computed with the cocycle and a composite order-4 quadrature on the grid.
/// If eta_limit is set, a result exceeding 2 * eta_limit in sup-norm throws
/// AdmissibilityError ("left admissible neighborhood").
Curve fiber_update(const SystemSpec& spec, const Curve& x, const Curve& y,
                   std::optional<double> eta_limit = {});

/// Iterates y <- fiber_update(base_history(y, x0), y) until the sup-change
/// drops below cfg.tol. Throws ConvergenceError after max_iterations and
/// AdmissibilityError if an iterate leaves the 2*eta neighborhood or the
/// fixed point exceeds eta.
PerronState iterate_fixed_point(const SystemSpec& spec,
                                std::span<const double> x0,
                                const PerronConfig& cfg);

/// Value of the solved graph at the iteration's base point (fixed-point
/// curve at t = 0). Errors if the state has not converged.
std::vector<double> graph_value(const PerronState& state);

/// Solves the fixed point at every grid node. Node solves are independent;
/// the parallel version distributes them over OpenMP threads and produces
/// bit-identical values to the serial reference. Per-node failures are
/// aggregated into a SolveError carrying node coordinates.
GraphManifold solve_manifold(const SystemSpec& spec, const GridShape& grid,
                             const PerronConfig& cfg);
GraphManifold solve_manifold_serial(const SystemSpec& spec,
                                    const GridShape& grid,
                                    const PerronConfig& cfg);

}  // namespace nhim
