#pragma once

#include <string>
#include <vector>

#include "nhim/perron.hpp"
#include "nhim/system.hpp"

namespace nhim {

/// Pointwise defect of the invariance equation
///   Dh(x) vx(x, h(x)) - A(x) h(x) - f(x, h(x))
/// with Dh taken by central differences on the periodic grid.
struct ResidualReport {
  double sup = 0.0;
  std::vector<double> node_residuals;  // max-abs component per node
  int stencil_width = 3;
};

ResidualReport invariance_residual(const SystemSpec& spec,
                                   const GraphManifold& manifold,
                                   bool parallel = true);

/// C0 and C1 distances between two graphs: max fiber-value difference and
/// max central-difference gradient difference over the grid. Graphs on
/// different grids are interpolated onto the finer one, keeping the result
/// symmetric in its arguments.
struct ManifoldDistance {
  double c0 = 0.0;
  double c1 = 0.0;
};

ManifoldDistance manifold_distance(const GraphManifold& a,
                                   const GraphManifold& b);

struct SweepEntry {
  double delta = 0.0;
  double dist0 = 0.0;  // C0 distance to the delta = 0 graph
  double dist1 = 0.0;  // C1 distance
  bool ok = false;
  std::string error;
};

/// Solves the manifold for each delta (the list must contain 0, which
/// becomes the reference graph) and reports distances against the
/// reference. Per-delta failures are recorded and the sweep continues.
/// fitted_slope is the log-log slope of dist0 against delta over the
/// successful positive-delta entries.
struct SweepResult {
  std::vector<SweepEntry> entries;
  double fitted_slope = 0.0;
};

SweepResult perturbation_sweep(const SystemSpec& spec,
                               const PerturbationSpec& pert,
                               const std::vector<double>& deltas,
                               const GridShape& grid, const PerronConfig& cfg);

}  // namespace nhim
