#include "nhim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nhim/linalg.hpp"
#include "nhim/parallel.hpp"

namespace nhim {

namespace {

void check_compatible(const SystemSpec& spec, const GraphManifold& m) {
  if (m.dim_x() != spec.dim_x() || m.dim_y() != spec.dim_y())
    throw Error("graph dimensions do not match the system");
  for (int a = 0; a < spec.dim_x(); ++a)
    if (m.periods()[a] != spec.periods()[a])
      throw Error("graph periods do not match the system");
}

// Max-abs-entry difference of the central-difference gradients at one node.
void node_gradient(const GraphManifold& m, std::span<const int> idx,
                   std::vector<double>& grad) {
  const int dx = m.dim_x(), dy = m.dim_y();
  std::vector<int> nb(idx.begin(), idx.end());
  for (int a = 0; a < dx; ++a) {
    const double spacing = m.periods()[a] / m.shape().nodes_per_axis[a];
    nb[a] = idx[a] + 1;
    auto hp = m.value_at(nb);
    nb[a] = idx[a] - 1;
    auto hm = m.value_at(nb);
    nb[a] = idx[a];
    for (int c = 0; c < dy; ++c)
      grad[c * dx + a] = (hp[c] - hm[c]) / (2.0 * spacing);
  }
}

}  // namespace

ResidualReport invariance_residual(const SystemSpec& spec,
                                   const GraphManifold& manifold,
                                   bool parallel) {
  check_compatible(spec, manifold);
  for (int n : manifold.shape().nodes_per_axis)
    if (n < 5) throw Error("residual check needs at least 5 nodes per axis");

  const int dx = spec.dim_x(), dy = spec.dim_y();
  const int nodes = manifold.shape().total();

  ResidualReport rep;
  rep.node_residuals.resize(nodes);
  std::vector<std::string> errors(nodes);

  parallel_for(
      nodes,
      [&](std::ptrdiff_t flat) {
        try {
          const std::vector<int> idx =
              manifold.unflatten(static_cast<int>(flat));
          const std::vector<double> x =
              manifold.node_point(static_cast<int>(flat));
          auto h = manifold.value_at(static_cast<int>(flat));

          std::vector<double> grad(static_cast<std::size_t>(dy) * dx);
          node_gradient(manifold, idx, grad);

          std::vector<double> vx(dx), fy(dy), ah(dy);
          spec.eval_horizontal(x, h, vx);
          spec.eval_nonlinear(x, h, fy);
          Mat a(dy);
          spec.eval_linear(x, a);
          a.apply(h, ah);

          double worst = 0.0;
          for (int c = 0; c < dy; ++c) {
            double r = -ah[c] - fy[c];
            for (int ax = 0; ax < dx; ++ax) r += grad[c * dx + ax] * vx[ax];
            if (!std::isfinite(r)) {
              worst = std::numeric_limits<double>::quiet_NaN();
              break;
            }
            worst = std::max(worst, std::abs(r));
          }
          rep.node_residuals[flat] = worst;
        } catch (const std::exception& e) {
          errors[flat] = e.what();
          rep.node_residuals[flat] = std::numeric_limits<double>::quiet_NaN();
        }
      },
      parallel);

  for (const std::string& e : errors)
    if (!e.empty()) throw Error("residual evaluation failed: " + e);
  for (double r : rep.node_residuals)
    if (!std::isfinite(r))
      throw Error("residual is non-finite at a grid node");
  rep.sup = *std::max_element(rep.node_residuals.begin(),
                              rep.node_residuals.end());
  return rep;
}

namespace {

GraphManifold resample(const GraphManifold& g, const GridShape& target) {
  if (g.shape().nodes_per_axis == target.nodes_per_axis) return g;
  const int dy = g.dim_y();
  std::vector<double> values(static_cast<std::size_t>(target.total()) * dy);
  GraphManifold layout(target, g.periods(), dy,
                       std::vector<double>(values.size(), 0.0));
  std::vector<double> out(dy);
  for (int flat = 0; flat < target.total(); ++flat) {
    g.eval(layout.node_point(flat), out);
    std::copy(out.begin(), out.end(),
              values.begin() + static_cast<std::size_t>(flat) * dy);
  }
  return GraphManifold(target, g.periods(), dy, std::move(values));
}

}  // namespace

ManifoldDistance manifold_distance(const GraphManifold& a,
                                   const GraphManifold& b) {
  if (a.dim_x() != b.dim_x() || a.dim_y() != b.dim_y())
    throw Error("graphs have different dimensions");
  for (int ax = 0; ax < a.dim_x(); ++ax)
    if (a.periods()[ax] != b.periods()[ax])
      throw Error("graphs have different periods");

  GridShape finer;
  for (int ax = 0; ax < a.dim_x(); ++ax)
    finer.nodes_per_axis.push_back(std::max(a.shape().nodes_per_axis[ax],
                                            b.shape().nodes_per_axis[ax]));
  const GraphManifold ra = resample(a, finer);
  const GraphManifold rb = resample(b, finer);

  const int dx = a.dim_x(), dy = a.dim_y();
  ManifoldDistance d;
  std::vector<double> ga(static_cast<std::size_t>(dy) * dx), gb(ga.size());
  for (int flat = 0; flat < finer.total(); ++flat) {
    auto va = ra.value_at(flat);
    auto vb = rb.value_at(flat);
    for (int c = 0; c < dy; ++c)
      d.c0 = std::max(d.c0, std::abs(va[c] - vb[c]));
    const std::vector<int> idx = ra.unflatten(flat);
    node_gradient(ra, idx, ga);
    node_gradient(rb, idx, gb);
    for (std::size_t k = 0; k < ga.size(); ++k)
      d.c1 = std::max(d.c1, std::abs(ga[k] - gb[k]));
  }
  return d;
}

SweepResult perturbation_sweep(const SystemSpec& spec,
                               const PerturbationSpec& pert,
                               const std::vector<double>& deltas,
                               const GridShape& grid,
                               const PerronConfig& cfg) {
  if (std::find(deltas.begin(), deltas.end(), 0.0) == deltas.end())
    throw Error("delta sweep must include 0 as the reference");

  const GraphManifold reference = solve_manifold(spec, grid, cfg);

  SweepResult result;
  result.entries.resize(deltas.size());
  parallel_for(static_cast<std::ptrdiff_t>(deltas.size()),
               [&](std::ptrdiff_t i) {
                 SweepEntry& entry = result.entries[i];
                 entry.delta = deltas[i];
                 if (entry.delta == 0.0) {
                   entry.ok = true;
                   return;
                 }
                 try {
                   PerturbationSpec scaled = pert;
                   scaled.delta = entry.delta;
                   const GraphManifold g = solve_manifold_serial(
                       apply_perturbation(spec, scaled), grid, cfg);
                   const ManifoldDistance dist =
                       manifold_distance(g, reference);
                   entry.dist0 = dist.c0;
                   entry.dist1 = dist.c1;
                   entry.ok = true;
                 } catch (const std::exception& e) {
                   entry.error = e.what();
                 }
               });

  std::vector<double> lx, ly;
  for (const SweepEntry& e : result.entries)
    if (e.ok && e.delta > 0.0 && e.dist0 > 0.0) {
      lx.push_back(std::log(e.delta));
      ly.push_back(std::log(e.dist0));
    }
  if (lx.size() >= 2) result.fitted_slope = fit_line(lx, ly).slope;
  return result;
}

}  // namespace nhim
