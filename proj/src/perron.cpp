#include "nhim/perron.hpp"

#include <cmath>
#include <sstream>

#include "nhim/parallel.hpp"

namespace nhim {

void PerronConfig::validate(int dim_y) const {
  (void)TimeGrid::backward_horizon(horizon, step);
  if (!(eta > 0.0)) throw Error("eta must be positive");
  if (!(tol > 0.0)) throw Error("tolerance must be positive");
  if (max_iterations < 1) throw Error("max_iterations must be at least 1");
  if (initial_curve) {
    if (!(initial_curve->grid() == grid()) || initial_curve->dim() != dim_y)
      throw Error("initial curve does not match the iteration grid");
    if (initial_curve->sup_norm() > eta)
      throw Error("initial curve exceeds the admissible sup-norm eta");
  }
}

int GridShape::total() const {
  if (nodes_per_axis.empty()) throw Error("grid shape is empty");
  int t = 1;
  for (int n : nodes_per_axis) {
    if (n < 1) throw Error("grid shape entries must be positive");
    t *= n;
  }
  return t;
}

GraphManifold::GraphManifold(GridShape shape, std::vector<double> periods,
                             int dim_y, std::vector<double> values)
    : shape_(std::move(shape)),
      periods_(std::move(periods)),
      dim_y_(dim_y),
      values_(std::move(values)) {
  if (periods_.size() != shape_.nodes_per_axis.size())
    throw Error("graph needs one period per axis");
  if (static_cast<int>(values_.size()) != shape_.total() * dim_y_)
    throw Error("graph value count does not match the grid");
}

double GraphManifold::node_coordinate(int axis, int index) const {
  return periods_[axis] * index / shape_.nodes_per_axis[axis];
}

std::vector<int> GraphManifold::unflatten(int flat) const {
  const int d = dim_x();
  std::vector<int> idx(d);
  for (int a = d - 1; a >= 0; --a) {
    idx[a] = flat % shape_.nodes_per_axis[a];
    flat /= shape_.nodes_per_axis[a];
  }
  return idx;
}

std::vector<double> GraphManifold::node_point(int flat) const {
  const std::vector<int> idx = unflatten(flat);
  std::vector<double> x(dim_x());
  for (int a = 0; a < dim_x(); ++a) x[a] = node_coordinate(a, idx[a]);
  return x;
}

std::span<const double> GraphManifold::value_at(int flat) const {
  return {values_.data() + static_cast<std::size_t>(flat) * dim_y_,
          static_cast<std::size_t>(dim_y_)};
}

std::span<const double> GraphManifold::value_at(std::span<const int> idx) const {
  int flat = 0;
  for (int a = 0; a < dim_x(); ++a) {
    int k = idx[a] % shape_.nodes_per_axis[a];
    if (k < 0) k += shape_.nodes_per_axis[a];
    flat = flat * shape_.nodes_per_axis[a] + k;
  }
  return value_at(flat);
}

void GraphManifold::eval(std::span<const double> x,
                         std::span<double> out) const {
  const int d = dim_x();
  int base[kMaxAxisDim];
  double weights[kMaxAxisDim][4];
  for (int a = 0; a < d; ++a) {
    const int n = shape_.nodes_per_axis[a];
    const double s = x[a] / periods_[a] * n;
    double fl = std::floor(s);
    const double u = s - fl;
    base[a] = static_cast<int>(fl);
    weights[a][0] = -u * (u - 1.0) * (u - 2.0) / 6.0;
    weights[a][1] = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    weights[a][2] = -(u + 1.0) * u * (u - 2.0) / 2.0;
    weights[a][3] = (u + 1.0) * u * (u - 1.0) / 6.0;
  }
  for (int c = 0; c < dim_y_; ++c) out[c] = 0.0;

  const int combos = 1 << (2 * d);  // 4^d stencil corners
  std::vector<int> idx(d);
  for (int combo = 0; combo < combos; ++combo) {
    double w = 1.0;
    int rest = combo;
    for (int a = 0; a < d; ++a) {
      const int o = rest & 3;
      rest >>= 2;
      w *= weights[a][o];
      idx[a] = base[a] + o - 1;
    }
    auto v = value_at(idx);
    for (int c = 0; c < dim_y_; ++c) out[c] += w * v[c];
  }
}

double GraphManifold::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Curve base_history(const SystemSpec& spec, const Curve& y,
                   std::span<const double> x0, const TimeGrid& grid) {
  return flow_horizontal(spec, y, x0, grid);
}

Curve fiber_update(const SystemSpec& spec, const Curve& x, const Curve& y,
                   std::optional<double> eta_limit) {
  const TimeGrid& grid = x.grid();
  if (!(y.grid() == grid)) throw Error("curve grids differ in fiber update");
  const int dy = spec.dim_y();
  if (y.dim() != dy || x.dim() != spec.dim_x())
    throw Error("dimension mismatch in fiber update");

  const Cocycle cocycle = flow_linear(spec, x);
  const double h = grid.dt;

  Curve out(grid, dy);
  std::vector<double> acc(dy, 0.0), f_left(dy), f_mid(dy), f_right(dy),
      xm(spec.dim_x()), ym(dy), tmp(dy);

  spec.eval_nonlinear(x.at(0), y.at(0), f_left);
  for (int i = 0; i < grid.steps; ++i) {
    const double tm = grid.time(i) + 0.5 * h;
    x.eval(tm, xm);
    y.eval(tm, ym);
    spec.eval_nonlinear(xm, ym, f_mid);
    spec.eval_nonlinear(x.at(i + 1), y.at(i + 1), f_right);

    // Simpson over [t_i, t_{i+1}] of Psi(t_{i+1}, tau) f(tau), then push the
    // running integral through the step transition.
    for (int c = 0; c < dy; ++c) tmp[c] = acc[c] + (h / 6.0) * f_left[c];
    cocycle.step(i).apply(tmp, acc);
    cocycle.half_step(i).apply(f_mid, tmp);
    for (int c = 0; c < dy; ++c)
      acc[c] += (4.0 * h / 6.0) * tmp[c] + (h / 6.0) * f_right[c];

    auto sample = out.at(i + 1);
    double sup = 0.0;
    for (int c = 0; c < dy; ++c) {
      if (!std::isfinite(acc[c]))
        throw IntegrationError("fiber update became non-finite",
                               grid.time(i + 1));
      sample[c] = acc[c];
      sup = std::max(sup, std::abs(acc[c]));
    }
    if (eta_limit && sup > 2.0 * *eta_limit)
      throw AdmissibilityError(
          "left admissible neighborhood: |y| exceeded 2 eta at t = " +
          std::to_string(grid.time(i + 1)));
    std::swap(f_left, f_right);
  }
  return out;
}

PerronState iterate_fixed_point(const SystemSpec& spec,
                                std::span<const double> x0,
                                const PerronConfig& cfg) {
  cfg.validate(spec.dim_y());
  const TimeGrid grid = cfg.grid();

  PerronState st;
  st.y = cfg.initial_curve ? *cfg.initial_curve
                           : Curve::zero(grid, spec.dim_y());

  for (int k = 0; k < cfg.max_iterations; ++k) {
    st.x = base_history(spec, st.y, x0, grid);
    Curve next = fiber_update(spec, st.x, st.y, cfg.eta);
    const double d = Curve::sup_distance(next, st.y);
    st.distance_history.push_back(d);
    st.y = std::move(next);
    st.iterations = k + 1;
    if (d < cfg.tol) {
      st.converged = true;
      break;
    }
  }

  const std::size_t n = st.distance_history.size();
  if (n >= 2 && st.distance_history[n - 2] > 0.0)
    st.contraction_factor = st.distance_history[n - 1] /
                            st.distance_history[n - 2];

  if (!st.converged) {
    std::ostringstream os;
    os << "fixed-point iteration did not converge in " << cfg.max_iterations
       << " iterations; sup-changes:";
    for (double d : st.distance_history) os << ' ' << d;
    throw ConvergenceError(os.str(), st.distance_history);
  }
  if (st.y.sup_norm() > cfg.eta)
    throw AdmissibilityError(
        "fixed point exceeds the admissible sup-norm eta");
  return st;
}

std::vector<double> graph_value(const PerronState& state) {
  if (!state.converged)
    throw Error("graph value requested from a non-converged state");
  auto v = state.y.back();
  return std::vector<double>(v.begin(), v.end());
}

namespace {

GraphManifold solve_impl(const SystemSpec& spec, const GridShape& grid,
                         const PerronConfig& cfg, bool parallel) {
  cfg.validate(spec.dim_y());
  if (static_cast<int>(grid.nodes_per_axis.size()) != spec.dim_x())
    throw Error("grid shape must have one entry per base axis");
  const int nodes = grid.total();
  const int dy = spec.dim_y();

  std::vector<double> values(static_cast<std::size_t>(nodes) * dy);
  std::vector<std::string> errors(nodes);

  GraphManifold layout(grid, spec.periods(), dy,
                       std::vector<double>(values.size(), 0.0));

  parallel_for(
      nodes,
      [&](std::ptrdiff_t flat) {
        try {
          const std::vector<double> x0 = layout.node_point(static_cast<int>(flat));
          const PerronState st = iterate_fixed_point(spec, x0, cfg);
          const std::vector<double> h = graph_value(st);
          std::copy(h.begin(), h.end(),
                    values.begin() + static_cast<std::size_t>(flat) * dy);
        } catch (const std::exception& e) {
          errors[flat] = e.what();
        }
      },
      parallel);

  std::vector<NodeFailure> failures;
  for (int i = 0; i < nodes; ++i)
    if (!errors[i].empty())
      failures.push_back({layout.node_point(i), errors[i]});
  if (!failures.empty()) {
    std::ostringstream os;
    os << failures.size() << " of " << nodes << " grid nodes failed";
    throw SolveError(os.str(), std::move(failures));
  }
  return GraphManifold(grid, spec.periods(), dy, std::move(values));
}

}  // namespace

GraphManifold solve_manifold(const SystemSpec& spec, const GridShape& grid,
                             const PerronConfig& cfg) {
  return solve_impl(spec, grid, cfg, true);
}

GraphManifold solve_manifold_serial(const SystemSpec& spec,
                                    const GridShape& grid,
                                    const PerronConfig& cfg) {
  return solve_impl(spec, grid, cfg, false);
}

}  // namespace nhim
