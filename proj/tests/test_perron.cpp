#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "nhim/perron.hpp"
#include "nhim/random.hpp"

using nhim::Curve;
using nhim::GraphManifold;
using nhim::GridShape;
using nhim::PerronConfig;
using nhim::PerronState;
using nhim::SystemSpec;
using nhim::TimeGrid;

namespace {

SystemSpec make_1d(const std::string& vx, const std::string& a,
                   const std::string& f) {
  const std::vector<nhim::Symbol> syms = {{"x1", 0}, {"y1", 1}};
  return SystemSpec(1, 1, {2 * M_PI}, {parse_expression(vx, syms)},
                    {parse_expression(a, syms)}, {parse_expression(f, syms)},
                    {}, {});
}

SystemSpec linear_system() { return make_1d("1", "-1", "0.1*cos(x1)"); }

SystemSpec coupled_system() {
  return make_1d("1 + 0.1*sin(x1)*y1", "-2 - cos(x1)",
                 "0.1*cos(x1) + 0.05*y1^2");
}

double closed_form(double x) { return 0.05 * (std::cos(x) + std::sin(x)); }

Curve random_admissible(const TimeGrid& g, double bound, std::uint64_t seed) {
  nhim::Rng rng(seed);
  Curve c(g, 1);
  for (int i = 0; i <= g.steps; ++i) c.at(i)[0] = rng.uniform(-bound, bound);
  return c;
}

}  // namespace

TEST_CASE("fiber update reproduces the closed-form graph away from cutoff") {
  const SystemSpec s = linear_system();
  const TimeGrid g = TimeGrid::backward_horizon(30.0, 1e-3);
  const double x0 = 0.8;
  Curve x(g, 1), y(g, 1);
  for (int i = 0; i <= g.steps; ++i) {
    x.at(i)[0] = x0 + g.time(i);
    y.at(i)[0] = closed_form(x0 + g.time(i));
  }
  const Curve out = nhim::fiber_update(s, x, y);
  CHECK(out.back()[0] == doctest::Approx(closed_form(x0)).epsilon(1e-12));
  // truncation decays like e^{-(t - t0)} toward the curve start
  for (int i : {25000, 27000, 30000})
    CHECK(out.at(i)[0] ==
          doctest::Approx(closed_form(x0 + g.time(i))).epsilon(1e-11));
}

TEST_CASE("fixed point of the solvable system in two iterations") {
  const SystemSpec s = linear_system();
  PerronConfig cfg;
  const double x0[] = {0.8};
  const PerronState st = nhim::iterate_fixed_point(s, x0, cfg);
  CHECK(st.converged);
  CHECK(st.iterations == 2);
  CHECK(st.contraction_factor == 0.0);
  REQUIRE(st.distance_history.size() == 2);
  CHECK(st.distance_history[1] == 0.0);
  const std::vector<double> h = nhim::graph_value(st);
  CHECK(h[0] == doctest::Approx(closed_form(0.8)).epsilon(1e-12));
}

TEST_CASE("zero forcing gives the zero fixed point after one iteration") {
  for (const SystemSpec& s :
       {make_1d("1", "-1", "0"),
        make_1d("1 + 0.1*sin(x1)*y1", "-2 - cos(x1)", "0")}) {
    PerronConfig cfg;
    cfg.horizon = 10.0;
    cfg.step = 1e-2;
    const double x0[] = {1.3};
    const PerronState st = nhim::iterate_fixed_point(s, x0, cfg);
    CHECK(st.iterations == 1);
    CHECK(st.y.sup_norm() == 0.0);
    CHECK(nhim::graph_value(st)[0] == 0.0);
  }
}

TEST_CASE("random admissible starts converge to the same fixed point") {
  const SystemSpec s = coupled_system();
  PerronConfig cfg;
  cfg.horizon = 15.0;
  cfg.step = 1e-2;
  const double x0[] = {2.1};

  std::vector<double> endpoints;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PerronConfig c = cfg;
    c.initial_curve = random_admissible(c.grid(), 0.4, seed);
    const PerronState st = nhim::iterate_fixed_point(s, x0, c);
    CHECK(st.converged);
    CHECK(st.contraction_factor < 1.0);
    endpoints.push_back(nhim::graph_value(st)[0]);
  }
  for (double v : endpoints)
    CHECK(v == doctest::Approx(endpoints[0]).scale(1.0).epsilon(1e-10));
}

TEST_CASE("perron map contracts admissible pairs") {
  const SystemSpec s = coupled_system();
  const TimeGrid g = TimeGrid::backward_horizon(10.0, 1e-2);
  const double x0[] = {0.6};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Curve y1 = random_admissible(g, 0.4, 2 * seed + 1);
    const Curve y2 = random_admissible(g, 0.4, 2 * seed + 2);
    const Curve t1 =
        nhim::fiber_update(s, nhim::base_history(s, y1, x0, g), y1);
    const Curve t2 =
        nhim::fiber_update(s, nhim::base_history(s, y2, x0, g), y2);
    const double q =
        Curve::sup_distance(t1, t2) / Curve::sup_distance(y1, y2);
    worst = std::max(worst, q);
  }
  CHECK(worst < 1.0);
}

TEST_CASE("iteration budget exhaustion raises ConvergenceError") {
  const SystemSpec s = coupled_system();
  PerronConfig cfg;
  cfg.horizon = 10.0;
  cfg.step = 1e-2;
  cfg.max_iterations = 1;
  const double x0[] = {0.0};
  try {
    nhim::iterate_fixed_point(s, x0, cfg);
    FAIL("expected ConvergenceError");
  } catch (const nhim::ConvergenceError& e) {
    CHECK(e.distance_history.size() == 1);
    CHECK(e.distance_history[0] > 0.0);
  }
}

TEST_CASE("fiber update enforces the 2-eta neighborhood") {
  const SystemSpec s = make_1d("1", "-1", "10*cos(x1)");
  const TimeGrid g = TimeGrid::backward_horizon(10.0, 1e-2);
  Curve x(g, 1);
  for (int i = 0; i <= g.steps; ++i) x.at(i)[0] = g.time(i);
  const Curve y = Curve::zero(g, 1);
  try {
    nhim::fiber_update(s, x, y, 0.5);
    FAIL("expected AdmissibilityError");
  } catch (const nhim::AdmissibilityError& e) {
    CHECK(std::string(e.what()).find("left admissible neighborhood") !=
          std::string::npos);
  }
  CHECK_NOTHROW(nhim::fiber_update(s, x, y));  // no limit, no throw
}

TEST_CASE("config validation") {
  const SystemSpec s = linear_system();
  PerronConfig cfg;
  cfg.eta = 0.0;
  CHECK_THROWS_AS(cfg.validate(1), nhim::Error);
  cfg = PerronConfig{};
  cfg.tol = -1.0;
  CHECK_THROWS_AS(cfg.validate(1), nhim::Error);
  cfg = PerronConfig{};
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(1), nhim::Error);
  cfg = PerronConfig{};
  cfg.horizon = 1.0;
  cfg.step = 0.3;
  CHECK_THROWS_AS(cfg.validate(1), nhim::Error);
  cfg = PerronConfig{};
  cfg.initial_curve = Curve::zero({0.0, 0.1, 10}, 1);
  CHECK_THROWS_AS(cfg.validate(1), nhim::Error);  // wrong grid
  cfg = PerronConfig{};
  Curve big(cfg.grid(), 1);
  for (int i = 0; i <= big.grid().steps; ++i) big.at(i)[0] = 0.9;
  cfg.initial_curve = big;
  CHECK_THROWS_AS(cfg.validate(1), nhim::Error);  // exceeds eta
}

TEST_CASE("graph value requires convergence") {
  PerronState st;
  CHECK_THROWS_AS(nhim::graph_value(st), nhim::Error);
}

TEST_CASE("graph manifold indexing is lexicographic with wrap-around") {
  GridShape shape;
  shape.nodes_per_axis = {4, 8};
  std::vector<double> values(32);
  for (int i = 0; i < 32; ++i) values[i] = i;
  const GraphManifold m(shape, {2 * M_PI, 4.0}, 1, values);
  CHECK(m.dim_x() == 2);
  CHECK(m.shape().total() == 32);

  const std::vector<int> idx = m.unflatten(13);
  CHECK(idx[0] == 1);
  CHECK(idx[1] == 5);
  const std::vector<double> p = m.node_point(13);
  CHECK(p[0] == doctest::Approx(2 * M_PI / 4).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(4.0 * 5 / 8).epsilon(1e-15));
  CHECK(m.value_at(13)[0] == 13.0);

  const int wrapped[] = {-3, 21};  // == (1, 5) mod shape
  CHECK(m.value_at(wrapped)[0] == 13.0);
  CHECK(m.sup_norm() == 31.0);
}

TEST_CASE("graph manifold interpolation") {
  GridShape shape;
  shape.nodes_per_axis = {64};
  std::vector<double> values(64);
  for (int i = 0; i < 64; ++i) values[i] = std::cos(2 * M_PI * i / 64);
  const GraphManifold m(shape, {2 * M_PI}, 1, values);

  std::vector<double> out(1);
  for (double x = 0.0; x < 2 * M_PI; x += 0.217) {
    const double xv[] = {x};
    m.eval(xv, out);
    CHECK(out[0] == doctest::Approx(std::cos(x)).scale(1.0).epsilon(2e-6));
  }
  const double left[] = {-0.3}, right[] = {2 * M_PI - 0.3};
  std::vector<double> a(1), b(1);
  m.eval(left, a);
  m.eval(right, b);
  CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-10));

  // constants are reproduced exactly
  const GraphManifold flat(shape, {2 * M_PI}, 1,
                           std::vector<double>(64, 0.25));
  const double xv[] = {1.2345};
  flat.eval(xv, out);
  CHECK(out[0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("solve over a coarse grid matches the closed form") {
  const SystemSpec s = linear_system();
  GridShape grid;
  grid.nodes_per_axis = {8};
  PerronConfig cfg;
  cfg.horizon = 25.0;
  cfg.step = 1e-2;
  const GraphManifold m = nhim::solve_manifold(s, grid, cfg);
  for (int k = 0; k < 8; ++k)
    CHECK(m.value_at(k)[0] ==
          doctest::Approx(closed_form(2 * M_PI * k / 8)).epsilon(1e-6));
}

TEST_CASE("per-node failures are aggregated into SolveError") {
  const SystemSpec s = make_1d("1", "-1", "10*cos(x1)");
  GridShape grid;
  grid.nodes_per_axis = {4};
  PerronConfig cfg;
  cfg.horizon = 10.0;
  cfg.step = 1e-2;
  try {
    nhim::solve_manifold(s, grid, cfg);
    FAIL("expected SolveError");
  } catch (const nhim::SolveError& e) {
    CHECK(e.failures.size() == 4);
    CHECK(e.failures[1].node[0] == doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(e.failures[0].message.find("left admissible neighborhood") !=
          std::string::npos);
  }
}
