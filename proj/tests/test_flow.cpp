#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "nhim/flow.hpp"
#include "nhim/linalg.hpp"
#include "nhim/system.hpp"

using nhim::Cocycle;
using nhim::Curve;
using nhim::Expr;
using nhim::Mat;
using nhim::Symbol;
using nhim::SystemSpec;
using nhim::TimeGrid;

namespace {

// Build specs directly so test fields need not be periodic.
SystemSpec make_1d(const std::string& vx, const std::string& a,
                   const std::string& f) {
  const std::vector<Symbol> syms = {{"x1", 0}, {"y1", 1}};
  return SystemSpec(1, 1, {2 * M_PI}, {parse_expression(vx, syms)},
                    {parse_expression(a, syms)}, {parse_expression(f, syms)},
                    {}, {});
}

}  // namespace

TEST_CASE("horizontal backward flow of a constant field is exact") {
  const SystemSpec s = make_1d("1", "-1", "0");
  const TimeGrid g = TimeGrid::backward_horizon(5.0, 1e-2);
  const Curve y = Curve::zero(g, 1);
  const double x0[] = {0.75};
  const Curve x = nhim::flow_horizontal(s, y, x0, g);
  CHECK(x.back()[0] == 0.75);
  for (int i = 0; i <= g.steps; ++i)
    CHECK(x.at(i)[0] == doctest::Approx(0.75 + g.time(i)).epsilon(1e-14));
}

TEST_CASE("horizontal flow matches the exponential solution") {
  const SystemSpec s = make_1d("x1", "-1", "0");
  const TimeGrid g = TimeGrid::backward_horizon(5.0, 1e-3);
  const Curve y = Curve::zero(g, 1);
  const double x0[] = {1.0};
  const Curve x = nhim::flow_horizontal(s, y, x0, g);
  for (int i = 0; i <= g.steps; i += 500)
    CHECK(x.at(i)[0] ==
          doctest::Approx(std::exp(g.time(i))).epsilon(1e-12));
}

TEST_CASE("horizontal flow reads the fiber curve") {
  // dx/dt = y(t) with y(t) = t  =>  x(t) = x0 + (t^2 - 0)/2 backward from 0.
  const SystemSpec s = make_1d("y1", "-1", "0");
  const TimeGrid g = TimeGrid::backward_horizon(2.0, 1e-3);
  Curve y(g, 1);
  for (int i = 0; i <= g.steps; ++i) y.at(i)[0] = g.time(i);
  const double x0[] = {0.5};
  const Curve x = nhim::flow_horizontal(s, y, x0, g);
  for (int i = 0; i <= g.steps; i += 200)
    CHECK(x.at(i)[0] ==
          doctest::Approx(0.5 + g.time(i) * g.time(i) / 2).epsilon(1e-10));
}

TEST_CASE("blow-up raises IntegrationError with the time") {
  const SystemSpec s = make_1d("1 + x1^2", "-1", "0");
  const TimeGrid g = TimeGrid::backward_horizon(3.0, 1e-3);
  const Curve y = Curve::zero(g, 1);
  const double x0[] = {0.0};
  CHECK_THROWS_AS(nhim::flow_horizontal(s, y, x0, g), nhim::IntegrationError);
}

TEST_CASE("cocycle of a constant coefficient matches the exponential") {
  const SystemSpec s = make_1d("1", "-1", "0");
  const TimeGrid g = TimeGrid::backward_horizon(4.0, 1e-2);
  Curve x(g, 1);
  for (int i = 0; i <= g.steps; ++i) x.at(i)[0] = g.time(i);
  const Cocycle psi = nhim::flow_linear(s, x);
  const Mat full = psi.transition(0, g.steps);
  CHECK(full(0, 0) == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
  const Mat one = psi.step(10);
  CHECK(one(0, 0) == doctest::Approx(std::exp(-1e-2)).epsilon(1e-13));
  const Mat halfstep = psi.half_step(10);
  CHECK(halfstep(0, 0) == doctest::Approx(std::exp(-5e-3)).epsilon(1e-13));
}

TEST_CASE("cocycle composition property") {
  const SystemSpec s = make_1d("1", "-2 - cos(x1)", "0");
  const TimeGrid g = TimeGrid::backward_horizon(3.0, 1e-2);
  Curve x(g, 1);
  for (int i = 0; i <= g.steps; ++i) x.at(i)[0] = 0.4 + g.time(i);
  const Cocycle psi = nhim::flow_linear(s, x);

  const int i = 30, j = 120, k = 290;
  const Mat a = psi.transition(j, k) * psi.transition(i, j);
  const Mat b = psi.transition(i, k);
  CHECK((a - b).max_abs() <= 1e-8);

  // x-dependent rate against the closed-form integral of -(2 + cos).
  auto closed = [&](double t0, double t1) {
    const double xa = 0.4 + t0, xb = 0.4 + t1;
    return std::exp(-(2 * (t1 - t0) + std::sin(xb) - std::sin(xa)));
  };
  const Mat m = psi.transition(i, k);
  CHECK(m(0, 0) == doctest::Approx(closed(g.time(i), g.time(k))).epsilon(1e-9));
}

TEST_CASE("variational flow reproduces the linear system blocks") {
  const SystemSpec s = make_1d("1", "-1", "0.1*cos(x1)").without_inhomogeneity();
  const std::vector<double> z0 = {0.3, 0.0};
  const nhim::VariationalResult fwd = nhim::variational_flow(s, z0, 6.0, 1e-2);
  REQUIRE(fwd.transitions.size() == 601);
  const Mat& last = fwd.transitions.back();
  CHECK(last(0, 0) == 1.0);  // base block stays the identity exactly
  CHECK(last(1, 0) == 0.0);
  CHECK(last(1, 1) == doctest::Approx(std::exp(-6.0)).epsilon(1e-9));

  const nhim::VariationalResult bwd = nhim::variational_flow(s, z0, -6.0, 1e-2);
  CHECK(bwd.transitions.back()(1, 1) ==
        doctest::Approx(std::exp(6.0)).epsilon(1e-9));
  CHECK(bwd.state(600)[0] == doctest::Approx(0.3 - 6.0).epsilon(1e-12));
}

TEST_CASE("variational flow states follow the nonlinear field") {
  // dx/dt = 1, dy/dt = -y + 0.1 cos x: closed-form particular solution.
  const SystemSpec s = make_1d("1", "-1", "0.1*cos(x1)");
  auto h = [](double x) { return 0.05 * (std::cos(x) + std::sin(x)); };
  const std::vector<double> z0 = {0.2, h(0.2)};
  const nhim::VariationalResult r = nhim::variational_flow(s, z0, 8.0, 1e-2);
  const auto zT = r.state(r.grid.steps);
  CHECK(zT[0] == doctest::Approx(8.2).epsilon(1e-12));
  CHECK(zT[1] == doctest::Approx(h(8.2)).epsilon(1e-10));
}

TEST_CASE("order-4 convergence of the flow") {
  const SystemSpec s = make_1d("x1", "-1", "0");
  const double x0[] = {1.0};
  auto err_at = [&](double h) {
    const TimeGrid g = TimeGrid::backward_horizon(2.0, h);
    const Curve x =
        nhim::flow_horizontal(s, Curve::zero(g, 1), x0, g);
    return std::abs(x.at(0)[0] - std::exp(-2.0));
  };
  const double ratio = err_at(0.02) / err_at(0.01);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("variational flow rejects bad spans and steps") {
  const SystemSpec s = make_1d("1", "-1", "0");
  const std::vector<double> z0 = {0.0, 0.0};
  CHECK_THROWS_AS(nhim::variational_flow(s, z0, 1.0, 0.3), nhim::Error);
  CHECK_THROWS_AS(nhim::variational_flow(s, z0, 1.0, -0.1), nhim::Error);
  const std::vector<double> short_z = {0.0};
  CHECK_THROWS_AS(nhim::variational_flow(s, short_z, 1.0, 0.1), nhim::Error);
}
