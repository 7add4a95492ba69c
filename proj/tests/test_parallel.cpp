#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <vector>

#include "nhim/parallel.hpp"
#include "nhim/rates.hpp"
#include "nhim/verify.hpp"

using nhim::GraphManifold;
using nhim::GridShape;
using nhim::SystemSpec;

namespace {

SystemSpec make_coupled() {
  const std::vector<nhim::Symbol> syms = {{"x1", 0}, {"y1", 1}};
  return SystemSpec(1, 1, {2 * M_PI},
                    {parse_expression("1 + 0.2*sin(x1)*y1", syms)},
                    {parse_expression("-1.5 - 0.5*cos(x1)", syms)},
                    {parse_expression("0.1*cos(x1)", syms)}, {}, {});
}

}  // namespace

TEST_CASE("parallel_for visits every index exactly once") {
  const std::ptrdiff_t n = 1000;
  std::vector<std::atomic<int>> hits(n);
  nhim::parallel_for(n, [&](std::ptrdiff_t i) { hits[i].fetch_add(1); });
  for (std::ptrdiff_t i = 0; i < n; ++i) CHECK(hits[i].load() == 1);

  std::atomic<int> serial_hits{0};
  nhim::parallel_for(7, [&](std::ptrdiff_t) { serial_hits.fetch_add(1); },
                     false);
  CHECK(serial_hits.load() == 7);
  nhim::parallel_for(0, [&](std::ptrdiff_t) { serial_hits.fetch_add(1); });
  CHECK(serial_hits.load() == 7);
}

TEST_CASE("parallel and serial solves agree bit for bit") {
  const SystemSpec s = make_coupled();
  GridShape grid;
  grid.nodes_per_axis = {8};
  nhim::PerronConfig cfg;
  cfg.horizon = 10.0;
  cfg.step = 1e-2;
  const GraphManifold par = nhim::solve_manifold(s, grid, cfg);
  const GraphManifold ser = nhim::solve_manifold_serial(s, grid, cfg);
  for (int i = 0; i < grid.total(); ++i)
    CHECK(par.value_at(i)[0] == ser.value_at(i)[0]);
}

TEST_CASE("parallel and serial rate estimates agree bit for bit") {
  const SystemSpec s = make_coupled();
  const auto pts = nhim::default_base_points(s, 4);
  nhim::RateSampleSeries sp, ss;
  const nhim::RateEstimate par = nhim::estimate_rates(s, pts, 10.0, 1e-2, &sp, true);
  const nhim::RateEstimate ser = nhim::estimate_rates(s, pts, 10.0, 1e-2, &ss, false);
  CHECK(par.rho_tangential == ser.rho_tangential);
  CHECK(par.rho_stable == ser.rho_stable);
  CHECK(par.c_tangential == ser.c_tangential);
  CHECK(par.c_stable == ser.c_stable);
  REQUIRE(sp.tangential.size() == ss.tangential.size());
  for (size_t p = 0; p < sp.tangential.size(); ++p) {
    CHECK(sp.tangential[p] == ss.tangential[p]);
    CHECK(sp.stable[p] == ss.stable[p]);
  }
}

TEST_CASE("parallel and serial residuals agree bit for bit") {
  const SystemSpec s = make_coupled();
  GridShape grid;
  grid.nodes_per_axis = {16};
  nhim::PerronConfig cfg;
  cfg.horizon = 10.0;
  cfg.step = 1e-2;
  const GraphManifold m = nhim::solve_manifold(s, grid, cfg);
  const nhim::ResidualReport par = nhim::invariance_residual(s, m, true);
  const nhim::ResidualReport ser = nhim::invariance_residual(s, m, false);
  CHECK(par.sup == ser.sup);
  REQUIRE(par.node_residuals.size() == ser.node_residuals.size());
  for (size_t i = 0; i < par.node_residuals.size(); ++i)
    CHECK(par.node_residuals[i] == ser.node_residuals[i]);
}
