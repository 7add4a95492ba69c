#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "nhim/linalg.hpp"
#include "nhim/system.hpp"

using nhim::parse_perturbation;
using nhim::parse_system;
using nhim::SystemSpec;

namespace {

const char* kLinear = R"(
# circle rotation with one contracting fiber
dim_x = 1
dim_y = 1
param eps = 0.1
vx1 = 1
A11 = -1
f1 = eps * cos(x1)
)";

std::string msg_of(const std::exception& e) { return e.what(); }

}  // namespace

TEST_CASE("parse the one-fiber circle system") {
  const SystemSpec s = parse_system(kLinear);
  CHECK(s.dim_x() == 1);
  CHECK(s.dim_y() == 1);
  CHECK(s.dim() == 2);
  REQUIRE(s.periods().size() == 1);
  CHECK(s.periods()[0] == doctest::Approx(2 * M_PI).epsilon(1e-15));

  const double x[] = {M_PI / 2};
  const double y[] = {0.25};
  std::vector<double> out(1);
  s.eval_horizontal(x, y, out);
  CHECK(out[0] == 1.0);
  s.eval_nonlinear(x, y, out);
  CHECK(out[0] == doctest::Approx(0.1 * std::cos(M_PI / 2)).epsilon(1e-15));
  nhim::Mat a(1);
  s.eval_linear(x, a);
  CHECK(a(0, 0) == -1.0);

  std::vector<double> z = {M_PI / 2, 0.25}, field(2);
  s.eval_field(z, field);
  CHECK(field[0] == 1.0);
  CHECK(field[1] ==
        doctest::Approx(-0.25 + 0.1 * std::cos(M_PI / 2)).epsilon(1e-15));
}

TEST_CASE("aliases, explicit periods, defaults") {
  const SystemSpec s = parse_system(
      "dx = 2\ndy = 1\nperiod_1 = 1\nvx1 = 0.25\nvx2 = 0.5\nA11 = -1\nf1 = "
      "0.1*cos(2*pi*x1)*sin(x2)\n");
  CHECK(s.dim_x() == 2);
  CHECK(s.periods()[0] == 1.0);
  CHECK(s.periods()[1] == doctest::Approx(2 * M_PI).epsilon(1e-15));
}

TEST_CASE("A defaults to zero when entries are omitted") {
  const SystemSpec s = parse_system(
      "dim_x = 1\ndim_y = 2\nvx1 = 1\nA11 = -1\nA22 = -2\nf1 = 0\nf2 = 0\n");
  nhim::Mat a(2);
  const double x[] = {0.5};
  s.eval_linear(x, a);
  CHECK(a(0, 1) == 0.0);
  CHECK(a(1, 0) == 0.0);
  CHECK(a(0, 0) == -1.0);
  CHECK(a(1, 1) == -2.0);
}

TEST_CASE("parse rejections") {
  CHECK_THROWS_AS(parse_system("dim_x = 1\ndim_y = 1\nvx1 = 1\nA11 = -1\n"),
                  nhim::ParseError);  // missing f1
  try {
    parse_system("dim_x = 1\ndim_y = 1\nvx1 = 1\nA11 = -1\n");
  } catch (const nhim::ParseError& e) {
    CHECK(msg_of(e).find("missing f1") != std::string::npos);
  }
  // missing vx1
  CHECK_THROWS_AS(parse_system("dim_x = 1\ndim_y = 1\nA11 = -1\nf1 = 0\n"),
                  nhim::ParseError);
  // duplicate key
  CHECK_THROWS_AS(
      parse_system("dim_x = 1\ndim_y = 1\nvx1 = 1\nvx1 = 2\nA11 = -1\nf1 = 0\n"),
      nhim::ParseError);
  // unknown key
  CHECK_THROWS_AS(
      parse_system("dim_x = 1\ndim_y = 1\nvx1 = 1\nA11 = -1\nf1 = 0\nzz = 1\n"),
      nhim::ParseError);
  // out-of-range equation index
  CHECK_THROWS_AS(
      parse_system("dim_x = 1\ndim_y = 1\nvx2 = 1\nvx1 = 1\nA11 = -1\nf1 = 0\n"),
      nhim::ParseError);
  // dimension bounds
  CHECK_THROWS_AS(parse_system("dim_x = 0\ndim_y = 1\nf1 = 0\nA11 = -1\n"),
                  nhim::Error);
  // reserved parameter name
  CHECK_THROWS_AS(
      parse_system(
          "dim_x = 1\ndim_y = 1\nparam pi = 3\nvx1 = 1\nA11 = -1\nf1 = 0\n"),
      nhim::ParseError);
  // malformed line
  CHECK_THROWS_AS(parse_system("dim_x\n"), nhim::ParseError);
  // y appearing in vx is allowed, y in A is not
  CHECK_NOTHROW(parse_system(
      "dim_x = 1\ndim_y = 1\nvx1 = 1 + 0*y1\nA11 = -1\nf1 = 0\n"));
  CHECK_THROWS_AS(
      parse_system("dim_x = 1\ndim_y = 1\nvx1 = 1\nA11 = -1 + 0*y1\nf1 = 0\n"),
      nhim::ParseError);
}

TEST_CASE("validation catches non-periodic and non-finite fields") {
  try {
    parse_system("dim_x = 1\ndim_y = 1\nvx1 = x1\nA11 = -1\nf1 = 0\n");
    FAIL("expected a periodicity error");
  } catch (const nhim::Error& e) {
    CHECK(msg_of(e).find("periodic") != std::string::npos);
  }
  CHECK_THROWS_AS(
      parse_system(
          "dim_x = 1\ndim_y = 1\nvx1 = 1\nA11 = -1\nf1 = sqrt(0 - 1 - x1^2)\n"),
      nhim::Error);
}

TEST_CASE("perturbation parse and apply") {
  const SystemSpec base = parse_system(kLinear);
  const nhim::PerturbationSpec p =
      parse_perturbation("delta = 0.5\ndf1 = cos(x1)\ndvx1 = sin(x1)\n", base);
  CHECK(p.delta == 0.5);

  const SystemSpec pert = apply_perturbation(base, p);
  const double x[] = {0.7};
  const double y[] = {0.1};
  std::vector<double> a(1), b(1);
  base.eval_nonlinear(x, y, a);
  pert.eval_nonlinear(x, y, b);
  CHECK(b[0] == doctest::Approx(a[0] + 0.5 * std::cos(0.7)).epsilon(1e-15));
  base.eval_horizontal(x, y, a);
  pert.eval_horizontal(x, y, b);
  CHECK(b[0] == doctest::Approx(a[0] + 0.5 * std::sin(0.7)).epsilon(1e-15));
}

TEST_CASE("zero-delta perturbation leaves the system bit-identical") {
  const SystemSpec base = parse_system(kLinear);
  nhim::PerturbationSpec p =
      parse_perturbation("delta = 0\ndf1 = cos(x1)\n", base);
  const SystemSpec same = apply_perturbation(base, p);
  for (double x = -9.0; x < 9.0; x += 0.37) {
    const double xv[] = {x};
    const double yv[] = {0.3};
    std::vector<double> a(1), b(1);
    base.eval_nonlinear(xv, yv, a);
    same.eval_nonlinear(xv, yv, b);
    CHECK(a[0] == b[0]);
  }
}

TEST_CASE("perturbation rejections") {
  const SystemSpec base = parse_system(kLinear);
  CHECK_THROWS_AS(parse_perturbation("delta = -0.1\ndf1 = 0\n", base),
                  nhim::ParseError);
  CHECK_THROWS_AS(parse_perturbation("delta = 0.1\ndf2 = 0\n", base),
                  nhim::ParseError);
  CHECK_THROWS_AS(parse_perturbation("delta = 0.1\nbogus = 0\n", base),
                  nhim::ParseError);
}

TEST_CASE("without_inhomogeneity zeroes f and keeps the rest") {
  const SystemSpec s = parse_system(kLinear);
  const SystemSpec skel = s.without_inhomogeneity();
  const double x[] = {0.9};
  const double y[] = {0.4};
  std::vector<double> out(1);
  skel.eval_nonlinear(x, y, out);
  CHECK(out[0] == 0.0);
  skel.eval_horizontal(x, y, out);
  CHECK(out[0] == 1.0);
  nhim::Mat a(1);
  skel.eval_linear(x, a);
  CHECK(a(0, 0) == -1.0);
}
