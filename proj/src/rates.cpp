#include "nhim/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nhim/curve.hpp"
#include "nhim/flow.hpp"
#include "nhim/linalg.hpp"
#include "nhim/parallel.hpp"

namespace nhim {

namespace {

double radical_inverse(int n, int base) {
  const double inv = 1.0 / base;
  double f = inv, r = 0.0;
  while (n > 0) {
    r += f * (n % base);
    n /= base;
    f *= inv;
  }
  return r;
}

constexpr int kPrimes[kMaxAxisDim] = {2, 3, 5, 7, 11, 13, 17, 19, 23};

}  // namespace

std::vector<std::vector<double>> default_base_points(const SystemSpec& spec,
                                                     int count) {
  if (count < 1) throw Error("base point count must be positive");
  std::vector<std::vector<double>> pts(count);
  for (int j = 0; j < count; ++j) {
    pts[j].resize(spec.dim_x());
    for (int a = 0; a < spec.dim_x(); ++a)
      pts[j][a] = radical_inverse(j + 1, kPrimes[a]) * spec.periods()[a];
  }
  return pts;
}

RateEstimate estimate_rates(const SystemSpec& spec,
                            const std::vector<std::vector<double>>& base_points,
                            double window, double h_t,
                            RateSampleSeries* samples, bool parallel) {
  const TimeGrid half = TimeGrid::backward_horizon(window, h_t);
  const int m = half.steps;
  if (base_points.empty()) throw Error("rate estimate needs base points");
  for (const auto& p : base_points)
    if (static_cast<int>(p.size()) != spec.dim_x())
      throw Error("base point dimension mismatch");

  // On the field without its inhomogeneity the zero section is invariant,
  // so the variational flow along it splits into the two bundle blocks.
  const SystemSpec skeleton = spec.without_inhomogeneity();
  const int dx = spec.dim_x(), dy = spec.dim_y();
  const int np = static_cast<int>(base_points.size());

  std::vector<std::vector<double>> tan_logs(np), st_logs(np);
  std::vector<std::string> errors(np);

  parallel_for(
      np,
      [&](std::ptrdiff_t p) {
        try {
          std::vector<double> z0(dx + dy, 0.0);
          std::copy(base_points[p].begin(), base_points[p].end(), z0.begin());
          const VariationalResult fwd =
              variational_flow(skeleton, z0, window, h_t);
          const VariationalResult bwd =
              variational_flow(skeleton, z0, -window, h_t);

          auto& tl = tan_logs[p];
          auto& sl = st_logs[p];
          tl.resize(2 * m + 1);
          sl.resize(m + 1);
          for (int k = 0; k <= m; ++k) {
            tl[m + k] = std::log(operator_norm(fwd.transitions[k].block(0, 0, dx)));
            tl[m - k] = std::log(operator_norm(bwd.transitions[k].block(0, 0, dx)));
            sl[k] = std::log(operator_norm(fwd.transitions[k].block(dx, dx, dy)));
          }
        } catch (const std::exception& e) {
          errors[p] = e.what();
        }
      },
      parallel);

  for (int p = 0; p < np; ++p)
    if (!errors[p].empty())
      throw Error("rate estimate failed at base point " + std::to_string(p) +
                  ": " + errors[p]);

  // Upper envelope over base points, then a least-squares slope through it;
  // the constant absorbs the worst residual so the bound holds everywhere.
  std::vector<double> env_tan(2 * m + 1,
                              -std::numeric_limits<double>::infinity());
  std::vector<double> env_st(m + 1,
                             -std::numeric_limits<double>::infinity());
  for (int p = 0; p < np; ++p) {
    for (int i = 0; i <= 2 * m; ++i) env_tan[i] = std::max(env_tan[i], tan_logs[p][i]);
    for (int k = 0; k <= m; ++k) env_st[k] = std::max(env_st[k], st_logs[p][k]);
  }

  std::vector<double> abs_t(2 * m + 1), fwd_t(m + 1);
  for (int i = 0; i <= 2 * m; ++i) abs_t[i] = std::abs(-window + i * h_t);
  for (int k = 0; k <= m; ++k) fwd_t[k] = k * h_t;

  RateEstimate est;
  est.rho_tangential = std::max(0.0, fit_line(abs_t, env_tan).slope);
  est.rho_stable = fit_line(fwd_t, env_st).slope;

  double res_tan = 0.0, res_st = 0.0;
  for (int i = 0; i <= 2 * m; ++i)
    res_tan = std::max(res_tan, env_tan[i] - est.rho_tangential * abs_t[i]);
  for (int k = 0; k <= m; ++k)
    res_st = std::max(res_st, env_st[k] - est.rho_stable * fwd_t[k]);
  est.c_tangential = std::exp(res_tan);
  est.c_stable = std::exp(res_st);
  est.base_point_count = np;
  est.window = window;
  est.step = h_t;

  if (!(est.rho_stable < -est.rho_tangential)) {
    std::ostringstream os;
    os << "estimated rates are not normally hyperbolic: rho_stable = "
       << est.rho_stable << ", rho_tangential = " << est.rho_tangential;
    throw Error(os.str());
  }

  if (samples) {
    samples->times.resize(2 * m + 1);
    for (int i = 0; i <= 2 * m; ++i) samples->times[i] = -window + i * h_t;
    samples->forward_offset = m;
    samples->tangential = std::move(tan_logs);
    samples->stable = std::move(st_logs);
  }
  return est;
}

GapReport check_gap(const RateEstimate& rates, double r) {
  if (!(r >= 1.0)) throw Error("gap ratio r must be at least 1");
  GapReport rep;
  rep.r = r;
  rep.margin = -rates.rho_stable - r * rates.rho_tangential;
  rep.pass = rep.margin > 0.0;
  rep.r_max = rates.rho_tangential > 0.0
                  ? -rates.rho_stable / rates.rho_tangential
                  : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace nhim
