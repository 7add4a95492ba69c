#pragma once

#include <vector>

#include "nhim/system.hpp"

namespace nhim {

/// Exponential envelope data for the tangential and stable directions,
/// fitted from variational flows at base points on the zero section of the
/// field without its inhomogeneity (for which that section is invariant).
/// The unstable bundle is empty for attracting graphs, so the forward rate
/// is +infinity and is not represented.
struct RateEstimate {
  double rho_tangential = 0.0;  // >= 0; two-sided tangential growth rate
  double rho_stable = 0.0;      // < 0; forward fiber decay rate
  double c_tangential = 1.0;    // >= 1
  double c_stable = 1.0;        // >= 1
  int base_point_count = 0;
  double window = 0.0;
  double step = 0.0;
};

/// Outcome of the spectral-gap test rho_stable < -r * rho_tangential.
struct GapReport {
  double r = 1.0;
  double margin = 0.0;  // -rho_stable - r * rho_tangential
  bool pass = false;
  double r_max = 0.0;   // largest admissible r; +inf when rho_tangential = 0
};

/// Log-norm traces kept for reporting. Tangential traces are two-sided on
/// times[i]; stable traces are forward-only on the nonnegative tail of
/// times (starting at forward_offset).
struct RateSampleSeries {
  std::vector<double> times;  // -window .. window, 2m+1 entries
  int forward_offset = 0;     // index of t = 0
  std::vector<std::vector<double>> tangential;  // [point][time index]
  std::vector<std::vector<double>> stable;      // [point][k], t = k * h_t
};

/// Low-discrepancy points over the periodic box (van der Corput / Halton).
std::vector<std::vector<double>> default_base_points(const SystemSpec& spec,
                                                     int count = 32);

/// Fits the tightest exponential envelopes across all base points: the slope
/// comes from a least-squares fit of the per-time upper envelope of the
/// log-norms (against |t| for the tangential block, against forward t for
/// the stable block) and the constant from the largest residual, so the
/// envelope dominates every sample. Errors if the resulting rates violate
/// rho_stable < -rho_tangential <= 0.
RateEstimate estimate_rates(const SystemSpec& spec,
                            const std::vector<std::vector<double>>& base_points,
                            double window, double h_t,
                            RateSampleSeries* samples = nullptr,
                            bool parallel = true);

/// Checks rho_stable < -r * rho_tangential for r >= 1.
GapReport check_gap(const RateEstimate& rates, double r);

}  // namespace nhim
