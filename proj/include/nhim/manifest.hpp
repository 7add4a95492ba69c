#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nhim/perron.hpp"
#include "nhim/rates.hpp"
#include "nhim/verify.hpp"

namespace nhim {

/// Everything needed to reproduce a run. Serialized as JSON next to the
/// outputs; identical manifest and seed give byte-identical CSVs.
struct RunManifest {
  std::string config_path;
  std::optional<std::string> perturb_path;
  double horizon = 30.0;
  double step = 1e-3;
  double eta = 0.5;
  double tol = 1e-10;
  int max_iterations = 50;
  std::vector<int> grid = {64};
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  double gap_r = 2.0;
  std::vector<double> deltas = {0.0};

  PerronConfig perron_config() const;
  GridShape grid_shape(int dim_x) const;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
  void save(const std::string& path) const;
  static RunManifest load(const std::string& path);
};

/// 17-significant-digit decimal formatting used for all numeric output.
std::string format_double(double v);

void write_manifold_csv(const std::string& path, const GraphManifold& m);
GraphManifold read_manifold_csv(const std::string& path,
                                const SystemSpec& spec,
                                const GridShape& grid);

void write_rates_csv(const std::string& path, const RateEstimate& rates,
                     const GapReport& gap);
void write_rate_samples_csv(const std::string& path,
                            const RateSampleSeries& samples);
void write_residual_csv(const std::string& path, const GraphManifold& m,
                        const ResidualReport& report);
void write_sweep_csv(const std::string& path, const SweepResult& result);

}  // namespace nhim
