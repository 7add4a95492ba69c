// Times the OpenMP node-parallel solver against the serial reference on the
// same problem and checks that the results match bit for bit.
//
// usage: perron_bench [nodes] [horizon] [step]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nhim/perron.hpp"
#include "nhim/system.hpp"

namespace {

constexpr const char* kSystem =
    "dim_x = 1\ndim_y = 1\nvx1 = 1 + 0.1 * sin(x1) * y1\n"
    "A11 = -2 - cos(x1)\nf1 = 0.1 * cos(x1) + 0.05 * y1^2\n";

template <typename Fn>
double time_seconds(const Fn& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int nodes = argc > 1 ? std::atoi(argv[1]) : 32;
  const double horizon = argc > 2 ? std::atof(argv[2]) : 15.0;
  const double step = argc > 3 ? std::atof(argv[3]) : 2e-3;

  const nhim::SystemSpec spec = nhim::parse_system(kSystem);
  nhim::GridShape grid;
  grid.nodes_per_axis = {nodes};
  nhim::PerronConfig cfg;
  cfg.horizon = horizon;
  cfg.step = step;

#ifdef _OPENMP
  std::printf("%d OpenMP threads, ", omp_get_max_threads());
#else
  std::printf("built without OpenMP, ");
#endif
  std::printf("%d nodes, horizon %g, step %g\n", nodes, horizon, step);

  nhim::GraphManifold parallel, serial;
  const double t_serial =
      time_seconds([&] { serial = nhim::solve_manifold_serial(spec, grid, cfg); });
  std::printf("serial reference: %8.3f s\n", t_serial);
  const double t_parallel =
      time_seconds([&] { parallel = nhim::solve_manifold(spec, grid, cfg); });
  std::printf("node-parallel:    %8.3f s  (speedup %.2fx)\n", t_parallel,
              t_serial / t_parallel);

  for (int i = 0; i < grid.total(); ++i)
    for (int c = 0; c < spec.dim_y(); ++c)
      if (parallel.value_at(i)[c] != serial.value_at(i)[c]) {
        std::printf("MISMATCH at node %d component %d\n", i, c);
        return 1;
      }
  std::printf("results match bit for bit\n");
  return 0;
}
