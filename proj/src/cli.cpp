#include "nhim/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace nhim {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SystemSpec load_system(const RunManifest& m) {
  if (m.config_path.empty()) throw Error("no system config given");
  return parse_system(read_file(m.config_path), m.seed);
}

std::string prepare_out(const RunManifest& m, const char* manifest_name) {
  std::filesystem::create_directories(m.out_dir);
  m.save(m.out_dir + "/" + manifest_name);
  return m.out_dir;
}

// 1 = config/input problem, 2 = solver failure; verification outcomes are
// decided inside the commands.
template <typename Body>
int run_command(const Body& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolveError& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const NodeFailure& f : e.failures) {
      std::cerr << "  node (";
      for (std::size_t i = 0; i < f.node.size(); ++i)
        std::cerr << (i ? ", " : "") << format_double(f.node[i]);
      std::cerr << "): " << f.message << '\n';
    }
    return kExitSolver;
  } catch (const IntegrationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const AdmissibilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

int cmd_solve(const RunManifest& manifest) {
  return run_command([&] {
    const SystemSpec spec = load_system(manifest);
    const GridShape grid = manifest.grid_shape(spec.dim_x());
    PerronConfig cfg = manifest.perron_config();
    SystemSpec sys = spec;
    if (manifest.perturb_path) {
      const PerturbationSpec pert =
          parse_perturbation(read_file(*manifest.perturb_path), spec);
      sys = apply_perturbation(spec, pert);
    }
    const std::string out = prepare_out(manifest, "manifest.json");
    const GraphManifold m = solve_manifold(sys, grid, cfg);
    write_manifold_csv(out + "/manifold.csv", m);
    std::cout << "solved " << grid.total() << " nodes; sup|h| = "
              << format_double(m.sup_norm()) << '\n';
    return kExitOk;
  });
}

int cmd_rates(const RunManifest& manifest) {
  return run_command([&] {
    const SystemSpec spec = load_system(manifest);
    const int count = manifest.grid.empty() ? 32 : manifest.grid[0];
    const std::string out = prepare_out(manifest, "manifest.json");
    RateSampleSeries samples;
    RateEstimate est;
    try {
      est = estimate_rates(spec, default_base_points(spec, count),
                           manifest.horizon, manifest.step, &samples);
    } catch (const IntegrationError&) {
      throw;
    } catch (const Error& e) {
      std::cerr << "verification failed: " << e.what() << '\n';
      return kExitVerify;
    }
    const GapReport gap = check_gap(est, manifest.gap_r);
    write_rates_csv(out + "/rates.csv", est, gap);
    write_rate_samples_csv(out + "/rate_samples.csv", samples);
    std::cout << "rates on window [-" << format_double(est.window) << ", "
              << format_double(est.window) << "] from "
              << est.base_point_count << " base points (no claim beyond the "
              << "window):\n"
              << "  tangential: C = " << format_double(est.c_tangential)
              << ", rho = " << format_double(est.rho_tangential) << '\n'
              << "  stable:     C = " << format_double(est.c_stable)
              << ", rho = " << format_double(est.rho_stable) << '\n'
              << "  gap at r = " << format_double(gap.r) << ": margin = "
              << format_double(gap.margin) << ", r_max = "
              << format_double(gap.r_max) << ", "
              << (gap.pass ? "pass" : "FAIL") << '\n';
    return gap.pass ? kExitOk : kExitVerify;
  });
}

int cmd_verify(const RunManifest& manifest, const std::string& manifold_csv) {
  return run_command([&] {
    const SystemSpec spec = load_system(manifest);
    const GridShape grid = manifest.grid_shape(spec.dim_x());
    const GraphManifold m = read_manifold_csv(manifold_csv, spec, grid);
    const std::string out = prepare_out(manifest, "manifest.json");
    ResidualReport rep;
    try {
      rep = invariance_residual(spec, m);
    } catch (const Error& e) {
      std::cerr << "verification failed: " << e.what() << '\n';
      return kExitVerify;
    }
    write_residual_csv(out + "/residual.csv", m, rep);
    std::cout << "invariance residual sup = " << format_double(rep.sup)
              << " over " << grid.total() << " nodes\n";
    return kExitOk;
  });
}

int cmd_sweep(const RunManifest& manifest) {
  return run_command([&] {
    const SystemSpec spec = load_system(manifest);
    if (!manifest.perturb_path)
      throw Error("sweep needs a perturbation config (--perturb)");
    const PerturbationSpec pert =
        parse_perturbation(read_file(*manifest.perturb_path), spec);
    const GridShape grid = manifest.grid_shape(spec.dim_x());
    const std::string out = prepare_out(manifest, "manifest.json");
    const SweepResult result = perturbation_sweep(
        spec, pert, manifest.deltas, grid, manifest.perron_config());
    write_sweep_csv(out + "/sweep.csv", result);
    bool all_ok = true;
    for (const SweepEntry& e : result.entries) {
      std::cout << "delta = " << format_double(e.delta);
      if (e.ok)
        std::cout << ": dist0 = " << format_double(e.dist0)
                  << ", dist1 = " << format_double(e.dist1) << '\n';
      else
        std::cout << ": FAILED (" << e.error << ")\n";
      all_ok = all_ok && e.ok;
    }
    std::cout << "fitted slope = " << format_double(result.fitted_slope)
              << '\n';
    return all_ok ? kExitOk : kExitSolver;
  });
}

}  // namespace nhim
