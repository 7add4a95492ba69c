#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nhim/cli.hpp"

namespace {

struct Flags {
  std::string manifest_path, config, perturb, out;
  double horizon = 0, step = 0, eta = 0, tol = 0, r = 0;
  int max_iterations = 0;
  std::vector<int> grid;
  std::vector<double> deltas;
  std::uint64_t seed = 0;
  CLI::Option *o_manifest, *o_config, *o_perturb, *o_horizon, *o_step, *o_eta,
      *o_tol, *o_max_iter, *o_grid, *o_out, *o_seed, *o_r, *o_deltas;
};

void add_flags(CLI::App* sub, Flags& f) {
  f.o_manifest = sub->add_option("--manifest", f.manifest_path,
                                 "saved run manifest; other flags override");
  f.o_config = sub->add_option("--config", f.config, "system config file");
  f.o_perturb =
      sub->add_option("--perturb", f.perturb, "perturbation config file");
  f.o_horizon = sub->add_option(
      "--horizon", f.horizon, "backward horizon (rates: half-window length)");
  f.o_step = sub->add_option("--step", f.step, "integrator time step");
  f.o_eta = sub->add_option("--eta", f.eta, "admissible sup-norm bound");
  f.o_tol = sub->add_option("--tol", f.tol, "fixed-point stopping tolerance");
  f.o_max_iter = sub->add_option("--max-iterations", f.max_iterations,
                                 "fixed-point iteration budget");
  f.o_grid = sub->add_option("--grid", f.grid,
                             "nodes per axis, comma list or one value "
                             "(rates: number of base points)")
                 ->delimiter(',');
  f.o_out = sub->add_option("--out", f.out, "output directory");
  f.o_seed = sub->add_option("--seed", f.seed, "seed for validation probes");
  f.o_r = sub->add_option("--r", f.r, "spectral gap ratio");
  f.o_deltas =
      sub->add_option("--deltas", f.deltas, "comma list of perturbation sizes")
          ->delimiter(',');
}

nhim::RunManifest build_manifest(const Flags& f) {
  nhim::RunManifest m;
  if (f.o_manifest->count()) m = nhim::RunManifest::load(f.manifest_path);
  if (f.o_config->count()) m.config_path = f.config;
  if (f.o_perturb->count()) m.perturb_path = f.perturb;
  if (f.o_horizon->count()) m.horizon = f.horizon;
  if (f.o_step->count()) m.step = f.step;
  if (f.o_eta->count()) m.eta = f.eta;
  if (f.o_tol->count()) m.tol = f.tol;
  if (f.o_max_iter->count()) m.max_iterations = f.max_iterations;
  if (f.o_grid->count()) m.grid = f.grid;
  if (f.o_out->count()) m.out_dir = f.out;
  if (f.o_seed->count()) m.seed = f.seed;
  if (f.o_r->count()) m.gap_r = f.r;
  if (f.o_deltas->count()) m.deltas = f.deltas;
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph solver for persistent invariant manifolds"};
  app.require_subcommand(1);

  Flags solve_flags, rates_flags, verify_flags, sweep_flags;
  std::string manifold_csv;

  CLI::App* solve =
      app.add_subcommand("solve", "solve the manifold over the base grid");
  add_flags(solve, solve_flags);

  CLI::App* rates = app.add_subcommand(
      "rates", "estimate hyperbolicity rates and check the spectral gap");
  add_flags(rates, rates_flags);

  CLI::App* verify = app.add_subcommand(
      "verify", "check the invariance residual of a solved manifold");
  add_flags(verify, verify_flags);
  verify->add_option("manifold", manifold_csv, "manifold CSV to check")
      ->required();

  CLI::App* sweep = app.add_subcommand(
      "sweep", "solve across perturbation sizes and report distances");
  add_flags(sweep, sweep_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? nhim::kExitOk : nhim::kExitConfig;
  }

  try {
    if (app.got_subcommand(solve))
      return nhim::cmd_solve(build_manifest(solve_flags));
    if (app.got_subcommand(rates))
      return nhim::cmd_rates(build_manifest(rates_flags));
    if (app.got_subcommand(verify))
      return nhim::cmd_verify(build_manifest(verify_flags), manifold_csv);
    if (app.got_subcommand(sweep))
      return nhim::cmd_sweep(build_manifest(sweep_flags));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nhim::kExitConfig;
  }
  return nhim::kExitConfig;
}
