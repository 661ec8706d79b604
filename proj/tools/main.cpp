//
// opmod — certified numerics for operator Lipschitz functions, Schur
// multiplier bounds and commutator moduli of continuity
//

#include <CLI11.hpp>

#include "opmod/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"opmod: Schur multiplier bounds and commutator moduli experiments"};
  app.require_subcommand(0, 1);

  opmod::cli::ExperimentConfig cfg;
  std::string config_file;

  app.add_option("--config", config_file, "JSON config file (schema opmod-config/1)");

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--f", cfg.function_id, "function id (z, conj, z^2, h<n>, abs^a, sgn)");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--dim", cfg.dim, "dimension cap");
    sub->add_option("--budget", cfg.budget, "search budget");
    sub->add_option("--iterations", cfg.iterations, "factorization sweeps");
    sub->add_option("--instances", cfg.instances, "instance count");
    sub->add_option("--delta", cfg.delta, "constraint level");
    sub->add_option("--r", cfg.disc_radius, "disc radius");
    sub->add_option("--out", cfg.out_dir, "output directory (default $OPMOD_OUT_DIR or .)");
    sub->add_option("--alpha-grid", cfg.alpha_grid, "alpha grid");
    sub->add_option("--delta-grid", cfg.delta_grid, "delta grid");
    sub->add_option("--r-grid", cfg.r_grid, "radius grid");
  };

  CLI::App* multnorm = app.add_subcommand("multnorm", "two-sided Schur multiplier bounds");
  multnorm->add_option("--matrix", cfg.matrix_file, "matrix JSON file")->required();
  add_common(multnorm);

  CLI::App* fourier = app.add_subcommand("fourier-check", "Bessel/Fourier identity checks");
  fourier->add_option("--grid-w", cfg.grid_w, "window half width");
  fourier->add_option("--grid-n", cfg.grid_n, "samples per axis (power of two)");
  add_common(fourier);

  CLI::App* lat = app.add_subcommand("lattice-bound", "two-sided lattice multiplier bounds");
  add_common(lat);

  CLI::App* omega = app.add_subcommand("omega", "omega_* and omega_** transforms");
  omega->add_option("--modulus", cfg.modulus, "power:a | linear | bounded:a,cap");
  add_common(omega);

  CLI::App* doi = app.add_subcommand("doi-check", "double operator integral identity");
  add_common(doi);

  CLI::App* search = app.add_subcommand("search-extremal", "modulus witness search");
  search->add_option("--kind", cfg.kind, "PLAIN | SA | C | U | USA | P");
  add_common(search);

  CLI::App* holder = app.add_subcommand("holder", "operator-Holder ratio search");
  add_common(holder);

  CLI::App* mcc = app.add_subcommand("mcc-check", "dilation sandwich checks");
  add_common(mcc);

  CLI11_PARSE(app, argc, argv);

  if (!config_file.empty()) {
    try {
      cfg = opmod::cli::config_from_json_file(config_file);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return opmod::cli::kExitConfig;
    }
    return opmod::cli::run(cfg);
  }

  for (CLI::App* sub : {multnorm, fourier, lat, omega, doi, search, holder, mcc})
    if (sub->parsed()) {
      cfg.subcommand = sub->get_name();
      return opmod::cli::run(cfg);
    }

  std::cerr << app.help() << "\n";
  return opmod::cli::kExitConfig;
}
