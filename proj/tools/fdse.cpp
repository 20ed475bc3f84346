// fdse: spectral-efficiency tables for full-duplex cellular networks.
// Loads a scenario (config file and/or preset), runs the analytic solver
// and/or the trial simulator over an optional parameter sweep, and writes
// results.csv plus a resolved_config echo into the output directory.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fdnet/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"full-duplex cellular spectral-efficiency tables"};
  app.footer(
      "examples:\n"
      "  fdse --preset fig2 --out out/fig2\n"
      "  fdse --config scenario.json --mode both --trials 2000 --out out\n"
      "  fdse --config scenario.json --mode analytic "
      "--sweep omega_mt_db=-110:-50:5 --units nats");

  std::string config_path, preset_name, mode_str, sweep_str;
  std::string out_dir = ".", units = "bits";
  std::uint64_t seed = 0;
  int trials = 0;
  double rel_tol = 0.0;

  app.add_option("--config", config_path, "scenario file (JSON)");
  app.add_option("--preset", preset_name,
                 "named parameter bundle: fig1..fig5, siso_optimum, nlcf_table");
  app.add_option("--mode", mode_str,
                 "analytic | mc | both | fd_vs_hd | validate");
  app.add_option("--sweep", sweep_str,
                 "field=start:stop:step or field=v1,v2,...");
  app.add_option("--out", out_dir, "output directory (default .)");
  auto* seed_opt = app.add_option("--seed", seed, "trial-stream seed");
  auto* trials_opt = app.add_option("--trials", trials, "simulator trials");
  app.add_option("--rel-tol", rel_tol, "quadrature relative tolerance");
  app.add_option("--units", units, "bits | nats (default bits)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (config_path.empty() && preset_name.empty())
      throw std::invalid_argument("need --config and/or --preset");
    fdnet::RunManifest m;
    if (!preset_name.empty()) m = fdnet::preset(preset_name);
    if (!config_path.empty()) m.config = fdnet::load_config(config_path);
    if (!mode_str.empty()) m.mode = fdnet::parse_mode(mode_str);
    if (!sweep_str.empty()) m.sweep = fdnet::parse_sweep(sweep_str);
    if (seed_opt->count() > 0) m.config.seed = seed;
    if (trials_opt->count() > 0) m.config.trials = trials;
    m.out_dir = out_dir;
    m.units = units;
    m.rel_tol = rel_tol;
    return fdnet::run(m, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "fdse: " << e.what() << "\n";
    return 2;
  }
}
