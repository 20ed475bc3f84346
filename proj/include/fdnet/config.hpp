#pragma once

// Scenario files, sweeps, presets and the run driver behind the fdse tool.
// Configs are written in the units the literature quotes -- powers in dBm,
// channel attenuations in dB, the SI cap as dB over the noise floor,
// densities per km^2 -- and are converted to linear units exactly once, on
// the way into NetworkConfig.

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdnet/mcsim.hpp"
#include "fdnet/se.hpp"

namespace fdnet {

// Boundary-unit view of a scenario.  The *_on flags model the "off" states a
// config file may carry; the numeric value is kept either way so a policy or
// sweep can re-enable a constraint without losing its level.
struct BoundaryConfig {
  double lambda_km2 = 4.0 / M_PI;  // stations per km^2
  int n_t = 1, n_r = 1, users = 1;
  std::string precoder = "zf";  // "zf" | "zf_sin"
  double beta = 4.0;
  double p_d_dbm = 30.0;

  bool p0_on = true;
  double p0_dbm = -80.0;  // open-loop received-power target
  double psi = 1.0;       // path-loss compensation fraction
  bool i_si_on = false;
  double i_si_db = 25.0;  // SI cap target, dB over the noise power
  bool p_max_on = true;
  double p_max_dbm = 23.0;  // hardware ceiling

  double k_mt = 1.0;  // user-side loopback Rician factor
  bool omega_mt_on = true;
  double omega_mt_db = -80.0;  // residual attenuation after cancellation
  double k_bs = 1.0;           // station-side loopback
  bool omega_bs_on = true;
  double omega_bs_db = -80.0;

  double bandwidth_hz = 20e6;
  double noise_figure_db = 10.0;
  // "thermal" derives sigma^2 from B and N_f; "zero" is the
  // interference-limited idealization; "dbm" pins it to noise_dbm
  std::string noise_mode = "thermal";
  double noise_dbm = -90.0;

  std::string duplex = "fd";            // "fd" | "hd"
  std::string conditioning = "common";  // "common" | "iid"
  double region_radius_km = 20.0;
  int trials = 10000;
  std::uint64_t seed = 1;

  // validate and convert; throws std::invalid_argument naming the bad field
  NetworkConfig network() const;
  Scenario scenario() const;
  Duplex duplex_enum() const;
  PowerConditioning conditioning_enum() const;
};

// strict parser: unknown keys are errors, "off"/"thermal"/"zero" string
// states accepted where documented.  `where` tags error messages.
BoundaryConfig parse_config(const std::string& text, const std::string& where);
BoundaryConfig load_config(const std::string& path);

// canonical serialization; parse(render(c)) reproduces c bit for bit.  The
// rendered form carries a "derived" block echoing the linear-unit values
// (mW, per m^2); it is informational and skipped on load.
std::string render_config(const BoundaryConfig& c);
void save_config(const BoundaryConfig& c, const std::string& path);

struct Sweep {
  std::string field;
  std::vector<double> values;
};

// "omega_mt_db=-110:-50:5" (inclusive range) or "p_d_dbm=10,20,30"
Sweep parse_sweep(const std::string& text);
void apply_sweep_value(BoundaryConfig& c, const std::string& field, double v);
std::vector<std::string> sweep_fields();

enum class RunMode { analytic, mc, both, fd_vs_hd, validate };
RunMode parse_mode(const std::string& name);
std::string mode_name(RunMode m);

// self-contained tables that reuse the CSV plumbing: the scale-free
// single-antenna power-ratio exchange and the antenna-scaling grid
enum class TableKind { none, exchange, nlcf };

struct RunManifest {
  RunMode mode = RunMode::analytic;
  BoundaryConfig config;
  std::optional<Sweep> sweep;
  std::vector<std::string> policies;  // uplink power policy axis, may be empty
  std::vector<std::string> variants;  // named parameter bundles, may be empty
  TableKind table = TableKind::none;
  std::string out_dir = ".";
  std::string units = "bits";  // "bits" | "nats"
  double rel_tol = 0.0;        // 0 keeps the solver default
  std::string preset_name;     // informational, echoed in the CSV
};

// caption bundles: fig1..fig5, siso_optimum, nlcf_table
RunManifest preset(const std::string& name);
std::vector<std::string> preset_names();

// uplink power policies: "fixed" (cap only), "fractional" (open loop + cap),
// "sia" (open loop + SI-aware cap + cap)
void apply_policy(BoundaryConfig& c, const std::string& policy);
// fig1 parameter bundles: "massive" | "siso"
void apply_variant(BoundaryConfig& c, const std::string& variant);

// executes a manifest: writes results.csv and resolved_config under
// m.out_dir (plus validation_report in validate mode), logs progress to
// `log`, and returns the process exit status.  Config errors throw
// std::invalid_argument before any artifact is written; per-row quadrature
// failures flag the row's status cell and the run continues.
int run(const RunManifest& m, std::ostream& log);

std::string csv_header();

}  // namespace fdnet
