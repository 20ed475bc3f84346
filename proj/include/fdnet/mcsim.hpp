#pragma once

// Poisson-field Monte-Carlo counterpart of the analytic pipeline.  Every
// random quantity is built from the raw draws in rng.hpp so results are
// bit-identical across standard libraries, and each trial owns a generator
// keyed by its index so serial and parallel runs agree exactly.

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "fdnet/rng.hpp"
#include "fdnet/se.hpp"

namespace fdnet {

struct Scenario {
  NetworkConfig cfg;
  Duplex duplex = Duplex::fd;
  double region_radius_km = 20.0;  // desk-scale default; edge effects < 1%
  int trials = 10000;
  std::uint64_t seed = 1;
};

struct SimResult {
  double mean_se_dl = 0.0;  // bits/s/Hz, one slot
  double mean_se_ul = 0.0;
  double ci_dl = 0.0;  // 95% normal-approximation half-widths
  double ci_ul = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

// per-trial generator; streams are independent of scheduling order
inline std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
  return std::mt19937_64(splitmix64(
      seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(trial))));
}

struct Topology {
  std::vector<std::array<double, 2>> bs;  // station positions, meters
  std::size_t serving = 0;                // index of the nearest station
  double serving_r = 0.0;                 // meters; +inf flags an empty region
};

// Poisson(lambda pi R^2) stations uniform on the disk, nearest one serving.
// An empty draw is resampled; a density so small the region stays empty
// returns serving_r = +inf.
Topology sample_topology(std::mt19937_64& rng, const Scenario& sc);

struct MtPoint {
  double x = 0.0, y = 0.0;  // meters
  double p = 0.0;           // transmit power, mW
};

// uplink user field of density users*lambda outside `exclusion_m`, each point
// carrying an independent draw of the transmit-power law
std::vector<MtPoint> sample_interfering_mts(std::mt19937_64& rng,
                                            const Scenario& sc,
                                            double exclusion_m);

// One network realization each; returns the post-combining SINR (linear).
// Draw order is part of the contract (tests reconstruct the leading draws):
// serving distance (one exp1), then [uplink: transmit power], signal fade,
// station field, user field, loopback fade.
double simulate_dl(std::mt19937_64& rng, const Scenario& sc);
double simulate_ul(std::mt19937_64& rng, const Scenario& sc);

// Mean log2(1 + SINR) over sc.trials with 95% confidence half-widths.  The
// field draws match simulate_dl/simulate_ul, but the reference signal and
// loopback fades are averaged in closed form inside each trial -- without
// that the loopback-limited corners need ~100x more trials for a stable
// mean.  The estimate is unbiased for the same quantity either way.
SimResult estimate_se(const Scenario& sc);

struct ZfSinReport {
  double max_si_residual = 0.0;  // |w G_ll v| over nulled loopback pairs
  double max_mu_residual = 0.0;  // |g_j v_k|, j != k
  double ks_dl = 0.0, p_dl = 0.0;  // intended gain vs Gamma(d_dl, 1)
  double ks_ul = 0.0, p_ul = 0.0;  // decoder gain vs Erlang(d_ul, 1)
  bool pass(double p_min = 0.01) const {
    return max_si_residual < 1e-10 && max_mu_residual < 1e-10 &&
           p_dl > p_min && p_ul > p_min;
  }
};

// Samples the precoder construction at matrix level: projector onto the
// loopback null space, pseudo-inverse across users, normalized columns.
// Checks the two nulling identities and the laws of the effective gains.
ZfSinReport validate_zf_sin(int n_t, int n_r, int users, int samples,
                            std::uint64_t seed);

// Kolmogorov-Smirnov helpers (shared with the tests)
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);
double ks_pvalue(double stat, std::size_t n);

}  // namespace fdnet
