#pragma once

// Ergodic spectral efficiency of the typical downlink and uplink in a
// full-duplex (or half-duplex baseline) cellular network, evaluated from the
// transform-domain identity  E{ln(1+SINR)} = int (1 - M_S(z)) M_I(z)
// exp(-z sigma^2) dz / z.  Internally everything is nats per channel use for
// a single slot; the report layer applies the two-slot bookkeeping and the
// bits conversion.

#include <cmath>
#include <vector>

#include "fdnet/mgf.hpp"
#include "fdnet/powerctl.hpp"
#include "fdnet/quad.hpp"

namespace fdnet {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

constexpr double kLog2E = 1.4426950408889634;

struct NetworkConfig {
  double lambda_km2 = 4.0 / M_PI;  // stations per km^2
  ArrayDims dims;
  double beta = 4.0;
  double p_d = 1000.0;  // station transmit power, mW

  // uplink power-control scalars, mW (inf disables a constraint)
  double p0 = std::numeric_limits<double>::infinity();
  double psi = 1.0;
  double i_si = std::numeric_limits<double>::infinity();
  double p_max = std::numeric_limits<double>::infinity();

  RicianSI si_mt;  // user-side loopback channel
  RicianSI si_bs;  // station-side loopback channel

  double bandwidth_hz = 20e6;
  double noise_figure_db = 10.0;
  // >= 0 overrides the thermal noise power (0 = interference-limited)
  double noise_override_mw = -1.0;

  double lambda_m2() const { return lambda_km2 * 1e-6; }
  double noise_mw() const {
    if (noise_override_mw >= 0.0) return noise_override_mw;
    return dbm_to_mw(-170.0 + 10.0 * std::log10(bandwidth_hz) +
                     noise_figure_db);
  }
  PowerControlParams power_params() const {
    return {p0, psi, i_si, p_max, beta, lambda_m2(), si_mt};
  }
};

enum class Duplex { fd, hd };
enum class PowerConditioning {
  common,  // one user power modulates its own loopback and all cross terms
  iid,     // each interfering user draws an independent power
};

struct SEOptions {
  Duplex duplex = Duplex::fd;
  PowerConditioning conditioning = PowerConditioning::common;
  // drop the loopback terms while keeping the power law intact (the reduced
  // no-SI cases condition the law on the SI channel but null its SE term)
  bool include_self_interference = true;
  QuadSpec quad{1e-8, 0.0, 200};
};

// one-slot ergodic SE in nats/s/Hz of the typical link; err_out receives the
// outer-quadrature absolute error estimate when non-null
double se_dl(const NetworkConfig& cfg, const SEOptions& opt = {},
             double* err_out = nullptr);
double se_ul(const NetworkConfig& cfg, const SEOptions& opt = {},
             double* err_out = nullptr);

// both duplexing modes side by side; gains follow the two-slot convention
// (full duplex transmits in both slots, half duplex splits them)
struct SEReport {
  double dl_fd = 0.0, ul_fd = 0.0;  // nats, one slot
  double dl_hd = 0.0, ul_hd = 0.0;
  double dl_gain() const { return 2.0 * dl_fd / dl_hd; }
  double ul_gain() const { return 2.0 * ul_fd / ul_hd; }
  double system_gain() const {
    return 2.0 * (dl_fd + ul_fd) / (dl_hd + ul_hd);
  }
};
SEReport se_report(const NetworkConfig& cfg, const SEOptions& base = {});

// Interference-limited single-antenna special cases (path-loss exponent 4,
// Rayleigh loopback, noise off).  One slot, nats.
enum class SisoCase {
  general_si,  // numeric power average against the auxiliary Ci/Si kernel
  no_si,       // loopback disabled
  no_comp,     // cap-only power law folded in closed form
  no_cap,      // distance-only power law folded in closed form
};
enum class LinkDir { dl, ul };
double se_siso_special(SisoCase c, LinkDir dir, const NetworkConfig& cfg,
                       const QuadSpec& spec = {1e-9, 0.0, 400},
                       double* err_out = nullptr);

// Scale-free single-antenna exchange: both-slot sums as a function of the
// uplink-to-downlink power ratio x.  Bounds are closed-form; exact values
// integrate the two-term kernel.  Nats.
struct SisoFdHd {
  double fd_exact = 0.0, hd_exact = 0.0;
  double fd_bounded = 0.0, hd_bounded = 0.0;
  double gain_exact() const { return fd_exact / hd_exact; }
  double gain_bounded() const { return fd_bounded / hd_bounded; }
};
SisoFdHd fd_hd_siso(double x, const QuadSpec& spec = {1e-10, 0.0, 400});

// argmax of the bounded gain over the ratio's validity window
struct PowerRatioOpt {
  double x_star = 1.0;
  double gain_bounded = 0.0;
  double gain_exact = 0.0;
};
PowerRatioOpt optimize_power_ratio();

// Dense-network exchange for multi-stream arrays (interference-limited,
// path-loss exponent 4, stations and users equally loaded).  Bits.
struct MimoFdHd {
  double fd_bits = 0.0, hd_bits = 0.0;
  double gain() const { return fd_bits / hd_bits; }
};
MimoFdHd fd_hd_mimo(int n_t, int n_r, int users,
                    const QuadSpec& spec = {1e-9, 0.0, 400});

// closed scaling law for that gain and its quality of fit
double nlcf_gain(double n, double users);

struct NlcfRow {
  int n = 0, users = 0;
  double fd_bits = 0.0, hd_bits = 0.0, gain = 0.0, law = 0.0;
};
std::vector<NlcfRow> nlcf_grid();

struct NlcfFit {
  double r2_uncentered = 0.0;  // 1 - SSE / sum(gain^2)
  double r2_centered = 0.0;    // 1 - SSE / sum((gain - mean)^2)
  double sse = 0.0;
  double mse = 0.0;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
};
NlcfFit nlcf_fit(const std::vector<NlcfRow>& rows);
NlcfFit nlcf_fit();

}  // namespace fdnet
