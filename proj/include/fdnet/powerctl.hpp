#pragma once

// Uplink transmit-power law: p = min(p0 d^{psi beta}, i_si / H, p_max), with d
// the distance to the serving station (nearest point of a PPP of density
// lambda) and H the transmitter's self-interference channel power (Rician).
// Everything is in linear units: mW for powers, meters for distances,
// per-square-meter densities.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace fdnet {

struct RicianSI {
  double k_factor = 0.0;  // ratio of LoS to scattered power
  double omega = 0.0;     // total mean power; 0 disables the channel
  double mu2() const { return k_factor * omega / (1.0 + k_factor); }
  double nu2() const { return omega / (1.0 + k_factor); }
};

struct GammaMoment {
  double shape = 1.0;
  double scale = 1.0;
};

// Gamma(shape, scale) matched to the first two moments of the Rician power.
GammaMoment rician_gamma_match(const RicianSI& si);

// Gamma matched to the residual self-interference power at a receiver that
// zero-forces `users` streams but not its own loopback channel.  For
// users = 1, K = 0 it degenerates to the exact exponential law.
GammaMoment bs_gamma_match(int users, const RicianSI& si);

struct PowerControlParams {
  double p0 = std::numeric_limits<double>::infinity();     // open-loop target
  double psi = 1.0;                                        // compensation fraction
  double i_si = std::numeric_limits<double>::infinity();   // SI-aware cap target
  double p_max = std::numeric_limits<double>::infinity();  // hardware ceiling
  double beta = 4.0;                                       // path-loss exponent
  double lambda = 1e-6;                                    // station density /m^2
  RicianSI si;                                             // own SI channel

  bool distance_comp() const { return std::isfinite(p0); }
  bool si_cap() const { return std::isfinite(i_si) && si.omega > 0.0; }
};

enum class MomentCase {
  auto_select,
  rayleigh_psi1_beta4,  // K = 0, psi*beta = 4, no ceiling: Meijer-G closed form
  no_compensation,      // p0 = inf, no ceiling, t < 1: 1F1 closed form
  no_si_cap,            // i_si = inf, no ceiling: plain nearest-distance moment
  quadrature,           // integrate against the density + ceiling atom
};

class PowerLaw {
 public:
  explicit PowerLaw(const PowerControlParams& prm);

  const PowerControlParams& params() const { return prm_; }

  // pi lambda (p/p0)^{2/(psi beta)}; exceedance exponent of the open-loop term
  double xi1(double p) const;
  // i_si / (p omega); scale argument of the SI-cap term
  double xi2(double p) const;

  double cdf(double p) const;
  double pdf(double p) const;  // continuous part only, 0 outside (0, p_max)
  double atom() const;         // probability mass sitting at p_max

  double moment(double t, MomentCase how = MomentCase::auto_select) const;
  double expect(const std::function<double(double)>& f) const;
  double sample(std::mt19937_64& rng) const;

 private:
  double survival_d(double p) const;
  double survival_h(double p) const;
  double integrate_pdf(const std::function<double(double)>& f) const;

  PowerControlParams prm_;
  // precomputed Exp(1) nodes for the no-cap fast path: f -> sum w_i f(p_i)
  std::vector<double> node_p_, node_w_;
  double node_atom_w_ = 0.0;
};

double power_cdf(const PowerControlParams& prm, double p);
double power_pdf(const PowerControlParams& prm, double p);
double power_moment(const PowerControlParams& prm, double t);
double sample_power(const PowerControlParams& prm, std::mt19937_64& rng);

}  // namespace fdnet
