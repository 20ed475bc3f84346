#pragma once

// Laplace transforms (evaluated on the positive real axis) of the signal and
// interference powers seen by a typical link: the serving-link gamma signal,
// Poisson fields of gamma-marked interferers with or without an exclusion
// ball, loopback self-interference, and the uplink-to-downlink cross term
// averaged over the transmit-power law.

#include "fdnet/powerctl.hpp"

namespace fdnet {

struct LinkGeometry {
  double lambda = 1e-6;  // station density per m^2
  double beta = 4.0;     // path-loss exponent, > 2
};

enum class Precoder {
  zf_sin,  // zero-forcing with own-array self-interference nulling
  zf,      // plain zero-forcing (half-duplex operation)
};

struct ArrayDims {
  int n_t = 1;
  int n_r = 1;
  int users = 1;
  Precoder precoder = Precoder::zf_sin;
  // per-stream diversity orders after precoding / combining
  int d_dl() const {
    return precoder == Precoder::zf_sin ? n_t - n_r - users + 1
                                        : n_t - users + 1;
  }
  int d_ul() const { return n_r - users + 1; }
};

// E{exp(-z I)} for I = sum_i G_i |x_i|^{-beta} over a PPP of density
// geo.lambda outside radius `exclusion`, marks G_i ~ Gamma(mark_shape,
// mark_scale) iid.
double mgf_gamma_field(double z, double mark_scale, double mark_shape,
                       double exclusion, const LinkGeometry& geo);

// the area-like exponent B with mgf_gamma_field = exp(-pi lambda B); exposed
// so the mark distribution can be averaged inside the exponent instead
double mgf_gamma_field_exponent(double z, double mark_scale, double mark_shape,
                                double exclusion, double beta);

// serving-station signal at a user on the downlink, link distance r
double mgf_dl_intended(double z, double p_bs, const ArrayDims& a, double r,
                       double beta);
// other stations at that user (per-stream power p_bs/users, exclusion r)
double mgf_dl_intercell(double z, double p_bs, const ArrayDims& a, double r,
                        const LinkGeometry& geo);
// uplink users at that user, all transmitting at the common power p_mt
double mgf_dl_cross(double z, double p_mt, int users, const LinkGeometry& geo);

// served user's signal at its station on the uplink
double mgf_ul_intended(double z, double p_mt, const ArrayDims& a, double r,
                       double beta);
// other-cell users at the station, common power p_mt, exclusion r
double mgf_ul_intercell(double z, double p_mt, int users, double r,
                        const LinkGeometry& geo);
// other stations at the station (no exclusion)
double mgf_ul_cross(double z, double p_bs, const ArrayDims& a,
                    const LinkGeometry& geo);

// loopback self-interference through a Rician channel carrying power p
double mgf_si(double z, double p, const RicianSI& si);
// same with a gamma surrogate for the residual channel
double mgf_si_gamma(double z, double p, const GammaMoment& gm);

// mgf_dl_cross averaged over the transmit-power law (psi = 1, beta = 4)
enum class CrossForm {
  rayleigh_pl4,     // both constraints, K = 0, no ceiling
  no_compensation,  // p0 = inf, K = 0, no ceiling
  no_si_cap,        // i_si = inf, no ceiling
};
double mgf_dl_cross_uncond(double z, CrossForm form, int users,
                           const PowerControlParams& pc);

}  // namespace fdnet
