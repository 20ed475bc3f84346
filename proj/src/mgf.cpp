#include "fdnet/mgf.hpp"

#include <cmath>
#include <stdexcept>

#include "fdnet/specfun.hpp"

namespace fdnet {

namespace {

double arccot(double x) { return x == 0.0 ? 0.5 * M_PI : std::atan(1.0 / x); }

// area-like exponent of the gamma-marked field: M = exp(-pi lambda B)
double field_exponent(double z, double v, double shape, double excl,
                      double beta) {
  if (beta <= 2.0)
    throw std::domain_error("mgf_gamma_field: path-loss exponent must be > 2");
  if (shape <= 0.0) throw std::domain_error("mgf_gamma_field: shape <= 0");
  const double zv = z * v;
  if (zv == 0.0) return 0.0;
  const double tb = 2.0 / beta;
  const double coef =
      std::exp(std::lgamma(1.0 - tb) + std::lgamma(shape + tb) -
               std::lgamma(shape));
  double t1 = 0.0, trunc = 1.0;
  if (excl > 0.0) {
    const double eb = std::pow(excl, beta);
    t1 = excl * excl * std::expm1(-shape * std::log1p(zv / eb));
    trunc = 1.0 - beta_inc_reg(shape + tb, 1.0 - tb, eb / (eb + zv));
  }
  return t1 + std::pow(zv, tb) * coef * trunc;
}

void check_dl(const ArrayDims& a) {
  if (a.d_dl() < 1)
    throw std::domain_error("mgf: downlink diversity order < 1");
}

void check_ul(const ArrayDims& a) {
  if (a.d_ul() < 1) throw std::domain_error("mgf: uplink diversity order < 1");
}

bool pl4(double beta) { return std::fabs(beta - 4.0) < 1e-12; }

}  // namespace

double mgf_gamma_field(double z, double mark_scale, double mark_shape,
                       double exclusion, const LinkGeometry& geo) {
  return std::exp(-M_PI * geo.lambda *
                  field_exponent(z, mark_scale, mark_shape, exclusion,
                                 geo.beta));
}

double mgf_gamma_field_exponent(double z, double mark_scale, double mark_shape,
                                double exclusion, double beta) {
  return field_exponent(z, mark_scale, mark_shape, exclusion, beta);
}

double mgf_dl_intended(double z, double p_bs, const ArrayDims& a, double r,
                       double beta) {
  check_dl(a);
  const double v = p_bs / a.users * std::pow(r, -beta);
  return std::exp(-a.d_dl() * std::log1p(z * v));
}

double mgf_dl_intercell(double z, double p_bs, const ArrayDims& a, double r,
                        const LinkGeometry& geo) {
  if (a.users == 1 && pl4(geo.beta)) {
    const double s = std::sqrt(z * p_bs);
    return std::exp(-M_PI * geo.lambda * s * arccot(r * r / s));
  }
  return mgf_gamma_field(z, p_bs / a.users, a.users, r, geo);
}

double mgf_dl_cross(double z, double p_mt, int users, const LinkGeometry& geo) {
  const LinkGeometry field{users * geo.lambda, geo.beta};
  if (pl4(geo.beta))
    return std::exp(-0.5 * M_PI * M_PI * field.lambda * std::sqrt(z * p_mt));
  return mgf_gamma_field(z, p_mt, 1.0, 0.0, field);
}

double mgf_ul_intended(double z, double p_mt, const ArrayDims& a, double r,
                       double beta) {
  check_ul(a);
  return std::exp(-a.d_ul() * std::log1p(z * p_mt * std::pow(r, -beta)));
}

double mgf_ul_intercell(double z, double p_mt, int users, double r,
                        const LinkGeometry& geo) {
  const LinkGeometry field{users * geo.lambda, geo.beta};
  if (pl4(geo.beta)) {
    const double s = std::sqrt(z * p_mt);
    return std::exp(-M_PI * field.lambda * s * arccot(r * r / s));
  }
  return mgf_gamma_field(z, p_mt, 1.0, r, field);
}

double mgf_ul_cross(double z, double p_bs, const ArrayDims& a,
                    const LinkGeometry& geo) {
  if (a.users == 1 && pl4(geo.beta))
    return std::exp(-0.5 * M_PI * M_PI * geo.lambda * std::sqrt(z * p_bs));
  // beam-aggregate marks scale as p_bs/U^2: the extra 1/U^{2/beta} folds
  // into the field mark, leaving a shape-U field of strength p_bs/U^2
  const double u = static_cast<double>(a.users);
  return mgf_gamma_field(z, p_bs / (u * u), a.users, 0.0, geo);
}

double mgf_si(double z, double p, const RicianSI& si) {
  if (si.omega <= 0.0) return 1.0;
  const double k1 = 1.0 + si.k_factor;
  const double den = k1 + z * p * si.omega;
  return k1 / den * std::exp(-z * p * si.k_factor * si.omega / den);
}

double mgf_si_gamma(double z, double p, const GammaMoment& gm) {
  return std::exp(-gm.shape * std::log1p(z * p * gm.scale));
}

double mgf_dl_cross_uncond(double z, CrossForm form, int users,
                           const PowerControlParams& pc) {
  if (!pl4(pc.beta) || std::fabs(pc.psi - 1.0) > 1e-12)
    throw std::domain_error(
        "mgf_dl_cross_uncond: needs psi = 1 and path-loss exponent 4");
  if (std::isfinite(pc.p_max))
    throw std::domain_error("mgf_dl_cross_uncond: no closed form with ceiling");
  if (z == 0.0) return 1.0;

  switch (form) {
    case CrossForm::no_si_cap: {
      if (!pc.distance_comp() || pc.si_cap())
        throw std::domain_error("mgf_dl_cross_uncond: wrong constraint set");
      return 1.0 / (1.0 + 0.5 * M_PI * users * std::sqrt(z * pc.p0));
    }
    case CrossForm::no_compensation: {
      if (pc.distance_comp() || !pc.si_cap() || pc.si.k_factor != 0.0)
        throw std::domain_error("mgf_dl_cross_uncond: wrong constraint set");
      const double xh2 = pc.i_si / pc.si.omega;
      const double c = 0.25 * M_PI * M_PI * users * pc.lambda;
      return meijer_g_30_03(0.0, 0.5, 1.0, z * xh2 * c * c).value /
             std::sqrt(M_PI);
    }
    case CrossForm::rayleigh_pl4: {
      if (!pc.distance_comp() || !pc.si_cap() || pc.si.k_factor != 0.0)
        throw std::domain_error("mgf_dl_cross_uncond: wrong constraint set");
      const double xh1 = M_PI * pc.lambda / std::sqrt(pc.p0);
      const double xh2 = pc.i_si / pc.si.omega;
      const double a = 1.0 + 0.5 * M_PI * users * std::sqrt(z * pc.p0);
      const double x = xh2 * 0.25 * xh1 * xh1 * a * a;
      return 1.0 / a + meijer_g_30_03(0.0, 0.5, 1.0, x).value / std::sqrt(M_PI) -
             0.5 * xh1 * std::sqrt(xh2) / std::sqrt(M_PI) *
                 meijer_g_30_03(-0.5, 0.0, 0.5, x).value;
    }
  }
  throw std::invalid_argument("mgf_dl_cross_uncond: unknown form");
}

}  // namespace fdnet
