#include "fdnet/se.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fdnet/specfun.hpp"

namespace fdnet {

namespace {

// ---- quadrature scaffolding ------------------------------------------------

// \int w du on u = ln z.  The integrand is a single bump whose location
// drifts with the SINR scale, so a coarse scan brackets the support first
// and adaptive GK then refines only the active window.
double log_axis_integral(const std::function<double(double)>& w,
                         const QuadSpec& spec, double* err_out) {
  constexpr double lo = -60.0, hi = 80.0, step = 2.0;
  constexpr int n = static_cast<int>((hi - lo) / step) + 1;
  double mag[n], peak = 0.0;
  for (int i = 0; i < n; ++i) {
    mag[i] = std::fabs(w(lo + i * step));
    peak = std::max(peak, mag[i]);
  }
  if (err_out) *err_out = 0.0;
  if (peak == 0.0) return 0.0;
  int i0 = 0, i1 = n - 1;
  while (mag[i0] < 1e-16 * peak) ++i0;
  while (mag[i1] < 1e-16 * peak) --i1;
  const double a = lo + i0 * step - step, b = lo + i1 * step + step;
  const QuadResult res = integrate(w, a, b, spec);
  if (err_out) *err_out = res.err;
  return res.value;
}

// E_r{g(r)} over the serving distance (nearest station of the PPP):
// y = pi lam r^2 ~ Exp(1), integrated on v = ln y so that SI-dominated
// links, whose mass sits at y << 1, stay resolved.
double serving_average(const std::function<double(double)>& g, double lambda) {
  const double c = 1.0 / (M_PI * lambda);
  auto h = [&](double v) {
    const double y = std::exp(v);
    return y * std::exp(-y) * g(std::sqrt(y * c));
  };
  static const QuadSpec spec{1e-10, 1e-300, 400};
  return integrate(h, -42.0, 4.25, spec).value;
}

ArrayDims effective_dims(const ArrayDims& d, Duplex mode) {
  ArrayDims out = d;
  if (mode == Duplex::hd) out.precoder = Precoder::zf;  // no loopback to null
  return out;
}

void check_cfg(const NetworkConfig& cfg, const ArrayDims& dims) {
  if (!(cfg.lambda_km2 > 0.0)) throw std::domain_error("se: lambda <= 0");
  if (!(cfg.beta > 2.0)) throw std::domain_error("se: beta must exceed 2");
  if (!(cfg.p_d > 0.0)) throw std::domain_error("se: p_d <= 0");
  if (dims.d_dl() < 1 || dims.d_ul() < 1)
    throw std::domain_error("se: nonpositive diversity order");
}

double acot(double s) { return std::atan2(1.0, s); }

}  // namespace

double se_dl(const NetworkConfig& cfg, const SEOptions& opt, double* err_out) {
  const ArrayDims dims = effective_dims(cfg.dims, opt.duplex);
  check_cfg(cfg, dims);
  const LinkGeometry geo{cfg.lambda_m2(), cfg.beta};
  const double d_d = dims.d_dl();
  const double ppu = cfg.p_d / dims.users;
  const double sigma2 = cfg.noise_mw();
  const double beta = cfg.beta, tb = 2.0 / beta;
  const bool fd = opt.duplex == Duplex::fd;
  const bool si_on = opt.include_self_interference && cfg.si_mt.omega > 0.0;
  const bool iid = opt.conditioning == PowerConditioning::iid;

  const PowerLaw law(cfg.power_params());
  // with iid marks the user field collapses to a deterministic exponent
  // carrying E{p^{2/beta}} (PPP displacement theorem)
  double iid_coef = 0.0;
  if (fd && iid)
    iid_coef = M_PI * dims.users * geo.lambda * std::tgamma(1.0 - tb) *
               std::tgamma(1.0 + tb) * law.moment(tb);

  auto w = [&](double u) {
    const double z = std::exp(u);
    auto g = [&](double r) {
      const double mx =
          -std::expm1(-d_d * std::log1p(z * ppu * std::pow(r, -beta)));
      return mx * mgf_dl_intercell(z, cfg.p_d, dims, r, geo);
    };
    double f = serving_average(g, geo.lambda) * std::exp(-z * sigma2);
    if (f == 0.0 || !fd) return f;
    if (iid) {
      const double own =
          si_on ? law.expect([&](double p) { return mgf_si(z, p, cfg.si_mt); })
                : 1.0;
      return f * own * std::exp(-iid_coef * std::pow(z, tb));
    }
    return f * law.expect([&](double p) {
      double m = mgf_dl_cross(z, p, dims.users, geo);
      if (si_on) m *= mgf_si(z, p, cfg.si_mt);
      return m;
    });
  };
  return log_axis_integral(w, opt.quad, err_out);
}

double se_ul(const NetworkConfig& cfg, const SEOptions& opt, double* err_out) {
  const ArrayDims dims = effective_dims(cfg.dims, opt.duplex);
  check_cfg(cfg, dims);
  const LinkGeometry geo{cfg.lambda_m2(), cfg.beta};
  const double d_u = dims.d_ul();
  const double sigma2 = cfg.noise_mw();
  const double beta = cfg.beta;
  const bool fd = opt.duplex == Duplex::fd;
  const bool iid = opt.conditioning == PowerConditioning::iid;
  // plain ZF leaves the station's own loopback unprotected; SIN nulls it
  const bool bs_si = fd && opt.include_self_interference &&
                     dims.precoder == Precoder::zf && cfg.si_bs.omega > 0.0;
  const bool siso = dims.n_t == 1 && dims.n_r == 1 && dims.users == 1;
  const GammaMoment bs_gm =
      (bs_si && !siso) ? bs_gamma_match(dims.users, cfg.si_bs) : GammaMoment{};
  const PowerLaw law(cfg.power_params());

  auto w = [&](double u) {
    const double z = std::exp(u);
    double outer = std::exp(-z * sigma2);
    if (fd) {
      outer *= mgf_ul_cross(z, cfg.p_d, dims, geo);
      if (bs_si)
        // a single antenna projects nothing away: keep the exact law there
        outer *= siso ? mgf_si(z, cfg.p_d, cfg.si_bs)
                      : mgf_si_gamma(z, cfg.p_d / dims.users, bs_gm);
    }
    if (outer == 0.0) return 0.0;
    auto g = [&](double r) {
      if (iid) {
        const double num = law.expect([&](double p) {
          return -std::expm1(-d_u * std::log1p(z * p * std::pow(r, -beta)));
        });
        if (num == 0.0) return 0.0;
        const double br = law.expect([&](double p) {
          return mgf_gamma_field_exponent(z, p, 1.0, r, beta);
        });
        return num * std::exp(-M_PI * dims.users * geo.lambda * br);
      }
      return law.expect([&](double p) {
        const double mx =
            -std::expm1(-d_u * std::log1p(z * p * std::pow(r, -beta)));
        return mx == 0.0 ? 0.0 : mx * mgf_ul_intercell(z, p, dims.users, r, geo);
      });
    };
    return outer * serving_average(g, geo.lambda);
  };
  return log_axis_integral(w, opt.quad, err_out);
}

SEReport se_report(const NetworkConfig& cfg, const SEOptions& base) {
  SEReport rep;
  SEOptions o = base;
  o.duplex = Duplex::fd;
  rep.dl_fd = se_dl(cfg, o);
  rep.ul_fd = se_ul(cfg, o);
  o.duplex = Duplex::hd;
  rep.dl_hd = se_dl(cfg, o);
  rep.ul_hd = se_ul(cfg, o);
  return rep;
}

// ---- single-antenna reduced cases (beta = 4, Rayleigh loopback, no noise) --

namespace {

void check_siso_reduced(const NetworkConfig& cfg) {
  const ArrayDims& d = cfg.dims;
  if (d.n_t != 1 || d.n_r != 1 || d.users != 1)
    throw std::domain_error("se_siso_special: single-antenna, one user only");
  if (std::fabs(cfg.beta - 4.0) > 1e-12 || std::fabs(cfg.psi - 1.0) > 1e-12)
    throw std::domain_error("se_siso_special: requires beta = 4, psi = 1");
  if (cfg.noise_override_mw != 0.0)
    throw std::domain_error("se_siso_special: interference-limited only");
}

void require_rayleigh(const RicianSI& si, const char* what) {
  if (si.k_factor != 0.0)
    throw std::domain_error(std::string("se_siso_special: ") + what +
                            " must be Rayleigh (K = 0)");
}

}  // namespace

double se_siso_special(SisoCase c, LinkDir dir, const NetworkConfig& cfg,
                       const QuadSpec& spec, double* err_out) {
  check_siso_reduced(cfg);
  const double lam = cfg.lambda_m2();
  const PowerControlParams pc = cfg.power_params();
  const bool dl = dir == LinkDir::dl;
  QuadResult res;
  switch (c) {
    case SisoCase::general_si: {
      const RicianSI& si = dl ? cfg.si_mt : cfg.si_bs;
      if (!(si.omega > 0.0))
        throw std::domain_error("se_siso_special: loopback disabled");
      require_rayleigh(si, "loopback");
      if (pc.si_cap()) require_rayleigh(pc.si, "power-law SI");
      const double om = si.omega;
      const PowerLaw law(pc);
      auto f = [&](double s) {
        const double a = s + acot(s);
        const double inner = law.expect([&](double p) {
          const double wr = dl ? cfg.p_d / p : p / cfg.p_d;
          const double cc = M_PI * lam * std::sqrt(wr / om);
          return cc * cisi_f(cc * (a + 0.5 * M_PI / std::sqrt(wr)));
        });
        return 2.0 / (1.0 + s * s) * inner;
      };
      res = quad_semi_infinite(f, spec);
      break;
    }
    case SisoCase::no_si: {
      if (pc.si_cap()) require_rayleigh(pc.si, "power-law SI");
      const PowerLaw law(pc);
      auto f = [&](double s) {
        const double a = s + acot(s);
        const double inner = law.expect([&](double p) {
          const double wr = dl ? cfg.p_d / p : p / cfg.p_d;
          return 1.0 / (0.5 * M_PI / std::sqrt(wr) + a);
        });
        return 2.0 / (1.0 + s * s) * inner;
      };
      res = quad_semi_infinite(f, spec);
      break;
    }
    case SisoCase::no_comp: {
      if (pc.distance_comp() || std::isfinite(pc.p_max) || !pc.si_cap())
        throw std::domain_error("se_siso_special: no_comp wants p = i_si/H");
      require_rayleigh(pc.si, "power-law SI");
      const double r0 = pc.i_si / (cfg.p_d * pc.si.omega);
      if (dl) {
        auto f = [&](double s) {
          const double a = s + acot(s);
          const double t = 0.25 * M_PI * M_PI / (a * a) * r0;
          return 2.0 / ((1.0 + s * s) * a) *
                 (1.0 - std::sqrt(M_PI * t) -
                  t * ei_erfi_kernel(std::sqrt(t)));
        };
        res = quad_semi_infinite(f, spec);
      } else {
        const double sr = std::sqrt(r0);
        auto f = [&](double s) {
          const double a = s + acot(s);
          const double y = 2.0 * a / M_PI * sr;
          return 4.0 / (M_PI * (1.0 + s * s)) * sr *
                 (std::sqrt(M_PI) + y * ei_erfi_kernel(y));
        };
        res = quad_semi_infinite(f, spec);
      }
      break;
    }
    case SisoCase::no_cap: {
      if (!pc.distance_comp() || pc.si_cap() || std::isfinite(pc.p_max))
        throw std::domain_error("se_siso_special: no_cap wants p = p0 d^4");
      const double q = std::sqrt(cfg.p_d / pc.p0);
      if (dl) {
        auto f = [&](double s) {
          const double zz = 2.0 * lam * (s + acot(s)) * q;
          return 4.0 * lam * q / (1.0 + s * s) * expint_e1_scaled(zz);
        };
        res = quad_semi_infinite(f, spec);
      } else {
        auto f = [&](double s) {
          const double a = s + acot(s);
          const double yy = 0.5 * M_PI * M_PI * lam * q / a;
          return 2.0 / ((1.0 + s * s) * a) * (1.0 - yy * expint_e1_scaled(yy));
        };
        res = quad_semi_infinite(f, spec);
      }
      break;
    }
  }
  if (err_out) *err_out = res.err;
  return res.value;
}

// ---- scale-free single-antenna exchange ------------------------------------

namespace {

// rational/arccot kernel of the bounded SE forms
double psi_kernel(double alpha) {
  const double sa = std::sqrt(alpha);
  const double num =
      (1.0 + alpha) *
          ((5.0 - alpha) * acot(sa) + sa * std::log(0.25 * (1.0 + alpha))) -
      0.5 * M_PI * (5.0 - 4.0 * sa + alpha) * (1.0 - 2.0 * sa - alpha);
  const double den =
      sa / (1.0 + alpha) * (25.0 - 6.0 * alpha + alpha * alpha);
  return num / den;
}

double fd_bounded_sum(double x) {
  const double rx = std::sqrt(x);
  return psi_kernel(8.0 / (M_PI * (1.0 + 1.0 / rx)) - 1.0) +
         psi_kernel(8.0 / (M_PI * (1.0 + rx)) - 1.0);
}

double fd_exact_sum(double x, const QuadSpec& spec) {
  const double rx = std::sqrt(x);
  auto f = [&](double s) {
    const double a = s + acot(s);
    return 4.0 / (1.0 + s * s) *
           (1.0 / (0.5 * M_PI / rx + a) + 1.0 / (0.5 * M_PI * rx + a));
  };
  return quad_semi_infinite(f, spec).value;
}

double hd_exact_sum(const QuadSpec& spec) {
  auto f = [](double s) {
    return 4.0 / ((1.0 + s * s) * (s + acot(s)));
  };
  return quad_semi_infinite(f, spec).value;
}

}  // namespace

SisoFdHd fd_hd_siso(double x, const QuadSpec& spec) {
  if (!(x > 0.0)) throw std::domain_error("fd_hd_siso: x <= 0");
  SisoFdHd out;
  out.fd_exact = fd_exact_sum(x, spec);
  out.hd_exact = hd_exact_sum(spec);
  out.hd_bounded = 2.0 * psi_kernel(8.0 / M_PI - 1.0);
  const double lo = std::pow(M_PI / (M_PI - 8.0), 2);
  const double hi = std::pow((M_PI - 8.0) / M_PI, 2);
  out.fd_bounded = (x > lo && x < hi)
                       ? 2.0 * fd_bounded_sum(x)
                       : std::numeric_limits<double>::quiet_NaN();
  return out;
}

PowerRatioOpt optimize_power_ratio() {
  const double lo = 0.43, hi = 2.35;  // inside the bounds' validity window
  // quasi-concave closed form: verify unimodality on a dense grid, then
  // refine by golden section
  const int ng = 1000;
  std::vector<double> vals(ng + 1);
  for (int i = 0; i <= ng; ++i)
    vals[i] = fd_bounded_sum(lo + (hi - lo) * i / ng);
  int peaks = 0, ipk = 0;
  for (int i = 1; i < ng; ++i) {
    if (vals[i] > vals[i - 1] && vals[i] >= vals[i + 1]) ++peaks;
    if (vals[i] > vals[ipk]) ipk = i;
  }
  if (peaks != 1)
    throw std::logic_error("optimize_power_ratio: objective not unimodal");

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  auto golden = [&](const std::function<double(double)>& f, double a,
                    double b, double tol) {
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = f(c1), f2 = f(c2);
    while (b - a > tol) {
      if (f1 < f2) {
        a = c1; c1 = c2; f1 = f2;
        c2 = a + gr * (b - a); f2 = f(c2);
      } else {
        b = c2; c2 = c1; f2 = f1;
        c1 = b - gr * (b - a); f1 = f(c1);
      }
    }
    return 0.5 * (a + b);
  };

  PowerRatioOpt out;
  const double step = (hi - lo) / ng;
  out.x_star = golden([](double x) { return fd_bounded_sum(x); },
                      lo + (ipk - 1) * step, lo + (ipk + 1) * step, 1e-9);
  out.gain_bounded = fd_bounded_sum(out.x_star) / psi_kernel(8.0 / M_PI - 1.0);

  // exact objective: coarse grid, then golden refine around the best cell
  const QuadSpec spec{1e-10, 0.0, 400};
  const double s_hd = hd_exact_sum(spec);
  auto exact = [&](double x) { return fd_exact_sum(x, spec); };
  int ibest = 0;
  const int nc = 25;
  std::vector<double> ev(nc + 1);
  for (int i = 0; i <= nc; ++i) {
    ev[i] = exact(lo + (hi - lo) * i / nc);
    if (ev[i] > ev[ibest]) ibest = i;
  }
  const double cstep = (hi - lo) / nc;
  const double xe = golden(exact, lo + std::max(0, ibest - 1) * cstep,
                           lo + std::min(nc, ibest + 1) * cstep, 1e-5);
  out.gain_exact = exact(xe) / s_hd;
  return out;
}

// ---- dense-network massive-MIMO exchange -----------------------------------

MimoFdHd fd_hd_mimo(int n_t, int n_r, int users, const QuadSpec& spec) {
  if (users < 1 || n_t < users || n_r < users)
    throw std::domain_error("fd_hd_mimo: need n_t, n_r >= users >= 1");
  const double uu = users;
  const double g_u = std::exp(std::lgamma(uu + 0.5) - std::lgamma(uu));
  const double d_u = n_r - users + 1, d_t = n_t - users + 1;
  auto value = [&](bool fd) {
    auto f = [&, fd](double s) {
      const double ln1p = std::log1p(1.0 / (s * s));
      const double n1 = -std::expm1(-d_u * ln1p);
      const double n2 = -std::expm1(-d_t * ln1p);
      const double pw = std::exp(-uu * ln1p);
      const double ib = beta_inc_reg(0.5, uu + 0.5, 1.0 / (1.0 + s * s));
      const double ac = acot(s);
      if (fd) {
        const double d1 = s + uu * ac + std::sqrt(M_PI / uu) * g_u;
        const double d2 =
            s * pw + std::sqrt(M_PI) * g_u * ib + uu * 0.5 * M_PI;
        return 4.0 * (n1 / d1 + n2 / d2);
      }
      const double d1 = s + uu * ac;
      const double d2 = s * pw + std::sqrt(M_PI) * g_u * ib;
      return 2.0 * (n1 / d1 + n2 / d2);
    };
    return quad_semi_infinite(f, spec).value * kLog2E;
  };
  MimoFdHd out;
  out.fd_bits = value(true);
  out.hd_bits = value(false);
  return out;
}

// ---- curve-fitted gain law ---------------------------------------------------

double nlcf_gain(double n, double users) {
  return 2.0 - 0.9 * std::pow(users, 0.16) / std::pow(n, 0.1);
}

std::vector<NlcfRow> nlcf_grid() {
  std::vector<NlcfRow> rows;
  for (int n : {64, 128, 256, 512})
    for (int u : {1, 2, 4, 8}) {
      const MimoFdHd v = fd_hd_mimo(n, n, u);
      rows.push_back({n, u, v.fd_bits, v.hd_bits, v.gain(), nlcf_gain(n, u)});
    }
  return rows;
}

NlcfFit nlcf_fit(const std::vector<NlcfRow>& rows) {
  if (rows.empty()) throw std::domain_error("nlcf_fit: empty grid");
  NlcfFit fit;
  double mean = 0.0, ss_tot = 0.0;
  for (const NlcfRow& r : rows) mean += r.gain;
  mean /= rows.size();
  double ss_cent = 0.0;
  for (const NlcfRow& r : rows) {
    const double e = r.gain - r.law;
    fit.sse += e * e;
    fit.max_abs_err = std::max(fit.max_abs_err, std::fabs(e));
    fit.max_rel_err = std::max(fit.max_rel_err, std::fabs(e) / r.gain);
    ss_tot += r.gain * r.gain;
    ss_cent += (r.gain - mean) * (r.gain - mean);
  }
  fit.mse = fit.sse / rows.size();
  fit.r2_uncentered = 1.0 - fit.sse / ss_tot;
  fit.r2_centered = 1.0 - fit.sse / ss_cent;
  return fit;
}

NlcfFit nlcf_fit() { return nlcf_fit(nlcf_grid()); }

}  // namespace fdnet
