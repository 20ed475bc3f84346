#include "fdnet/powerctl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fdnet/quad.hpp"
#include "fdnet/rng.hpp"
#include "fdnet/specfun.hpp"

namespace fdnet {

GammaMoment rician_gamma_match(const RicianSI& si) {
  const double m = si.mu2(), n = si.nu2();
  if (si.omega <= 0.0) throw std::domain_error("rician_gamma_match: omega <= 0");
  // mean = mu2 + nu2, variance = nu2 (2 mu2 + nu2)
  const double mean = m + n;
  const double var = n * (2.0 * m + n);
  return {mean * mean / var, var / mean};
}

GammaMoment bs_gamma_match(int users, const RicianSI& si) {
  if (users < 1) throw std::domain_error("bs_gamma_match: users < 1");
  const double m = si.mu2(), n = si.nu2();
  if (si.omega <= 0.0) throw std::domain_error("bs_gamma_match: omega <= 0");
  // sum of `users` projected loopback powers; second moment carries the
  // (users+2) LoS^2 term because the LoS column is common to all streams
  const double den = (users + 2.0) * m * m + 2.0 * m * n + n * n;
  const double omega = si.omega;
  return {users * omega * omega / den, den / omega};
}

PowerLaw::PowerLaw(const PowerControlParams& prm) : prm_(prm) {
  if (!(prm_.lambda > 0.0)) throw std::domain_error("PowerLaw: lambda <= 0");
  if (!(prm_.psi > 0.0) || !(prm_.beta > 0.0))
    throw std::domain_error("PowerLaw: psi, beta must be positive");
  if (!(prm_.p_max > 0.0) || !(prm_.p0 > 0.0) || !(prm_.i_si > 0.0))
    throw std::domain_error("PowerLaw: powers must be positive");

  if (prm_.distance_comp() && !prm_.si_cap()) {
    // p = min(p0 d^{psi beta}, p_max) and w = pi lambda d^2 ~ Exp(1):
    // freeze Gauss-Legendre nodes over w in [0, min(W, 40)] once
    const double pb = prm_.psi * prm_.beta;
    const double W = xi1(prm_.p_max);
    const double weff = std::min(W, 40.0);
    std::vector<double> x, w;
    gauss_legendre(64, x, w);
    node_p_.resize(x.size());
    node_w_.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
      const double wi = 0.5 * weff * (x[i] + 1.0);
      node_p_[i] = prm_.p0 * std::pow(wi / (M_PI * prm_.lambda), 0.5 * pb);
      node_w_[i] = 0.5 * weff * w[i] * std::exp(-wi);
    }
    node_atom_w_ = std::isfinite(prm_.p_max) ? std::exp(-W) : 0.0;
  }
}

double PowerLaw::xi1(double p) const {
  return M_PI * prm_.lambda *
         std::pow(p / prm_.p0, 2.0 / (prm_.psi * prm_.beta));
}

double PowerLaw::xi2(double p) const {
  return prm_.i_si / (p * prm_.si.omega);
}

double PowerLaw::survival_d(double p) const {
  return prm_.distance_comp() ? std::exp(-xi1(p)) : 1.0;
}

double PowerLaw::survival_h(double p) const {
  if (!prm_.si_cap()) return 1.0;
  const double k = prm_.si.k_factor;
  return 1.0 - marcum_q1(std::sqrt(2.0 * k),
                         std::sqrt(2.0 * (1.0 + k) * xi2(p)));
}

double PowerLaw::cdf(double p) const {
  if (p <= 0.0) return 0.0;
  if (p >= prm_.p_max) return 1.0;
  return 1.0 - survival_d(p) * survival_h(p);
}

double PowerLaw::pdf(double p) const {
  if (p <= 0.0 || p >= prm_.p_max) return 0.0;
  const double pb = prm_.psi * prm_.beta;
  double t1 = 0.0, sh = 1.0, t2 = 0.0;
  if (prm_.si_cap()) {
    const double k = prm_.si.k_factor;
    const double a = std::sqrt(2.0 * k);
    const double b = std::sqrt(2.0 * (1.0 + k) * xi2(p));
    sh = 1.0 - marcum_q1(a, b);
    const double d = a - b;
    t2 = 0.5 * b * b / p * std::exp(-0.5 * d * d) * bessel_i0_scaled(a * b);
  }
  if (prm_.distance_comp()) {
    const double x1 = xi1(p);
    t1 = std::exp(-x1) * (2.0 * x1 / (pb * p)) * sh;
    t2 *= std::exp(-x1);
  }
  return t1 + t2;
}

double PowerLaw::atom() const {
  if (!std::isfinite(prm_.p_max)) return 0.0;
  return survival_d(prm_.p_max) * survival_h(prm_.p_max);
}

double PowerLaw::integrate_pdf(const std::function<double(double)>& f) const {
  // substitute p = pc v^2 to flatten the p^{-1/2}-type edge of the density
  double pc = std::isfinite(prm_.p_max) ? prm_.p_max
                                        : std::numeric_limits<double>::infinity();
  if (prm_.distance_comp())
    pc = std::min(pc, prm_.p0 * std::pow(M_PI * prm_.lambda,
                                         -0.5 * prm_.psi * prm_.beta));
  if (prm_.si_cap())
    pc = std::min(pc, (1.0 + prm_.si.k_factor) * prm_.i_si / prm_.si.omega);
  if (!std::isfinite(pc))
    throw std::domain_error("PowerLaw: power is unbounded for this setup");

  auto g = [&](double v) {
    const double p = pc * v * v;
    return f(p) * pdf(p) * 2.0 * pc * v;
  };
  QuadSpec spec{1e-9, 1e-280, 500};
  double total;
  if (std::isfinite(prm_.p_max)) {
    total = integrate(g, 0.0, std::sqrt(prm_.p_max / pc), spec).value;
    total += atom() * f(prm_.p_max);
  } else {
    total = quad_semi_infinite(g, spec).value;
  }
  return total;
}

double PowerLaw::expect(const std::function<double(double)>& f) const {
  const bool comp = prm_.distance_comp(), cap = prm_.si_cap();
  if (!comp && !cap) {
    if (!std::isfinite(prm_.p_max))
      throw std::domain_error("PowerLaw: power is unbounded for this setup");
    return f(prm_.p_max);  // degenerate fixed power
  }
  if (comp && !cap) {
    double s = node_atom_w_ > 0.0 ? node_atom_w_ * f(prm_.p_max) : 0.0;
    for (size_t i = 0; i < node_p_.size(); ++i) s += node_w_[i] * f(node_p_[i]);
    return s;
  }
  if (!comp && cap) {
    // condition on the SI channel: y = (1+K) H / omega has a unit-scale
    // noncentral-chi-square density w(y)
    const double k = prm_.si.k_factor;
    const double y0 = std::isfinite(prm_.p_max)
                          ? (1.0 + k) * xi2(prm_.p_max)
                          : 0.0;
    auto g = [&](double u) {
      const double y = y0 + u;
      const double p = (1.0 + k) * prm_.i_si / (prm_.si.omega * y);
      const double r = 2.0 * std::sqrt(k * y);
      const double w =
          std::exp(-k - y + r) * bessel_i0_scaled(r);
      return f(p) * w;
    };
    QuadSpec spec{1e-9, 1e-280, 400};
    double total = quad_semi_infinite(g, spec).value;
    if (std::isfinite(prm_.p_max)) total += atom() * f(prm_.p_max);
    return total;
  }
  return integrate_pdf(f);
}

double PowerLaw::moment(double t, MomentCase how) const {
  const bool comp = prm_.distance_comp(), cap = prm_.si_cap();
  const double pb = prm_.psi * prm_.beta;
  const double k = prm_.si.k_factor;

  switch (how) {
    case MomentCase::auto_select:
      if (!comp && !cap) {
        if (!std::isfinite(prm_.p_max))
          throw std::domain_error("PowerLaw: power is unbounded for this setup");
        return std::pow(prm_.p_max, t);
      }
      if (comp && !cap)
        return std::isfinite(prm_.p_max)
                   ? expect([t](double p) { return std::pow(p, t); })
                   : moment(t, MomentCase::no_si_cap);
      if (!comp && cap) {
        if (std::isfinite(prm_.p_max))
          return expect([t](double p) { return std::pow(p, t); });
        return moment(t, MomentCase::no_compensation);
      }
      if (k == 0.0 && std::fabs(pb - 4.0) < 1e-12 &&
          !std::isfinite(prm_.p_max))
        return moment(t, MomentCase::rayleigh_psi1_beta4);
      return moment(t, MomentCase::quadrature);

    case MomentCase::rayleigh_psi1_beta4: {
      if (!comp || !cap || k != 0.0 || std::fabs(pb - 4.0) > 1e-12 ||
          std::isfinite(prm_.p_max))
        throw std::domain_error("moment: closed form needs K=0, psi*beta=4, "
                                "both constraints, no ceiling");
      const double xh1 = M_PI * prm_.lambda / std::sqrt(prm_.p0);
      const double xh2 = prm_.i_si / prm_.si.omega;
      const double q = 0.25 * xh1 * xh1 * xh2;
      const double g1 = meijer_g_30_03(1.0 - t, 0.0, 0.5, q).value;
      const double g2 = meijer_g_30_03(-t - 0.5, 0.0, 0.5, q).value;
      return std::pow(xh2, t) / std::sqrt(M_PI) *
                 (g1 - 0.5 * xh1 * std::sqrt(xh2) * g2) +
             std::tgamma(2.0 * t + 1.0) / std::pow(xh1, 2.0 * t);
    }

    case MomentCase::no_compensation: {
      if (comp || !cap || std::isfinite(prm_.p_max))
        throw std::domain_error("moment: form needs p0 = inf, no ceiling");
      if (t >= 1.0)
        throw std::domain_error("moment: E{p^t} diverges for t >= 1 here");
      const double xh2 = prm_.i_si / prm_.si.omega;
      return std::pow(xh2 * (1.0 + k), t) * std::tgamma(1.0 - t) *
             hyp1f1(t, 1.0, -k);
    }

    case MomentCase::no_si_cap:
      if (!comp || cap || std::isfinite(prm_.p_max))
        throw std::domain_error("moment: form needs i_si = inf, no ceiling");
      return std::pow(prm_.p0, t) * std::tgamma(1.0 + 0.5 * t * pb) *
             std::pow(M_PI * prm_.lambda, -0.5 * t * pb);

    case MomentCase::quadrature:
      return integrate_pdf([t](double p) { return std::pow(p, t); });
  }
  throw std::invalid_argument("moment: unknown case");
}

double PowerLaw::sample(std::mt19937_64& rng) const {
  double p = prm_.p_max;
  if (prm_.distance_comp()) {
    const double d2 = exp1(rng) / (M_PI * prm_.lambda);
    p = std::min(p, prm_.p0 * std::pow(d2, 0.5 * prm_.psi * prm_.beta));
  }
  if (prm_.si_cap()) {
    const double h = rician_power(prm_.si.mu2(), prm_.si.nu2(), rng);
    p = std::min(p, prm_.i_si / h);
  }
  if (!std::isfinite(p))
    throw std::domain_error("PowerLaw: power is unbounded for this setup");
  return p;
}

double power_cdf(const PowerControlParams& prm, double p) {
  return PowerLaw(prm).cdf(p);
}

double power_pdf(const PowerControlParams& prm, double p) {
  return PowerLaw(prm).pdf(p);
}

double power_moment(const PowerControlParams& prm, double t) {
  return PowerLaw(prm).moment(t);
}

double sample_power(const PowerControlParams& prm, std::mt19937_64& rng) {
  return PowerLaw(prm).sample(rng);
}

}  // namespace fdnet
