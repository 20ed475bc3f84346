#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fdnet/mgf.hpp"
#include "fdnet/specfun.hpp"

using namespace fdnet;

namespace {
doctest::Approx approx(double v, double rel = 1e-12) {
  return doctest::Approx(v).epsilon(rel);
}

const double kInf = std::numeric_limits<double>::infinity();

// independent form of the exclusion-field exponent via Gauss 2F1:
// B = -r^2 (1 - (1+x)^{-U}) + U (zV)^{2/b} x^{1-2/b}/(1-2/b)
//                                  2F1(U+1, 1-2/b; 2-2/b; -x),  x = zV r^{-b}
double field_exp_hyp(double z, double v, double shape, double r, double beta) {
  const double tb = 2.0 / beta;
  const double x = z * v * std::pow(r, -beta);
  return -r * r * (-std::expm1(-shape * std::log1p(x))) +
         shape * std::pow(z * v, tb) * std::pow(x, 1.0 - tb) / (1.0 - tb) *
             hyp2f1(shape + 1.0, 1.0 - tb, 2.0 - tb, -x);
}
}  // namespace

TEST_CASE("all transforms equal one at z = 0") {
  const ArrayDims a{64, 16, 4, Precoder::zf_sin};
  const LinkGeometry geo{2e-6, 3.7};
  CHECK(mgf_dl_intended(0.0, 100.0, a, 50.0, geo.beta) == 1.0);
  CHECK(mgf_dl_intercell(0.0, 100.0, a, 50.0, geo) == 1.0);
  CHECK(mgf_dl_cross(0.0, 20.0, a.users, geo) == 1.0);
  CHECK(mgf_ul_intended(0.0, 20.0, a, 50.0, geo.beta) == 1.0);
  CHECK(mgf_ul_intercell(0.0, 20.0, a.users, 50.0, geo) == 1.0);
  CHECK(mgf_ul_cross(0.0, 100.0, a, geo) == 1.0);
  CHECK(mgf_si(0.0, 20.0, {3.0, 1e-8}) == 1.0);
  CHECK(mgf_si_gamma(0.0, 20.0, {2.5, 1e-8}) == 1.0);
  PowerControlParams pc;
  pc.p0 = 1.0;
  pc.lambda = 1.0 / M_PI;
  CHECK(mgf_dl_cross_uncond(0.0, CrossForm::no_si_cap, 2, pc) == 1.0);
}

TEST_CASE("closed forms at path-loss 4 match the general field") {
  const LinkGeometry geo{1.8e-6, 4.0};
  const double zs[] = {1e-4, 0.037, 2.1, 55.0};
  for (double z : zs) {
    // single-stream station field with exclusion
    const ArrayDims one{8, 2, 1, Precoder::zf_sin};
    CHECK(mgf_dl_intercell(z, 120.0, one, 180.0, geo) ==
          approx(mgf_gamma_field(z, 120.0, 1.0, 180.0, geo), 1e-9));
    // user field, no exclusion, density scaled by the stream count
    CHECK(mgf_dl_cross(z, 35.0, 3, geo) ==
          approx(mgf_gamma_field(z, 35.0, 1.0, 0.0, {3.0 * geo.lambda, 4.0}),
                 1e-9));
    // user field with exclusion
    CHECK(mgf_ul_intercell(z, 35.0, 5, 90.0, geo) ==
          approx(mgf_gamma_field(z, 35.0, 1.0, 90.0, {5.0 * geo.lambda, 4.0}),
                 1e-9));
    // single-stream station field at the station
    const ArrayDims su{4, 4, 1, Precoder::zf_sin};
    CHECK(mgf_ul_cross(z, 120.0, su, geo) ==
          approx(mgf_gamma_field(z, 120.0, 1.0, 0.0, geo), 1e-9));
  }
}

TEST_CASE("multi-stream station field carries the 1/U^{2/beta} mark scale") {
  // exp(-pi lam (z p / U)^{2/b} G(1-2/b) G(U+2/b) / (U^{2/b} G(U)))
  const double lam = 1.8e-6, p = 120.0;
  const double betas[] = {3.3, 4.0, 4.6};
  const double zs[] = {0.05, 1.7, 40.0};
  for (int u : {2, 8})
    for (double beta : betas)
      for (double z : zs) {
        const double tb = 2.0 / beta;
        const double lg = std::lgamma(u + tb) - std::lgamma(double(u));
        const double want = std::exp(-M_PI * lam * std::pow(z * p / u, tb) *
                                     std::tgamma(1.0 - tb) * std::exp(lg) /
                                     std::pow(double(u), tb));
        const ArrayDims a{16, 16, u, Precoder::zf_sin};
        const LinkGeometry geo{lam, beta};
        CHECK(mgf_ul_cross(z, p, a, geo) == approx(want, 1e-12));
        // same thing through the general field at mark p/U^2
        CHECK(mgf_ul_cross(z, p, a, geo) ==
              approx(mgf_gamma_field(z, p / double(u * u), double(u), 0.0, geo),
                     1e-12));
      }
}

TEST_CASE("gamma-marked exclusion field agrees with its 2F1 form") {
  const double betas[] = {3.3, 4.0, 4.7};
  const double zs[] = {0.3, 2.0, 20.0};
  const double rs[] = {0.5, 120.0};
  for (double beta : betas)
    for (double z : zs)
      for (double r : rs)
        for (int u = 1; u <= 12; ++u) {
          const LinkGeometry geo{2.4e-6, beta};
          const double got = mgf_gamma_field(z, 0.8, u, r, geo);
          const double want =
              std::exp(-M_PI * geo.lambda * field_exp_hyp(z, 0.8, u, r, beta));
          CHECK(got == approx(want, 1e-9));
        }
}

TEST_CASE("diversity orders feed the serving-link transforms") {
  ArrayDims a{80, 20, 8, Precoder::zf_sin};
  CHECK(a.d_dl() == 53);
  CHECK(a.d_ul() == 13);
  a.precoder = Precoder::zf;
  CHECK(a.d_dl() == 73);
  // (1 + z p r^-beta / users)^{-d}
  const double z = 0.7, p = 100.0, r = 140.0;
  const double v = z * p / 8.0 * std::pow(r, -4.0);
  CHECK(mgf_dl_intended(z, p, a, r, 4.0) == approx(std::pow(1.0 + v, -73.0)));
  ArrayDims bad{8, 4, 6, Precoder::zf_sin};
  CHECK_THROWS_AS(mgf_dl_intended(1.0, 1.0, bad, 1.0, 4.0), std::domain_error);
  CHECK_THROWS_AS(mgf_ul_intended(1.0, 1.0, {2, 1, 3}, 1.0, 4.0),
                  std::domain_error);
}

TEST_CASE("loopback transforms") {
  // K = 0 is the exponential law
  CHECK(mgf_si(2.0, 3.0, {0.0, 0.5}) == approx(1.0 / 4.0));
  CHECK(mgf_si(2.0, 3.0, {1.0, 0.5}) == approx(0.4 * std::exp(-0.6)));
  CHECK(mgf_si(2.0, 3.0, {0.0, 0.0}) == 1.0);  // channel disabled
  CHECK(mgf_si_gamma(2.0, 3.0, {1.0, 0.5}) == approx(1.0 / 4.0));
  CHECK(mgf_si_gamma(2.0, 3.0, {2.5, 0.5}) == approx(std::pow(4.0, -2.5)));
  // gamma surrogate with matched K = 0 moments is exact
  const RicianSI ray{0.0, 0.37};
  CHECK(mgf_si_gamma(1.3, 2.0, rician_gamma_match(ray)) ==
        approx(mgf_si(1.3, 2.0, ray)));
}

TEST_CASE("cross term averaged over the power law") {
  PowerControlParams pc;
  pc.lambda = 1.0 / M_PI;
  pc.p0 = 1.0;
  pc.psi = 1.0;
  pc.beta = 4.0;
  pc.i_si = 2.0;
  pc.si = {0.0, 1.0};

  SUBCASE("frozen values, both constraints") {
    CHECK(mgf_dl_cross_uncond(0.5, CrossForm::rayleigh_pl4, 1, pc) ==
          approx(0.500674226, 1e-8));
    CHECK(mgf_dl_cross_uncond(0.5, CrossForm::rayleigh_pl4, 4, pc) ==
          approx(0.1854690886, 1e-8));
    // the transform depends on (users^2 z) only
    CHECK(mgf_dl_cross_uncond(2.0, CrossForm::rayleigh_pl4, 2, pc) ==
          approx(mgf_dl_cross_uncond(0.5, CrossForm::rayleigh_pl4, 4, pc),
                 1e-12));
  }

  SUBCASE("closed form equals direct averaging") {
    PowerLaw law(pc);
    const LinkGeometry geo{pc.lambda, 4.0};
    for (double z : {0.2, 1.0, 7.0}) {
      const double direct =
          law.expect([&](double p) { return mgf_dl_cross(z, p, 3, geo); });
      CHECK(mgf_dl_cross_uncond(z, CrossForm::rayleigh_pl4, 3, pc) ==
            approx(direct, 1e-6));
    }
  }

  SUBCASE("no distance compensation") {
    PowerControlParams nc = pc;
    nc.p0 = kInf;
    nc.i_si = 1.5;
    CHECK(mgf_dl_cross_uncond(0.7, CrossForm::no_compensation, 2, nc) ==
          approx(0.042644745261355824, 1e-10));
    PowerLaw law(nc);
    const LinkGeometry geo{nc.lambda, 4.0};
    const double direct =
        law.expect([&](double p) { return mgf_dl_cross(0.7, p, 2, geo); });
    CHECK(mgf_dl_cross_uncond(0.7, CrossForm::no_compensation, 2, nc) ==
          approx(direct, 1e-6));
  }

  SUBCASE("no cap: rational form") {
    PowerControlParams ns = pc;
    ns.i_si = kInf;
    const double z = 0.5;
    CHECK(mgf_dl_cross_uncond(z, CrossForm::no_si_cap, 2, ns) ==
          approx(1.0 / (1.0 + M_PI * std::sqrt(z * ns.p0)), 1e-12));
    PowerLaw law(ns);
    const LinkGeometry geo{ns.lambda, 4.0};
    const double direct =
        law.expect([&](double p) { return mgf_dl_cross(z, p, 2, geo); });
    CHECK(mgf_dl_cross_uncond(z, CrossForm::no_si_cap, 2, ns) ==
          approx(direct, 1e-7));
  }

  SUBCASE("constraint validation") {
    CHECK_THROWS_AS(mgf_dl_cross_uncond(1.0, CrossForm::no_compensation, 2, pc),
                    std::domain_error);
    PowerControlParams bad = pc;
    bad.beta = 3.5;
    CHECK_THROWS_AS(mgf_dl_cross_uncond(1.0, CrossForm::rayleigh_pl4, 2, bad),
                    std::domain_error);
    bad = pc;
    bad.p_max = 10.0;
    CHECK_THROWS_AS(mgf_dl_cross_uncond(1.0, CrossForm::rayleigh_pl4, 2, bad),
                    std::domain_error);
  }
}

TEST_CASE("transforms decay in z") {
  const LinkGeometry geo{2e-6, 4.0};
  const ArrayDims a{16, 4, 2, Precoder::zf_sin};
  double prev = 1.0;
  for (double z : {0.1, 1.0, 10.0, 100.0}) {
    const double m = mgf_dl_intercell(z, 50.0, a, 100.0, geo) *
                     mgf_dl_cross(z, 10.0, a.users, geo) *
                     mgf_si(z, 10.0, {2.0, 1e-7});
    CHECK(m < prev);
    CHECK(m > 0.0);
    prev = m;
  }
}
