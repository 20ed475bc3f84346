#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fdnet/quad.hpp"
#include "fdnet/se.hpp"

using namespace fdnet;

namespace {

doctest::Approx approx(double v, double rel) {
  return doctest::Approx(v).epsilon(rel);
}

const double kInf = std::numeric_limits<double>::infinity();

// wide-array operating point: 4/pi stations per km^2, (350, 50, 1) array,
// 30 dBm downlink, fractional control at -80 dBm up to 23 dBm, 20 MHz / NF 10
NetworkConfig wide_cfg() {
  NetworkConfig c;
  c.dims = {350, 50, 1, Precoder::zf_sin};
  c.p_d = dbm_to_mw(30.0);
  c.p_max = dbm_to_mw(23.0);
  c.p0 = dbm_to_mw(-80.0);
  c.si_mt = {1.0, 0.0};
  c.si_bs = {1.0, 0.0};
  return c;
}

// reduced-case base: single antennas, interference-limited, Rayleigh
// loopbacks, full power law (compensation + cap + ceiling)
NetworkConfig reduced_cfg() {
  NetworkConfig c = wide_cfg();
  c.dims = {1, 1, 1, Precoder::zf};
  c.noise_override_mw = 0.0;
  c.i_si = 1e-7;
  c.p_max = std::pow(10.0, 2.3);
  c.si_mt = {0.0, 1e-8};
  c.si_bs = {0.0, std::pow(10.0, -6.5)};
  return c;
}

}  // namespace

// frozen values below come from an independent high-precision quadrature of
// the same transform identities (scipy/mpmath, epsrel <= 1e-8)

TEST_CASE("wide-array operating point reproduces frozen values and gains") {
  const NetworkConfig c = wide_cfg();
  const SEReport rep = se_report(c);
  CHECK(rep.dl_fd == approx(5.92435816006944, 1e-5));
  CHECK(rep.ul_fd == approx(1.98638319248583, 1e-5));
  CHECK(rep.dl_hd == approx(6.83847631186258, 1e-5));
  CHECK(rep.ul_hd == approx(3.92304336673105, 1e-5));
  // two-slot bookkeeping: full duplex uses both slots
  CHECK(rep.dl_gain() == approx(1.73265443628853, 1e-5));
  CHECK(rep.ul_gain() == approx(1.01267460303837, 1e-5));
  CHECK(rep.system_gain() == approx(1.47019037072028, 1e-5));
}

TEST_CASE("downlink SE falls as loopback cancellation degrades") {
  NetworkConfig c = wide_cfg();
  SEOptions o;
  c.si_mt = {1.0, db_to_lin(-90.0)};
  const double at90 = se_dl(c, o);
  CHECK(at90 == approx(4.74121743249208, 1e-5));
  c.si_mt = {1.0, db_to_lin(-60.0)};
  const double at60 = se_dl(c, o);
  CHECK(at60 == approx(1.00109511460783, 1e-5));

  // monotone in the attenuation on a ladder
  double prev = kInf;
  for (double om_db : {-100.0, -90.0, -80.0, -70.0, -60.0}) {
    c.si_mt = {1.0, db_to_lin(om_db)};
    const double v = se_dl(c, o);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("SE vanishes as noise dominates") {
  NetworkConfig c = wide_cfg();
  SEOptions o;
  double prev_dl = kInf, prev_ul = kInf;
  for (double boost : {1.0, 1e6, 1e12}) {
    c.noise_override_mw = dbm_to_mw(-86.98970004336019) * boost;
    const double dl = se_dl(c, o), ul = se_ul(c, o);
    CHECK(dl < prev_dl);
    CHECK(ul < prev_ul);
    prev_dl = dl;
    prev_ul = ul;
  }
  CHECK(prev_dl < 1e-3);
  CHECK(prev_ul < 1e-3);
}

TEST_CASE("many-antenna operating point under both power conditionings") {
  NetworkConfig c = wide_cfg();
  c.dims = {80, 20, 8, Precoder::zf_sin};
  c.si_mt = {1.0, db_to_lin(-80.0)};
  c.si_bs = {1.0, db_to_lin(-80.0)};
  SEOptions o;
  CHECK(se_dl(c, o) == approx(0.808620959385571, 1e-5));
  CHECK(se_ul(c, o) == approx(1.14999109771179, 1e-5));
  o.conditioning = PowerConditioning::iid;
  CHECK(se_dl(c, o) == approx(0.675406654599042, 1e-5));
  CHECK(se_ul(c, o) == approx(1.15592381759082, 1e-5));
  o.duplex = Duplex::hd;
  CHECK(se_ul(c, o) == approx(1.41392167503507, 1e-5));
  const double dl_hd_iid = se_dl(c, o);
  CHECK(dl_hd_iid == approx(3.21016731862899, 1e-5));
  o.conditioning = PowerConditioning::common;
  CHECK(se_ul(c, o) == approx(1.43991099595476, 1e-5));
  // no user powers enter the half-duplex downlink: conditioning is a no-op
  CHECK(se_dl(c, o) == approx(dl_hd_iid, 1e-9));
}

TEST_CASE("single-antenna operating point with station-side loopback") {
  NetworkConfig c = wide_cfg();
  c.dims = {1, 1, 1, Precoder::zf};
  c.p_d = dbm_to_mw(43.0);
  c.si_mt = {1.0, db_to_lin(-80.0)};
  c.si_bs = {1.0, db_to_lin(-80.0)};
  SEOptions o;
  CHECK(se_dl(c, o) == approx(0.912085503118546, 1e-5));
  CHECK(se_ul(c, o) == approx(0.011932574786624, 1e-5));
  o.conditioning = PowerConditioning::iid;
  CHECK(se_dl(c, o) == approx(0.903650336184684, 1e-5));
  CHECK(se_ul(c, o) == approx(0.0119402791647383, 1e-5));
  o.duplex = Duplex::hd;
  CHECK(se_ul(c, o) == approx(1.03207837463626, 1e-5));
  o.conditioning = PowerConditioning::common;
  CHECK(se_dl(c, o) == approx(1.48318735597765, 1e-5));
  CHECK(se_ul(c, o) == approx(0.998008549148399, 1e-5));
}

TEST_CASE("array exchange grid and curve-fit law") {
  const double want_fd[16] = {
      20.6516221911342, 16.8114586480051, 13.1881836967426, 9.86633004268754,
      24.141204417773,  20.1151783054116, 16.2476555004949, 12.6551669086072,
      27.7656242291749, 23.5874677517361, 19.5016862166776, 15.6358457609311,
      31.4922365997685, 27.1945663487422, 22.9250458918995, 18.8062002799691};
  const double want_hd[16] = {
      15.378074323169,  12.9921547138636, 10.7353303029413, 8.55944618600267,
      17.3670166261058, 14.9818374737701, 12.7280681940742, 10.5639379520756,
      19.3614352683473, 16.976447415946,  14.7234844525296, 12.5625449765166,
      21.358631154001,  18.9736919578425, 16.7209367443433, 14.5608367990109};
  const auto rows = nlcf_grid();
  REQUIRE(rows.size() == 16);
  for (int i = 0; i < 16; ++i) {
    CHECK(rows[i].fd_bits == approx(want_fd[i], 1e-10));
    CHECK(rows[i].hd_bits == approx(want_hd[i], 1e-10));
  }

  // gain rises with antennas at fixed load, falls with load at fixed antennas
  for (int bn = 0; bn < 4; ++bn)
    for (int bu = 0; bu < 4; ++bu) {
      if (bn > 0) CHECK(rows[4 * bn + bu].gain > rows[4 * (bn - 1) + bu].gain);
      if (bu > 0) CHECK(rows[4 * bn + bu].gain < rows[4 * bn + bu - 1].gain);
    }

  const NlcfFit fit = nlcf_fit(rows);
  CHECK(fit.r2_uncentered == approx(0.999154795526428, 1e-10));
  CHECK(fit.r2_centered == approx(0.806532259548168, 1e-10));
  CHECK(fit.sse == approx(0.0238194995737753, 1e-10));
  CHECK(fit.mse == approx(0.00148871872336095, 1e-10));
  CHECK(fit.max_abs_err == approx(0.0632950270563839, 1e-10));
  CHECK(fit.max_rel_err == approx(0.0471321633405597, 1e-10));
  CHECK(fit.r2_uncentered >= 0.99);
  CHECK(fit.max_rel_err <= 0.05);

  CHECK(nlcf_gain(100, 1) == approx(1.43213838996783, 1e-12));
  CHECK(nlcf_gain(4096, 1) == approx(1.60825224651674, 1e-12));
}

TEST_CASE("exchange gain tends to the two-fold limit from below") {
  const double g512 = fd_hd_mimo(512, 512, 1).gain();
  const double g4096 = fd_hd_mimo(4096, 4096, 1).gain();
  CHECK(g4096 == approx(1.57375282687951, 1e-10));
  CHECK(g4096 > g512);
  CHECK(g4096 < 2.0);
  // the fitted law has the same limit
  CHECK(nlcf_gain(1e30, 8) == approx(2.0, 1e-3));
}

TEST_CASE("single-user array exchange equals its printed reduction") {
  // at one user per cell both denominators collapse to s + arccot s (+ pi/2)
  // and the numerators merge; check the collapsed integrand verbatim
  const QuadSpec spec{1e-10, 0.0, 400};
  auto collapsed = [&](bool fd) {
    auto f = [fd](double s) {
      const double b = 2.0 - std::pow(1.0 + 1.0 / (s * s), -8.0) -
                       std::pow(1.0 + 1.0 / (s * s), -8.0);
      const double a = s + std::atan2(1.0, s);
      return fd ? 4.0 * b / (a + 0.5 * M_PI) : 2.0 * b / a;
    };
    return quad_semi_infinite(f, spec).value * kLog2E;
  };
  const MimoFdHd v = fd_hd_mimo(8, 8, 1, spec);
  CHECK(v.fd_bits == approx(collapsed(true), 1e-9));
  CHECK(v.hd_bits == approx(collapsed(false), 1e-9));
}

TEST_CASE("scale-free exchange: frozen values, symmetry, bound direction") {
  const SisoFdHd at1 = fd_hd_siso(1.0);
  CHECK(at1.fd_exact == approx(3.2470657847595635, 1e-10));
  CHECK(at1.hd_exact == approx(2.9779752493316591, 1e-10));
  CHECK(at1.fd_bounded == approx(3.0706752213190742, 1e-10));
  CHECK(at1.hd_bounded == approx(2.7172947055787907, 1e-10));
  // closed forms bound the quadrature values from below...
  CHECK(at1.fd_bounded < at1.fd_exact);
  CHECK(at1.hd_bounded < at1.hd_exact);
  // ...while the gain built from them bounds the exact gain from above
  CHECK(at1.gain_bounded() > at1.gain_exact());

  CHECK(fd_hd_siso(0.5).fd_exact == approx(3.240351466069647, 1e-10));
  CHECK(fd_hd_siso(2.0).fd_exact == approx(3.240351466069647, 1e-10));

  // uplink-to-downlink ratio exchange symmetry x <-> 1/x
  std::uint64_t s = 0x2545F4914F6CDD1DULL;
  for (int i = 0; i < 20; ++i) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    const double x = 0.05 + (double)(s >> 40) / (double)(1ULL << 24) * 20.0;
    CHECK(fd_hd_siso(x).fd_exact == approx(fd_hd_siso(1.0 / x).fd_exact, 1e-9));
  }

  // outside the validity window the bound is flagged, exact still returned
  const SisoFdHd far = fd_hd_siso(10.0);
  CHECK(std::isnan(far.fd_bounded));
  CHECK(far.fd_exact > 0.0);
  CHECK_THROWS_AS(fd_hd_siso(0.0), std::domain_error);
}

TEST_CASE("optimal uplink-to-downlink ratio sits at unity") {
  const PowerRatioOpt opt = optimize_power_ratio();
  CHECK(std::fabs(opt.x_star - 1.0) < 1e-4);
  CHECK(opt.gain_bounded == approx(1.1300486528070619, 1e-10));
  CHECK(opt.gain_exact == approx(1.0903602323384977, 1e-7));
}

TEST_CASE("reduced single-antenna forms match frozen values") {
  const NetworkConfig full = reduced_cfg();
  NetworkConfig cap_only = full;  // power rides the loopback inverse alone
  cap_only.p0 = kInf;
  cap_only.p_max = kInf;
  NetworkConfig comp_only = full;  // distance compensation alone
  comp_only.i_si = kInf;
  comp_only.p_max = kInf;

  CHECK(se_siso_special(SisoCase::general_si, LinkDir::dl, full) ==
        approx(0.745473657618573, 1e-7));
  CHECK(se_siso_special(SisoCase::general_si, LinkDir::ul, full) ==
        approx(0.00453292544087847, 1e-7));
  CHECK(se_siso_special(SisoCase::no_si, LinkDir::dl, full) ==
        approx(1.34050596723257, 1e-7));
  CHECK(se_siso_special(SisoCase::no_si, LinkDir::ul, full) ==
        approx(0.206460332606011, 1e-7));
  CHECK(se_siso_special(SisoCase::no_comp, LinkDir::dl, cap_only) ==
        approx(1.31392910627681, 1e-7));
  CHECK(se_siso_special(SisoCase::no_comp, LinkDir::ul, cap_only) ==
        approx(0.239019315954019, 1e-7));
  CHECK(se_siso_special(SisoCase::no_cap, LinkDir::dl, comp_only) ==
        approx(1.00307657432607, 1e-7));
  CHECK(se_siso_special(SisoCase::no_cap, LinkDir::ul, comp_only) ==
        approx(0.589383706508208, 1e-7));
}

TEST_CASE("single-integral reductions follow from the two-integral form") {
  // cap-only law folded in closed form vs the generic no-loopback case
  NetworkConfig cap_only = reduced_cfg();
  cap_only.p0 = kInf;
  cap_only.p_max = kInf;
  const double dl1 = se_siso_special(SisoCase::no_comp, LinkDir::dl, cap_only);
  const double dl2 = se_siso_special(SisoCase::no_si, LinkDir::dl, cap_only);
  CHECK(dl1 == approx(dl2, 1e-3));
  const double ul1 = se_siso_special(SisoCase::no_comp, LinkDir::ul, cap_only);
  const double ul2 = se_siso_special(SisoCase::no_si, LinkDir::ul, cap_only);
  CHECK(ul1 == approx(ul2, 1e-3));

  // distance-only law likewise
  NetworkConfig comp_only = reduced_cfg();
  comp_only.i_si = kInf;
  comp_only.p_max = kInf;
  CHECK(se_siso_special(SisoCase::no_cap, LinkDir::dl, comp_only) ==
        approx(se_siso_special(SisoCase::no_si, LinkDir::dl, comp_only), 1e-3));
  CHECK(se_siso_special(SisoCase::no_cap, LinkDir::ul, comp_only) ==
        approx(se_siso_special(SisoCase::no_si, LinkDir::ul, comp_only), 1e-3));
}

TEST_CASE("fixed-power reduced case matches the scale-free exchange") {
  // degenerate law p = p_max = p_d: the no-loopback double integral is one
  // of the four identical slot terms of the exchange sum at ratio one
  NetworkConfig c = reduced_cfg();
  c.p0 = kInf;
  c.i_si = kInf;
  c.p_max = c.p_d;
  const double quarter = fd_hd_siso(1.0).fd_exact / 4.0;
  CHECK(se_siso_special(SisoCase::no_si, LinkDir::dl, c) ==
        approx(quarter, 1e-9));
  CHECK(se_siso_special(SisoCase::no_si, LinkDir::ul, c) ==
        approx(quarter, 1e-9));
}

TEST_CASE("reduced-case preconditions are enforced") {
  NetworkConfig c = reduced_cfg();
  c.dims = {2, 1, 1, Precoder::zf};
  CHECK_THROWS_AS(se_siso_special(SisoCase::no_si, LinkDir::dl, c),
                  std::domain_error);
  c = reduced_cfg();
  c.noise_override_mw = -1.0;  // thermal noise back on
  CHECK_THROWS_AS(se_siso_special(SisoCase::no_si, LinkDir::dl, c),
                  std::domain_error);
  c = reduced_cfg();
  c.beta = 3.7;
  CHECK_THROWS_AS(se_siso_special(SisoCase::no_si, LinkDir::dl, c),
                  std::domain_error);
  c = reduced_cfg();
  c.si_mt = {2.0, 1e-8};  // specular loopback breaks the closed kernels
  CHECK_THROWS_AS(se_siso_special(SisoCase::general_si, LinkDir::dl, c),
                  std::domain_error);
  c = reduced_cfg();  // cap law present: no_comp wants cap-only
  CHECK_THROWS_AS(se_siso_special(SisoCase::no_comp, LinkDir::dl, c),
                  std::domain_error);
  c = reduced_cfg();  // compensation present: no_cap wants distance-only
  CHECK_THROWS_AS(se_siso_special(SisoCase::no_cap, LinkDir::dl, c),
                  std::domain_error);
  CHECK_THROWS_AS(fd_hd_mimo(2, 4, 3), std::domain_error);
  CHECK_THROWS_AS(nlcf_fit(std::vector<NlcfRow>{}), std::domain_error);
}

TEST_CASE("general pipeline agrees with the reduced forms") {
  // the transform pipeline at single-antenna interference-limited settings
  // must land on the reduced double-integral values (1e-3 contract)
  const NetworkConfig full = reduced_cfg();
  NetworkConfig cap_only = full;
  cap_only.p0 = kInf;
  cap_only.p_max = kInf;
  NetworkConfig comp_only = full;
  comp_only.i_si = kInf;
  comp_only.p_max = kInf;

  SEOptions o;  // loopbacks live in the SE terms: common conditioning
  CHECK(se_dl(full, o) == approx(0.745473657618573, 1e-3));
  CHECK(se_ul(full, o) == approx(0.00453292544087847, 1e-3));
  o.include_self_interference = false;  // law keeps its cap, SE drops SI
  CHECK(se_dl(full, o) == approx(1.34050596723257, 1e-3));
  CHECK(se_ul(full, o) == approx(0.206460332606011, 1e-3));
  CHECK(se_dl(cap_only, o) == approx(1.31392910627681, 1e-3));
  CHECK(se_ul(cap_only, o) == approx(0.239019315954019, 1e-3));
  CHECK(se_dl(comp_only, o) == approx(1.00307657432607, 1e-3));
  CHECK(se_ul(comp_only, o) == approx(0.589383706508208, 1e-3));
}
