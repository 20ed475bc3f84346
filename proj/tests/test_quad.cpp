#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fdnet/quad.hpp"

using namespace fdnet;

TEST_CASE("polynomial and smooth integrands") {
  auto r = integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  r = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));

  r = integrate([](double x) { return std::exp(x); }, -1.0, 1.0);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - std::exp(-1.0)).epsilon(1e-13));

  // reversed limits are the caller's problem; equal limits give zero
  r = integrate([](double x) { return x; }, 2.0, 2.0);
  CHECK(r.value == 0.0);
}

TEST_CASE("integrable endpoint singularity") {
  auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                     {1e-10, 0.0, 2000});
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("oscillatory integrand needs subdivision") {
  auto r = integrate([](double x) { return std::sin(10.0 * x) * std::sin(10.0 * x); },
                     0.0, 20.0 * M_PI, {1e-10, 0.0, 2000});
  CHECK(r.value == doctest::Approx(10.0 * M_PI).epsilon(1e-10));
  CHECK(r.converged);
}

TEST_CASE("semi-infinite: exponential and algebraic tails") {
  auto r = quad_semi_infinite([](double x) { return std::exp(-x); });
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));

  r = quad_semi_infinite([](double x) { return 1.0 / (1.0 + x * x); });
  CHECK(r.value == doctest::Approx(M_PI / 2.0).epsilon(1e-10));

  r = quad_semi_infinite([](double x) { return std::exp(-x * x); });
  CHECK(r.value == doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-10));

  r = quad_semi_infinite([](double x) { return x * x * std::exp(-x); });
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("semi-infinite: half-duplex single-antenna kernel") {
  // \int_0^inf 4 / ((1+s^2)(s + arccot(s))) ds, a frozen reference for the
  // two-slot baseline; arccot(s) = atan(1/s) on s > 0.
  auto f = [](double s) {
    const double ac = (s == 0.0) ? M_PI / 2.0 : std::atan(1.0 / s);
    return 4.0 / ((1.0 + s * s) * (s + ac));
  };
  auto r = quad_semi_infinite(f, {1e-12, 0.0, 2000});
  CHECK(r.value == doctest::Approx(2.977975249331659).epsilon(1e-10));
}

TEST_CASE("gauss-legendre nodes") {
  std::vector<double> x, w;
  gauss_legendre(16, x, w);
  REQUIRE(x.size() == 16);

  double sw = 0.0;
  for (double v : w) sw += v;
  CHECK(sw == doctest::Approx(2.0).epsilon(1e-14));

  // degree-31 polynomial integrated exactly by the 16-point rule
  double acc = 0.0;
  for (int i = 0; i < 16; ++i) acc += w[i] * std::pow(x[i], 30);
  CHECK(acc == doctest::Approx(2.0 / 31.0).epsilon(1e-12));

  acc = 0.0;
  for (int i = 0; i < 16; ++i) acc += w[i] * std::exp(x[i]);
  CHECK(acc == doctest::Approx(std::exp(1.0) - std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("gauss-laguerre nodes") {
  std::vector<double> x, w;
  gauss_laguerre(32, x, w);
  REQUIRE(x.size() == 32);

  double sw = 0.0;
  for (double v : w) sw += v;
  CHECK(sw == doctest::Approx(1.0).epsilon(1e-12));

  // moments of Exp(1): E{x^3} = 6, E{x^6} = 720
  double m3 = 0.0, m6 = 0.0;
  for (int i = 0; i < 32; ++i) {
    m3 += w[i] * std::pow(x[i], 3);
    m6 += w[i] * std::pow(x[i], 6);
  }
  CHECK(m3 == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(m6 == doctest::Approx(720.0).epsilon(1e-12));

  // larger rule used by the spectral-efficiency layer
  gauss_laguerre(96, x, w);
  sw = 0.0;
  for (double v : w) sw += v;
  CHECK(sw == doctest::Approx(1.0).epsilon(1e-10));
  double mexp = 0.0;
  for (int i = 0; i < 96; ++i) mexp += w[i] / (1.0 + x[i]);
  // \int_0^inf e^{-x}/(1+x) dx = e * E1(1) = 0.596347362323194...
  CHECK(mexp == doctest::Approx(0.5963473623231940743).epsilon(1e-9));
}
