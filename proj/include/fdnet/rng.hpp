#pragma once

// Small explicit sampling helpers.  We build everything from raw 64-bit draws
// so that results are identical across standard libraries and so that the
// per-trial streams in the simulator stay reproducible.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace fdnet {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// uniform on [0, 1) with 53 random bits
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double exp1(std::mt19937_64& rng) {
  return -std::log1p(-uniform01(rng));
}

// Box-Muller pair, N(0,1) each
inline std::pair<double, double> normal_pair(std::mt19937_64& rng) {
  const double r = std::sqrt(2.0 * exp1(rng));
  const double phi = 2.0 * M_PI * uniform01(rng);
  return {r * std::cos(phi), r * std::sin(phi)};
}

// |mu + CN(0, nu2)|^2 -- Rician power with LoS part mu^2 and scatter nu2
inline double rician_power(double mu2, double nu2, std::mt19937_64& rng) {
  const auto [n1, n2] = normal_pair(rng);
  const double s = std::sqrt(0.5 * nu2);
  const double re = std::sqrt(mu2) + s * n1;
  const double im = s * n2;
  return re * re + im * im;
}

}  // namespace fdnet
