#pragma once

#include <functional>
#include <vector>

namespace fdnet {

// Tolerances / budget for the adaptive rules.  The defaults match what the
// rest of the library assumes for inner integrals; callers doing nested
// integration should loosen rel_tol on the outer level.
struct QuadSpec {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_subdivisions = 200;
};

struct QuadResult {
  double value = 0.0;
  double err = 0.0;  // absolute error estimate
  int evaluations = 0;
  bool converged = true;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod 7-15 over [a, b].
QuadResult integrate(const Integrand& f, double a, double b,
                     const QuadSpec& spec = {});

// \int_0^\infty f(x) dx via the rational map x = t/(1-t), then the same
// adaptive rule on (0,1).  Fine for integrands decaying at least like x^-2
// or exponentially; everything in this library does.
QuadResult quad_semi_infinite(const Integrand& f, const QuadSpec& spec = {});

// Gauss-Legendre abscissae/weights on [-1,1], Newton iteration on the
// three-term recurrence.  n up to a few hundred is fine.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Gauss-Laguerre rule for \int_0^\infty e^{-x} g(x) dx (alpha = 0).
void gauss_laguerre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace fdnet
