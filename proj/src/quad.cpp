#include "fdnet/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace fdnet {

namespace {

// Gauss-Kronrod 7-15 constants, QUADPACK dqk15.  xgk holds the positive
// Kronrod abscissae (even indices are the embedded Gauss-7 points).
const double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel kronrod15(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  double fv[15];
  fv[7] = f(c);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    fv[j] = f(c - dx);
    fv[14 - j] = f(c + dx);
  }

  double resg = wg[3] * fv[7];
  double resk = wgk[7] * fv[7];
  double resabs = std::fabs(resk);
  for (int j = 0; j < 7; ++j) {
    const double sum = fv[j] + fv[14 - j];
    resk += wgk[j] * sum;
    resabs += wgk[j] * (std::fabs(fv[j]) + std::fabs(fv[14 - j]));
    if (j % 2 == 1) resg += wg[j / 2] * sum;
  }

  // QUADPACK error heuristic: scale |K15-G7| by the variation of f on the
  // panel so flat stretches don't report spurious accuracy.
  const double mean = 0.5 * resk;
  double resasc = wgk[7] * std::fabs(fv[7] - mean);
  for (int j = 0; j < 7; ++j)
    resasc += wgk[j] * (std::fabs(fv[j] - mean) + std::fabs(fv[14 - j] - mean));

  double err = std::fabs((resk - resg) * h);
  resasc *= std::fabs(h);
  resabs *= std::fabs(h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  if (eps50 > 0.0) err = std::max(err, eps50);

  return {a, b, resk * h, err};
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b,
                     const QuadSpec& spec) {
  QuadResult out;
  if (a == b) return out;
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("integrate: endpoints must be finite");

  std::priority_queue<Panel> heap;
  Panel p0 = kronrod15(f, a, b);
  out.evaluations = 15;
  double total = p0.value;
  double errsum = p0.err;
  heap.push(p0);

  int splits = 0;
  while (splits < spec.max_subdivisions) {
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
    if (errsum <= tol) break;
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // panel at rounding limit
      heap.push(worst);
      break;
    }
    Panel l = kronrod15(f, worst.a, mid);
    Panel r = kronrod15(f, mid, worst.b);
    out.evaluations += 30;
    total += l.value + r.value - worst.value;
    errsum += l.err + r.err - worst.err;
    heap.push(l);
    heap.push(r);
    ++splits;
  }

  out.value = total;
  out.err = errsum;
  out.converged =
      errsum <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)) ||
      errsum <= 1e-14 * std::fabs(total) + 1e-300;
  return out;
}

QuadResult quad_semi_infinite(const Integrand& f, const QuadSpec& spec) {
  // x = t/(1-t), dx = dt/(1-t)^2 maps (0,1) -> (0,inf).
  auto g = [&f](double t) {
    const double om = 1.0 - t;
    const double x = t / om;
    return f(x) / (om * om);
  };
  return integrate(g, 0.0, 1.0, spec);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

void gauss_laguerre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: n < 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * n);
    } else {
      const double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - x[i - 2]);
    }
    double pp = 0.0, p2 = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = 1.0;
      p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0 - z) * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (p1 - p2) / z;
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-14 * std::max(1.0, z)) break;
    }
    x[i] = z;
    w[i] = -1.0 / (pp * n * p2);
  }
}

}  // namespace fdnet
