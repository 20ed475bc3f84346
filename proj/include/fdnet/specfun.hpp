#pragma once

#include <vector>

namespace fdnet {

// ---- gamma family ---------------------------------------------------------

struct GammaPair {
  double gamma;  // Gamma(a)
  double upper;  // Gamma(a, x), unregularized upper tail
};

// Gamma(a) and Gamma(a,x) for a > 0, x >= 0.  Series for x < a+1, Lentz
// continued fraction otherwise (A&S 6.5 / Numerical Recipes gser/gcf).
GammaPair gamma_funcs(double a, double x);

double gamma_lower_reg(double a, double x);  // P(a,x)
double gamma_upper_reg(double a, double x);  // Q(a,x) = 1 - P(a,x)

// log|Gamma(x)| with the sign of Gamma(x); poles at nonpositive integers
// report sign 0 and +inf magnitude.
double lgamma_signed(double x, int& sign);

// Regularized incomplete beta I_x(a,b), Lentz continued fraction.
double beta_inc_reg(double a, double b, double x);

// ---- Bessel / Marcum ------------------------------------------------------

double bessel_i0(double x);
double bessel_i0_scaled(double x);  // e^{-|x|} I_0(x)

// First-order Marcum Q, Q1(a,b) = P[noncentral chi^2_2(a^2) > b^2].
// Poisson mixture of Erlang tails; the smaller of Q and 1-Q is summed so
// either tail keeps absolute accuracy ~1e-14.
double marcum_q1(double a, double b);

// ---- exponential / trigonometric integrals --------------------------------

struct EiErfi {
  double ei;
  double erfi;
};
EiErfi exp_integrals(double x);  // Ei(x) (x != 0) and erfi(x)

double expint_ei(double x);
double expint_e1_scaled(double x);  // e^x E1(x), x > 0; stable for large x
double erfi(double x);
double erfi_scaled(double x);  // e^{-x^2} erfi(x)

// e^{-y^2} (Ei(y^2) - pi * erfi(y)) for y > 0; appears in the reduced
// single-antenna uplink/downlink kernels.  Asymptotically ~ -sqrt(pi)/y.
double ei_erfi_kernel(double y);

struct SiCi {
  double si;
  double ci;
};
SiCi trig_integrals(double x);  // x > 0; series below 4, E1(ix) CF above

// f(x) = Ci(x) sin(x) + (pi/2 - Si(x)) cos(x) = \int_0^inf e^{-xt}/(1+t^2) dt
double cisi_f(double x);

// ---- hypergeometric -------------------------------------------------------

// Gauss 2F1 for z < 1.  Direct series on [0,1), Pfaff transform on [-1,0),
// A&S 15.3.7 inversion for z < -1 (Pfaff fallback when b-a is near-integer).
double hyp2f1(double a, double b, double c, double z, bool regularized = false);

double hyp0f1_reg(double b, double z);           // 0F1(;b;z)/Gamma(b) analog: sum z^k/(k! Gamma(b+k))
double hyp1f1(double a, double b, double z);     // Kummer M(a,b,z)

// Generic regularized pFq: sum_k prod(a_i)_k z^k / (k! prod Gamma(b_j+k)).
double hyp_pfq_reg(const std::vector<double>& a, const std::vector<double>& b,
                   double z);

enum class ConfluentKind { f01_reg, f11, pfq_reg };

// Dispatcher used by the power-law and field-transform layers: params holds
// the upper then the lower parameters (n_upper tells where the split is).
double hyp_confluent(ConfluentKind kind, const std::vector<double>& params,
                     int n_upper, double z);

// ---- Meijer G^{3,0}_{0,3} -------------------------------------------------

struct MeijerG {
  double value;
  bool used_quadrature;  // true when the Slater expansion degenerates
};

// G^{3,0}_{0,3}(x | -; b1,b2,b3) for x > 0.  Slater expansion when no two
// b's differ by an integer; otherwise an exponential-kernel integral
// representation reached through the shift property (requires some pair to
// differ by exactly 1/2, which covers every instance this library needs).
MeijerG meijer_g_30_03(double b1, double b2, double b3, double x);

}  // namespace fdnet
