#pragma once

#include <complex>

namespace scalemix {

using Complex = std::complex<double>;

// log of the gamma function for complex argument (Lanczos, g = 7, 9 terms;
// reflection for Re z < 0.5). The imaginary part may differ from the
// principal branch by a multiple of 2*pi; all callers only exponentiate
// sums and differences, for which that ambiguity is irrelevant.
Complex log_gamma(Complex z);

// Gamma function; throws PoleError within 1e-8 of a non-positive integer.
Complex complex_gamma(Complex z);

// Riemann zeta for Re(w) > 1: Dirichlet series with an Euler-Maclaurin tail
// correction, absolute accuracy ~1e-14 on the evaluated range.
Complex complex_zeta(Complex w);

double log_beta(double a, double b);

// Sine integral Si(x) = int_0^x sin(t)/t dt, Pade approximants, ~1e-16.
double sine_integral(double x);

// Regularized incomplete gamma P(a, x) and incomplete beta I_x(a, b).
double regularized_gamma_p(double a, double x);
double regularized_beta(double a, double b, double x);

}  // namespace scalemix
