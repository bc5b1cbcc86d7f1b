#pragma once

// Independent oracles for the test suite. Everything here is a hand-derived
// closed form or a deliberately different algorithm from the library path it
// checks, so a shared bug cannot cancel.

#include <vector>

namespace kpz::oracles {

// One evolution step on exactly linear data f(x) = s*x (d = 1) adds a
// constant. These are the constants, derived by hand from the update rules.
double linear_step_gradient_sine(double s);           // (1 - cos s) / 4
double linear_step_gradient_sine_neg(double s);       // (cos s - 1) / 4
double linear_step_logsumexp_renormalized(double s, double theta);  // log(cosh(theta s))/theta

// Averaging drive, d = 1: cosines are exact eigenfunctions, so
// f(t, x) = cos(k eps)^t cos(k eps x).
double cosine_product_heat(double epsilon, double k, long long t_steps, long long site);

// Occupation probability of the 1-d lazy walk by the multinomial sum over
// hold counts, evaluated through lgamma.
double lazy_walk_prob_1d(double alpha, double beta, long long t, long long x);

// Cole-Hopf value by Gauss-Hermite quadrature (the library uses refined
// Simpson): (beta/gamma) log E[exp((gamma/beta) g(x + sqrt(4 beta t) Z))]
// for standard normal Z, d = 1.
struct GaussHermiteColeHopf {
  double beta = 0.5;
  double gamma = 0.5;
  int nodes = 128;
  double eval_cosine(double amplitude, double k, double t, double x) const;
  double eval_linear(double a, double t, double x) const;
};

// Second central difference of max-type driving functions at hand-picked
// points, derived on paper: lpp at the flat point gives 1/h.
double lpp_second_difference_flat(double h);

}  // namespace kpz::oracles
