#pragma once

#include <array>

#include "kpz/coeffs.hpp"
#include "kpz/lattice.hpp"

namespace kpz {

struct QuadratureConfig {
  double tol = 1e-10;
  int max_points_per_axis = 16385;
  double gradient_fd_step = 1e-3;
};

// Continuum reference solution for one limit branch: the log-transformed
// heat solution when beta and gamma are both nonzero, the plain heat
// solution when gamma vanishes, the initial data itself when beta does.
struct LimitEvaluator {
  InitialData g;
  double beta = 0.0;
  double gamma = 0.0;
  Branch branch = Branch::frozen;
  double b_ratio = 0.0;  // gamma / beta on the kpz branch
  QuadratureConfig quad;

  static LimitEvaluator make(const InitialData& g, double beta, double gamma,
                             QuadratureConfig quad = {});
  static LimitEvaluator from_coefficients(const InitialData& g,
                                          const CoefficientSet& cs,
                                          QuadratureConfig quad = {});

  // Largest gradient magnitude the solution can have, L sqrt(d).
  double gradient_bound() const;
};

// Truncation radius for the spatial integrals: completing the square in
// Gaussian times exp(b L |y|) puts the neglected tail below tol.
double truncation_radius(const LimitEvaluator& ev, double t);

// f(t, x). At t = 0 returns g(x) on every branch.
double cole_hopf_eval(const LimitEvaluator& ev, double t, const double* x);

// Central differences of the evaluator with one Richardson step.
std::array<double, kMaxDim> limit_gradient(const LimitEvaluator& ev, double t,
                                           const double* x);

struct DuhamelOptions {
  int time_intervals = 64;   // composite Simpson intervals, must be even
  int space_points = 129;    // odd node count for the inner integrals
};

// | f(t,x) - heat(g)(t,x) - gamma * int_0^t int K(s, x-y) |grad f|^2(t-s, y) |.
// Restricted to d = 1; the nested quadrature is a desk-scale budget.
double duhamel_residual(const LimitEvaluator& ev, double t, const double* x,
                        const DuhamelOptions& opts = {});

}  // namespace kpz
