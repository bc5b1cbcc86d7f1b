#pragma once

#include <vector>

#include "kpz/coeffs.hpp"
#include "kpz/geometry.hpp"
#include "kpz/lattice.hpp"

namespace kpz {

// Occupation probabilities of the lazy walk (hold alpha, step beta per
// neighbor) after t steps, stored densely on the light-cone box [-t, t]^d.
struct WalkKernel {
  double alpha = 1.0;
  double beta = 0.0;
  int dim = 1;
  long long t = 0;
  Box support;
  std::vector<double> mass;

  double at(const Site& s) const {
    return support.contains(s) ? mass[support.index_of(s)] : 0.0;
  }
  double total_mass() const;
};

// t applications of the one-step recursion starting from a point mass at the
// origin. When alpha is exactly zero the off-parity entries stay exactly
// zero, not merely small.
WalkKernel kernel_exact(double alpha, double beta, int dim, long long t);

enum class ParityMode { aperiodic, periodic };

// Gaussian approximation of the kernel. Periodic mode doubles the density on
// sites whose coordinate-sum parity matches t and vanishes elsewhere.
double kernel_gaussian(long long t, const Site& x, int dim, double beta,
                       ParityMode mode = ParityMode::aperiodic);

struct ErrorTableRow {
  long long t = 0;
  double sup_err = 0.0;
  double scaled_err = 0.0;  // sup_err * t^{(d+2)/2}
};

struct ErrorTable {
  std::vector<ErrorTableRow> rows;
  double fitted_order = 0.0;  // log-log slope of sup_err against t
};

// Sup-distance between the exact kernel and its Gaussian approximation at
// each listed time, parity-aware when alpha = 0.
ErrorTable clt_error_table(double alpha, double beta, int dim,
                           const std::vector<long long>& times);

struct ReconstructionReport {
  CoefficientSet coeffs;
  std::vector<Site> targets;
  std::vector<double> direct;
  std::vector<double> reconstructed;
  std::vector<double> residual;
  double max_residual = 0.0;
};

// Checks the random-walk representation of the surface: evolves the surface
// recording every h-field, then rebuilds each target height as the kernel
// convolution of the initial data plus the time-convolved h contributions.
// All sums run over the light cone in lexicographic order, so the identity
// is exact up to round-off.
ReconstructionReport reconstruct_via_representation(const InitialData& g,
                                                    const DrivingSpec& spec,
                                                    double epsilon,
                                                    long long t_steps,
                                                    const std::vector<Site>& targets);

}  // namespace kpz
