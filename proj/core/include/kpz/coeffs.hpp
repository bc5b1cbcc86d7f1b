#pragma once

#include <vector>

#include "kpz/driving.hpp"

namespace kpz {

enum class Branch { kpz, heat, frozen };

const char* to_string(Branch branch);

// First and second derivatives of phi at the flat configuration, the data
// the branch classification runs on. gamma = gamma1 - gamma2 always holds
// exactly as stored.
struct CoefficientSet {
  double phi0 = 0.0;    // phi(0)
  double alpha = 0.0;   // derivative along the center coordinate
  double beta = 0.0;    // derivative along any neighbor coordinate
  double gamma1 = 0.0;  // pure second derivative along a neighbor
  double gamma2 = 0.0;  // mixed derivative along b and -b
  double gamma3 = 0.0;  // mixed derivative along orthogonal neighbors (d >= 2)
  bool has_gamma3 = false;
  double gamma = 0.0;
  double cross_b_spread = 0.0;      // max deviation of per-direction estimates
  double extrapolation_residual = 0.0;
  std::vector<double> fd_steps_used;
};

// Branch classification thresholds. Larger than extraction noise, far below
// any catalog value.
inline constexpr double kBetaZeroThreshold = 1e-8;
inline constexpr double kGammaZeroThreshold = 1e-6;

// Central differences with one step of Richardson extrapolation, averaged
// over the 2d neighbor directions. Throws NonSmoothDriving when the
// smoothness probe flags the spec, InconsistentDirections when per-direction
// estimates disagree beyond 100x the extrapolation residual.
CoefficientSet extract_coefficients(const DrivingSpec& spec,
                                    std::vector<double> steps = {1e-2, 5e-3, 2.5e-3});

struct ConsistencyReport {
  double tol = 0.0;
  bool sum_rule_ok = true;   // alpha + 2 d beta = 1
  double sum_rule_residual = 0.0;
  bool nonneg_ok = true;     // alpha, beta >= -tol
  bool degenerate_ok = true; // beta ~ 0 forces all second derivatives ~ 0
  Branch branch = Branch::kpz;
  bool all_ok() const { return sum_rule_ok && nonneg_ok && degenerate_ok; }
};

// Structural checks on an extracted set; findings are report entries.
ConsistencyReport check_coefficient_consistency(const CoefficientSet& cs, int dim,
                                                double tol);

Branch classify_branch(double beta, double gamma);

}  // namespace kpz
