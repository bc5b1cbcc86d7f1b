#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kpz/coeffs.hpp"
#include "kpz/driving.hpp"
#include "kpz/geometry.hpp"

namespace kpz {

enum class InitialKind { linear, cosine, capped_abs, constant };

const char* to_string(InitialKind kind);

// Lipschitz initial profile g on R^d, with its Lipschitz constant supplied
// analytically by the factory.
struct InitialData {
  InitialKind kind = InitialKind::constant;
  int dim = 1;
  std::array<double, kMaxDim> slope{};       // linear
  double amplitude = 1.0;                    // cosine
  std::array<double, kMaxDim> wavevector{};  // cosine
  double cap = 1.0;                          // capped_abs
  double value = 0.0;                        // constant
  double offset = 0.0;                       // added to every evaluation
  double lipschitz = 0.0;

  static InitialData linear(int dim, const std::array<double, kMaxDim>& slope);
  static InitialData cosine(int dim, double amplitude,
                            const std::array<double, kMaxDim>& wavevector);
  static InitialData capped_abs(int dim, double cap);
  static InitialData constant(int dim, double value);

  double eval(const double* x) const;
  double eval_site(const Site& s, double epsilon) const;  // g(eps * s)
  // Gradient where it exists (everywhere except the capped_abs kinks).
  void gradient(const double* x, double* out) const;
  // Axis-aligned positions where g is not smooth; quadratures split their
  // panels there. Only the one-dimensional capped profile has any.
  std::vector<double> axis_kinks(int axis) const;
  InitialData shifted_by(double c) const;
  std::string name() const;
};

// Heights on one time slice of the shrinking-box evolution.
struct SurfaceSlice {
  double epsilon = 0.0;
  long long time_step = 0;
  Box domain;
  std::vector<double> heights;

  double at(const Site& s) const { return heights[domain.index_of(s)]; }
};

struct HField {
  double epsilon = 0.0;
  long long time_step = 0;
  Box domain;
  std::vector<double> values;

  double at(const Site& s) const { return values[domain.index_of(s)]; }
  double sup_abs() const;
  double rescaled_sup() const { return sup_abs() / (epsilon * epsilon); }
};

SurfaceSlice init_surface(const InitialData& g, double epsilon, const Box& box);

// One synchronous update: the new slice lives on the domain shrunk by one on
// every face, each height is phi of the previous stencil.
SurfaceSlice evolve_step(const SurfaceSlice& slice, const DrivingSpec& spec);

// h(t,x) = f(t,x) - alpha f(t-1,x) - beta sum_b f(t-1,x+b), on next.domain.
HField compute_h_field(const SurfaceSlice& prev, const SurfaceSlice& next,
                       const CoefficientSet& cs);

struct RoughnessReport {
  double max_increment = 0.0;
  Site argmax_increment{};
  int increment_axis = 0;
  std::array<double, kMaxDim> max_second_diff{};
  std::array<Site, kMaxDim> argmax_second_diff{};
};

RoughnessReport roughness_report(const SurfaceSlice& slice);

enum class ParityRule { floor, parity0, parity1 };

const char* to_string(ParityRule rule);

struct EvolutionLimits {
  double memory_cap_bytes = 2.0 * 1024.0 * 1024.0 * 1024.0;
};

struct RescaledValue {
  double value = 0.0;
  long long time_steps = 0;
  Site site{};
  // Set when a parity rule was requested although the walk is aperiodic
  // (alpha != 0); the value is still returned.
  bool parity_flagged = false;
};

// f_eps(t_eps, x_eps) - t_eps * phi(0) with t_eps = floor(t / eps^2) and the
// site chosen by the parity rule. Exact light-cone evolution: the initial box
// is the site dilated by t_eps along every axis, so no boundary condition
// ever enters.
RescaledValue evaluate_rescaled(const InitialData& g, const DrivingSpec& spec,
                                double epsilon, double t, const double* x,
                                ParityRule rule = ParityRule::floor,
                                const EvolutionLimits& limits = {});

// Pre-flight estimate used by evaluate_rescaled: bytes for two slices on the
// dilated box.
double rescaled_memory_estimate(int dim, long long t_steps);

}  // namespace kpz
