#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kpz/geometry.hpp"

namespace kpz {

// Heights on the stencil A = {0, +e1, -e1, ..., +ed, -ed}. Flat layout:
// index 0 is the center, index 1 + 2*axis the +e neighbor, 2 + 2*axis the -e
// neighbor.
class NeighborhoodVector {
 public:
  explicit NeighborhoodVector(int dim, double fill = 0.0);

  int dim() const { return dim_; }
  int size() const { return 2 * dim_ + 1; }

  double center() const { return v_[0]; }
  double& center() { return v_[0]; }
  double neighbor(int axis, int sign) const {
    return v_[flat(axis, sign)];
  }
  double& neighbor(int axis, int sign) { return v_[flat(axis, sign)]; }

  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }

  bool all_finite() const;
  NeighborhoodVector shifted(double c) const;

  static int flat(int axis, int sign) { return sign > 0 ? 1 + 2 * axis : 2 + 2 * axis; }

 private:
  int dim_;
  std::array<double, 2 * kMaxDim + 1> v_{};
};

enum class DrivingKind {
  average,
  logsumexp,
  gradient_form,
  lpp_max,
  rsos_maxmin,
  smoothed,
  gibbs,
  identity,
  broken,  // test-only: phi(u) = u0 - u_{+e1}, deliberately non-monotone
};

enum class GradientFormVariant { sine, sine_neg };
enum class GibbsPotential { quadratic, quartic };
enum class Smoothness { c2, lipschitz_only };

const char* to_string(DrivingKind kind);
const char* to_string(GradientFormVariant variant);
const char* to_string(GibbsPotential potential);

// A named, parameterized driving function. Construct through the factories,
// which validate the kind-specific parameters; specs are immutable in spirit
// after that (nothing in the library mutates one).
struct DrivingSpec {
  DrivingKind kind = DrivingKind::average;
  int dim = 1;

  double theta = 1.0;                                         // logsumexp
  GradientFormVariant variant = GradientFormVariant::sine;    // gradient_form
  DrivingKind smoothed_base = DrivingKind::lpp_max;           // smoothed
  double delta = 0.5;                                         // smoothed
  int quad_order = 20;                                        // smoothed, per axis
  GibbsPotential potential = GibbsPotential::quadratic;       // gibbs
  double lambda = 0.0;                                        // gibbs quartic
  Smoothness claimed_smoothness = Smoothness::c2;

  // Constant subtracted from every evaluation. evolve-with-phi-minus-phi(0)
  // and evolve-then-renormalize must agree; tests exercise that through this.
  double offset = 0.0;

  static DrivingSpec average(int dim);
  static DrivingSpec logsumexp(int dim, double theta);
  static DrivingSpec gradient_form(int dim, GradientFormVariant variant);
  static DrivingSpec lpp_max(int dim);
  static DrivingSpec rsos_maxmin(int dim);
  static DrivingSpec smoothed(int dim, DrivingKind base, double delta, int quad_order = 20);
  static DrivingSpec gibbs(int dim, GibbsPotential potential, double lambda = 0.0);
  static DrivingSpec identity(int dim);
  static DrivingSpec broken(int dim);

  DrivingSpec shifted(double extra_offset) const;
  std::string name() const;
};

// phi(u). Deterministic: equal inputs give bit-identical outputs.
double evaluate(const DrivingSpec& spec, const NeighborhoodVector& u);

struct AxiomCheck {
  bool passed = true;
  double worst = 0.0;  // largest violation found, 0 if none
  // witness of the worst violation (meaningful when !passed)
  std::vector<double> witness_u;
  std::vector<double> witness_v;
  double witness_shift = 0.0;
};

struct ValidationReport {
  std::uint64_t seed = 0;
  int samples = 0;
  double tol = 0.0;
  AxiomCheck equivariance;
  AxiomCheck monotonicity;
  AxiomCheck symmetry;
  AxiomCheck contraction;
  bool all_passed() const {
    return equivariance.passed && monotonicity.passed && symmetry.passed &&
           contraction.passed;
  }
};

// Samples neighborhoods with a fixed-seed generator and checks the four
// axioms: equivariance under constant shifts, monotonicity, invariance under
// lattice symmetries, and the sup-norm contraction bound. Violations are
// report entries, never exceptions.
ValidationReport validate_properties(const DrivingSpec& spec, int sample_count,
                                     double tol,
                                     std::uint64_t seed = 0x9e3779b97f4a7c15ull);

struct DirectionProbe {
  int axis = 0;
  int sign = +1;
  double base_offset = 0.0;  // offset applied at a tie-breaking base point
  std::vector<double> estimates;
  double spread = 0.0;
};

struct SmoothnessVerdict {
  bool c2_consistent = true;
  double max_spread = 0.0;
  double threshold = 0.25;
  std::vector<DirectionProbe> probes;
};

// Compares second central differences of phi across decreasing step sizes,
// along every neighbor direction. Each direction is probed at the origin and
// at a base point with one other coordinate raised, which places a max/min
// tie at the probed coordinate; functions odd under negation have vanishing
// second differences at the origin, so the origin alone cannot expose them.
SmoothnessVerdict smoothness_probe(const DrivingSpec& spec,
                                   const std::vector<double>& steps,
                                   double threshold = 0.25);

std::vector<double> default_probe_steps();

// The catalog instances used by the validation tests and shipped configs.
std::vector<DrivingSpec> shipped_catalog(int dim);

}  // namespace kpz
