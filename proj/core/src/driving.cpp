#include "kpz/driving.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "kpz/errors.hpp"

namespace kpz {

namespace {

void require_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw InvalidSpec("dimension must be in 1.." + std::to_string(kMaxDim));
  }
}

double q_sine(double v) { return (v + 1.0 - std::cos(v)) / 4.0; }
double q_sine_neg(double v) { return (v + std::cos(v) - 1.0) / 4.0; }

double raw_average(const NeighborhoodVector& u) {
  double sum = 0.0;
  for (int i = 1; i < u.size(); ++i) sum += u[i];
  return sum / static_cast<double>(u.size() - 1);
}

double raw_logsumexp(const NeighborhoodVector& u, double theta) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < u.size(); ++i) m = std::max(m, u[i]);
  double acc = 0.0;
  for (int i = 1; i < u.size(); ++i) acc += std::exp(theta * (u[i] - m));
  return m + std::log(acc) / theta;
}

double raw_gradient_form(const NeighborhoodVector& u, GradientFormVariant variant) {
  const double u0 = u.center();
  double acc = 0.0;
  for (int i = 1; i < u.size(); ++i) {
    const double v = u[i] - u0;
    acc += variant == GradientFormVariant::sine ? q_sine(v) : q_sine_neg(v);
  }
  return u0 + acc / static_cast<double>(u.size() - 1);
}

double raw_lpp_max(const NeighborhoodVector& u) {
  double m = u[0];
  for (int i = 1; i < u.size(); ++i) m = std::max(m, u[i]);
  return m;
}

double raw_rsos_maxmin(const NeighborhoodVector& u) {
  double mx = -std::numeric_limits<double>::infinity();
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 1; i < u.size(); ++i) {
    mx = std::max(mx, u[i]);
    mn = std::min(mn, u[i]);
  }
  return 0.5 * (mx + mn);
}

double raw_identity(const NeighborhoodVector& u) { return u.center(); }

double raw_broken(const NeighborhoodVector& u) {
  return u.center() - u.neighbor(0, +1);
}

// Physicists' Gauss-Hermite nodes and weights for integral exp(-x^2) f(x) dx,
// by Newton iteration on the orthonormal Hermite recurrence.
void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15 * std::fmax(1.0, std::fabs(z))) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
}

double raw_smoothed(const DrivingSpec& spec, const NeighborhoodVector& u) {
  std::vector<double> z, w;
  gauss_hermite(spec.quad_order, z, w);
  // Normalizing by the computed sum makes the node weights an exact
  // probability vector, so equivariance survives the quadrature bit-for-bit.
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& wi : w) wi /= wsum;

  const double scale = spec.delta * std::sqrt(2.0);
  const int m = u.size();
  std::array<int, 2 * kMaxDim + 1> idx{};
  NeighborhoodVector shifted = u;
  double acc = 0.0;
  while (true) {
    double weight = 1.0;
    for (int c = 0; c < m; ++c) {
      const auto k = static_cast<std::size_t>(idx[static_cast<std::size_t>(c)]);
      weight *= w[k];
      shifted[c] = u[c] + scale * z[k];
    }
    const double base = spec.smoothed_base == DrivingKind::rsos_maxmin
                            ? raw_rsos_maxmin(shifted)
                            : raw_lpp_max(shifted);
    acc += weight * base;
    int c = m - 1;
    while (c >= 0) {
      if (++idx[static_cast<std::size_t>(c)] < spec.quad_order) break;
      idx[static_cast<std::size_t>(c)] = 0;
      --c;
    }
    if (c < 0) break;
  }
  return acc;
}

double gibbs_potential(const DrivingSpec& spec, double x) {
  const double quad = 0.5 * x * x;
  if (spec.potential == GibbsPotential::quadratic) return quad;
  const double x2 = x * x;
  return quad + spec.lambda * x2 * x2;
}

struct PairSum {
  double mass = 0.0;      // integral of the Boltzmann weight
  double first_mom = 0.0; // integral of s times the weight
};

// Adaptive Simpson on the pair (w, s*w) with shared absolute tolerance.
struct GibbsIntegrator {
  const DrivingSpec* spec;
  const NeighborhoodVector* u;
  double ubar;
  double log_shift;
  int max_depth = 32;
  double worst_residual = 0.0;

  std::array<double, 2> eval(double s) const {
    double expo = 0.0;
    for (int i = 1; i < u->size(); ++i) {
      expo += gibbs_potential(*spec, (*u)[i] - ubar - s);
    }
    const double w = std::exp(-expo - log_shift);
    return {w, s * w};
  }

  std::array<double, 2> simpson(double a, double b, const std::array<double, 2>& fa,
                                const std::array<double, 2>& fm,
                                const std::array<double, 2>& fb) const {
    const double h6 = (b - a) / 6.0;
    return {h6 * (fa[0] + 4.0 * fm[0] + fb[0]), h6 * (fa[1] + 4.0 * fm[1] + fb[1])};
  }

  std::array<double, 2> recurse(double a, double b, const std::array<double, 2>& fa,
                                const std::array<double, 2>& fm,
                                const std::array<double, 2>& fb,
                                const std::array<double, 2>& whole, double tol,
                                int depth) {
    const double m = 0.5 * (a + b);
    const auto fl = eval(0.5 * (a + m));
    const auto fr = eval(0.5 * (m + b));
    const auto left = simpson(a, m, fa, fl, fm);
    const auto right = simpson(m, b, fm, fr, fb);
    const double err0 = std::fabs(left[0] + right[0] - whole[0]);
    const double err1 = std::fabs(left[1] + right[1] - whole[1]);
    if (err0 <= 15.0 * tol && err1 <= 15.0 * tol) {
      return {left[0] + right[0] + (left[0] + right[0] - whole[0]) / 15.0,
              left[1] + right[1] + (left[1] + right[1] - whole[1]) / 15.0};
    }
    if (depth >= max_depth) {
      std::ostringstream os;
      os << "gibbs quadrature failed to converge; residual "
         << std::max(err0, err1) << " at depth " << depth;
      throw QuadratureError(os.str());
    }
    const auto l = recurse(a, m, fa, fl, fm, left, 0.5 * tol, depth + 1);
    const auto r = recurse(m, b, fm, fr, fb, right, 0.5 * tol, depth + 1);
    return {l[0] + r[0], l[1] + r[1]};
  }
};

double raw_gibbs(const DrivingSpec& spec, const NeighborhoodVector& u) {
  double ubar = 0.0;
  for (int i = 1; i < u.size(); ++i) ubar += u[i];
  ubar /= static_cast<double>(u.size() - 1);

  // Centered window: the quadratic part of the potential gives a posterior
  // standard deviation of 1/sqrt(2d); ten of those cover any lambda >= 0.
  const double width = 10.0 / std::sqrt(static_cast<double>(u.size() - 1));

  GibbsIntegrator gi{&spec, &u, ubar, 0.0};
  // Coarse scan fixes the exponent shift and the absolute tolerance scale.
  double max_logw = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 32; ++i) {
    const double s = -width + 2.0 * width * i / 32.0;
    double expo = 0.0;
    for (int j = 1; j < u.size(); ++j) {
      expo += gibbs_potential(spec, u[j] - ubar - s);
    }
    max_logw = std::max(max_logw, -expo);
  }
  gi.log_shift = max_logw;

  double rough = 0.0;
  {
    const int n = 32;
    const double h = 2.0 * width / n;
    for (int i = 0; i <= n; ++i) {
      const double s = -width + i * h;
      const double f = gi.eval(s)[0];
      const double cw = (i == 0 || i == n) ? 0.5 : 1.0;
      rough += cw * f * h;
    }
  }
  const double tol = std::max(rough, 1e-300) * 1e-11;

  const auto fa = gi.eval(-width);
  const auto fm = gi.eval(0.0);
  const auto fb = gi.eval(width);
  const auto whole = gi.simpson(-width, width, fa, fm, fb);
  const auto result = gi.recurse(-width, width, fa, fm, fb, whole, tol, 0);
  return ubar + result[1] / result[0];
}

double raw_evaluate(const DrivingSpec& spec, const NeighborhoodVector& u) {
  switch (spec.kind) {
    case DrivingKind::average: return raw_average(u);
    case DrivingKind::logsumexp: return raw_logsumexp(u, spec.theta);
    case DrivingKind::gradient_form: return raw_gradient_form(u, spec.variant);
    case DrivingKind::lpp_max: return raw_lpp_max(u);
    case DrivingKind::rsos_maxmin: return raw_rsos_maxmin(u);
    case DrivingKind::smoothed: return raw_smoothed(spec, u);
    case DrivingKind::gibbs: return raw_gibbs(spec, u);
    case DrivingKind::identity: return raw_identity(u);
    case DrivingKind::broken: return raw_broken(u);
  }
  throw InvalidSpec("unknown driving kind");
}

double uniform01(std::mt19937_64& rng) {
  // Platform-stable: mt19937_64 output is pinned by the standard, the
  // distribution classes are not.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace

NeighborhoodVector::NeighborhoodVector(int dim, double fill) : dim_(dim) {
  require_dim(dim);
  v_.fill(0.0);
  for (int i = 0; i < size(); ++i) v_[static_cast<std::size_t>(i)] = fill;
}

bool NeighborhoodVector::all_finite() const {
  for (int i = 0; i < size(); ++i) {
    if (!std::isfinite(v_[static_cast<std::size_t>(i)])) return false;
  }
  return true;
}

NeighborhoodVector NeighborhoodVector::shifted(double c) const {
  NeighborhoodVector out = *this;
  for (int i = 0; i < size(); ++i) out[i] += c;
  return out;
}

const char* to_string(DrivingKind kind) {
  switch (kind) {
    case DrivingKind::average: return "average";
    case DrivingKind::logsumexp: return "logsumexp";
    case DrivingKind::gradient_form: return "gradient_form";
    case DrivingKind::lpp_max: return "lpp_max";
    case DrivingKind::rsos_maxmin: return "rsos_maxmin";
    case DrivingKind::smoothed: return "smoothed";
    case DrivingKind::gibbs: return "gibbs";
    case DrivingKind::identity: return "identity";
    case DrivingKind::broken: return "broken";
  }
  return "?";
}

const char* to_string(GradientFormVariant variant) {
  return variant == GradientFormVariant::sine ? "sine" : "sine_neg";
}

const char* to_string(GibbsPotential potential) {
  return potential == GibbsPotential::quadratic ? "quadratic" : "quartic";
}

DrivingSpec DrivingSpec::average(int dim) {
  require_dim(dim);
  DrivingSpec s;
  s.kind = DrivingKind::average;
  s.dim = dim;
  s.claimed_smoothness = Smoothness::c2;
  return s;
}

DrivingSpec DrivingSpec::logsumexp(int dim, double theta) {
  require_dim(dim);
  if (!(theta > 0.0)) throw InvalidSpec("logsumexp requires theta > 0");
  DrivingSpec s;
  s.kind = DrivingKind::logsumexp;
  s.dim = dim;
  s.theta = theta;
  s.claimed_smoothness = Smoothness::c2;
  return s;
}

DrivingSpec DrivingSpec::gradient_form(int dim, GradientFormVariant variant) {
  require_dim(dim);
  DrivingSpec s;
  s.kind = DrivingKind::gradient_form;
  s.dim = dim;
  s.variant = variant;
  s.claimed_smoothness = Smoothness::c2;
  return s;
}

DrivingSpec DrivingSpec::lpp_max(int dim) {
  require_dim(dim);
  DrivingSpec s;
  s.kind = DrivingKind::lpp_max;
  s.dim = dim;
  s.claimed_smoothness = Smoothness::lipschitz_only;
  return s;
}

DrivingSpec DrivingSpec::rsos_maxmin(int dim) {
  require_dim(dim);
  DrivingSpec s;
  s.kind = DrivingKind::rsos_maxmin;
  s.dim = dim;
  // With a single axis the half-sum of max and min over the two neighbors is
  // their plain average, which is linear.
  s.claimed_smoothness = dim == 1 ? Smoothness::c2 : Smoothness::lipschitz_only;
  return s;
}

DrivingSpec DrivingSpec::smoothed(int dim, DrivingKind base, double delta, int quad_order) {
  if (dim != 1) {
    throw InvalidSpec("smoothed driving is restricted to dimension 1");
  }
  if (base != DrivingKind::lpp_max && base != DrivingKind::rsos_maxmin) {
    throw InvalidSpec("smoothed base must be lpp_max or rsos_maxmin");
  }
  if (!(delta > 0.0)) throw InvalidSpec("smoothed requires delta > 0");
  if (quad_order < 4 || quad_order > 64) {
    throw InvalidSpec("smoothed quadrature order must lie in 4..64");
  }
  DrivingSpec s;
  s.kind = DrivingKind::smoothed;
  s.dim = dim;
  s.smoothed_base = base;
  s.delta = delta;
  s.quad_order = quad_order;
  s.claimed_smoothness = Smoothness::c2;
  return s;
}

DrivingSpec DrivingSpec::gibbs(int dim, GibbsPotential potential, double lambda) {
  require_dim(dim);
  if (lambda < 0.0) throw InvalidSpec("gibbs quartic requires lambda >= 0");
  DrivingSpec s;
  s.kind = DrivingKind::gibbs;
  s.dim = dim;
  s.potential = potential;
  s.lambda = potential == GibbsPotential::quadratic ? 0.0 : lambda;
  s.claimed_smoothness = Smoothness::c2;
  return s;
}

DrivingSpec DrivingSpec::identity(int dim) {
  require_dim(dim);
  DrivingSpec s;
  s.kind = DrivingKind::identity;
  s.dim = dim;
  s.claimed_smoothness = Smoothness::c2;
  return s;
}

DrivingSpec DrivingSpec::broken(int dim) {
  require_dim(dim);
  DrivingSpec s;
  s.kind = DrivingKind::broken;
  s.dim = dim;
  s.claimed_smoothness = Smoothness::c2;
  return s;
}

DrivingSpec DrivingSpec::shifted(double extra_offset) const {
  DrivingSpec s = *this;
  s.offset += extra_offset;
  return s;
}

std::string DrivingSpec::name() const {
  std::ostringstream os;
  os << to_string(kind);
  switch (kind) {
    case DrivingKind::logsumexp: os << "(theta=" << theta << ")"; break;
    case DrivingKind::gradient_form: os << "(" << to_string(variant) << ")"; break;
    case DrivingKind::smoothed:
      os << "(" << to_string(smoothed_base) << ",delta=" << delta << ")";
      break;
    case DrivingKind::gibbs:
      os << "(" << to_string(potential);
      if (potential == GibbsPotential::quartic) os << ",lambda=" << lambda;
      os << ")";
      break;
    default: break;
  }
  os << " d=" << dim;
  return os.str();
}

double evaluate(const DrivingSpec& spec, const NeighborhoodVector& u) {
  if (u.dim() != spec.dim) {
    throw DimensionMismatch("neighborhood dimension " + std::to_string(u.dim()) +
                            " does not match spec dimension " +
                            std::to_string(spec.dim));
  }
  return raw_evaluate(spec, u) - spec.offset;
}

ValidationReport validate_properties(const DrivingSpec& spec, int sample_count,
                                     double tol, std::uint64_t seed) {
  if (sample_count < 1) throw InvalidSpec("sample_count must be >= 1");
  ValidationReport report;
  report.seed = seed;
  report.samples = sample_count;
  report.tol = tol;
  std::mt19937_64 rng(seed);

  auto record = [&](AxiomCheck& check, double violation, const NeighborhoodVector& u,
                    const NeighborhoodVector& v, double shift) {
    if (violation > check.worst) {
      check.worst = violation;
      check.witness_u.clear();
      check.witness_v.clear();
      for (int i = 0; i < u.size(); ++i) check.witness_u.push_back(u[i]);
      for (int i = 0; i < v.size(); ++i) check.witness_v.push_back(v[i]);
      check.witness_shift = shift;
      if (violation > tol) check.passed = false;
    }
  };

  const int n = 2 * spec.dim + 1;
  for (int s = 0; s < sample_count; ++s) {
    NeighborhoodVector u(spec.dim);
    for (int i = 0; i < n; ++i) u[i] = uniform(rng, -1.0, 1.0);
    const double fu = evaluate(spec, u);

    // equivariance under constant shifts
    {
      const double c = uniform(rng, -2.0, 2.0);
      const NeighborhoodVector v = u.shifted(c);
      record(report.equivariance, std::fabs(evaluate(spec, v) - fu - c), u, v, c);
    }

    // monotonicity: coordinatewise domination
    {
      NeighborhoodVector v = u;
      for (int i = 0; i < n; ++i) v[i] += uniform(rng, 0.0, 1.0);
      record(report.monotonicity, fu - evaluate(spec, v), u, v, 0.0);
    }

    // lattice symmetries: reflection of one axis, and an axis swap when d > 1
    {
      const int axis = static_cast<int>(rng() % static_cast<std::uint64_t>(spec.dim));
      NeighborhoodVector v = u;
      std::swap(v[NeighborhoodVector::flat(axis, +1)],
                v[NeighborhoodVector::flat(axis, -1)]);
      record(report.symmetry, std::fabs(evaluate(spec, v) - fu), u, v, 0.0);
      if (spec.dim > 1) {
        const int other =
            (axis + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(spec.dim - 1))) %
            spec.dim;
        NeighborhoodVector w = u;
        std::swap(w[NeighborhoodVector::flat(axis, +1)],
                  w[NeighborhoodVector::flat(other, +1)]);
        std::swap(w[NeighborhoodVector::flat(axis, -1)],
                  w[NeighborhoodVector::flat(other, -1)]);
        record(report.symmetry, std::fabs(evaluate(spec, w) - fu), u, w, 0.0);
      }
    }

    // sup-norm contraction
    {
      NeighborhoodVector v(spec.dim);
      for (int i = 0; i < n; ++i) v[i] = uniform(rng, -1.0, 1.0);
      double sup = 0.0;
      for (int i = 0; i < n; ++i) sup = std::max(sup, std::fabs(u[i] - v[i]));
      record(report.contraction, std::fabs(fu - evaluate(spec, v)) - sup, u, v, 0.0);
    }
  }
  return report;
}

std::vector<double> default_probe_steps() { return {0.02, 0.01, 0.005}; }

SmoothnessVerdict smoothness_probe(const DrivingSpec& spec,
                                   const std::vector<double>& steps,
                                   double threshold) {
  if (steps.size() < 3) throw InvalidSpec("smoothness probe needs >= 3 steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(steps[i] > 0.0) || (i > 0 && !(steps[i] < steps[i - 1]))) {
      throw InvalidSpec("smoothness probe steps must be positive and decreasing");
    }
  }

  SmoothnessVerdict verdict;
  verdict.threshold = threshold;
  const double tie_offset = 2.0 * steps.front();

  for (int axis = 0; axis < spec.dim; ++axis) {
    for (int sign = +1; sign >= -1; sign -= 2) {
      const int dir = NeighborhoodVector::flat(axis, sign);
      // Second base raises one other neighbor, parking a potential max/min
      // tie at the probed coordinate's origin.
      const int other = spec.dim == 1 ? NeighborhoodVector::flat(0, -sign)
                                      : NeighborhoodVector::flat((axis + 1) % spec.dim, +1);
      for (int base_case = 0; base_case < 2; ++base_case) {
        NeighborhoodVector base(spec.dim);
        if (base_case == 1) base[other] = tie_offset;

        DirectionProbe probe;
        probe.axis = axis;
        probe.sign = sign;
        probe.base_offset = base_case == 1 ? tie_offset : 0.0;

        const double f0 = evaluate(spec, base);
        for (const double h : steps) {
          NeighborhoodVector up = base;
          NeighborhoodVector dn = base;
          up[dir] += h;
          dn[dir] -= h;
          probe.estimates.push_back(
              (evaluate(spec, up) - 2.0 * f0 + evaluate(spec, dn)) / (h * h));
        }
        const auto [mn, mx] =
            std::minmax_element(probe.estimates.begin(), probe.estimates.end());
        const double scale = std::max({std::fabs(*mn), std::fabs(*mx), 1e-3});
        probe.spread = (*mx - *mn) / scale;
        verdict.max_spread = std::max(verdict.max_spread, probe.spread);
        verdict.probes.push_back(std::move(probe));
      }
    }
  }
  verdict.c2_consistent = verdict.max_spread <= threshold;
  return verdict;
}

std::vector<DrivingSpec> shipped_catalog(int dim) {
  std::vector<DrivingSpec> out;
  out.push_back(DrivingSpec::average(dim));
  out.push_back(DrivingSpec::logsumexp(dim, 1.0));
  out.push_back(DrivingSpec::gradient_form(dim, GradientFormVariant::sine));
  out.push_back(DrivingSpec::gradient_form(dim, GradientFormVariant::sine_neg));
  out.push_back(DrivingSpec::lpp_max(dim));
  out.push_back(DrivingSpec::rsos_maxmin(dim));
  if (dim == 1) {
    out.push_back(DrivingSpec::smoothed(1, DrivingKind::lpp_max, 0.5));
  }
  out.push_back(DrivingSpec::gibbs(dim, GibbsPotential::quadratic));
  out.push_back(DrivingSpec::gibbs(dim, GibbsPotential::quartic, 0.1));
  out.push_back(DrivingSpec::identity(dim));
  return out;
}

}  // namespace kpz
