#include "kpz/lattice.hpp"

#include <cmath>
#include <sstream>

#include "kpz/errors.hpp"

namespace kpz {

namespace {

void require_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw InvalidSpec("dimension must be in 1.." + std::to_string(kMaxDim));
  }
}

}  // namespace

const char* to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::linear: return "linear";
    case InitialKind::cosine: return "cosine";
    case InitialKind::capped_abs: return "capped_abs";
    case InitialKind::constant: return "constant";
  }
  return "?";
}

const char* to_string(ParityRule rule) {
  switch (rule) {
    case ParityRule::floor: return "floor";
    case ParityRule::parity0: return "parity0";
    case ParityRule::parity1: return "parity1";
  }
  return "?";
}

InitialData InitialData::linear(int dim, const std::array<double, kMaxDim>& slope) {
  require_dim(dim);
  InitialData g;
  g.kind = InitialKind::linear;
  g.dim = dim;
  g.slope = slope;
  g.lipschitz = 0.0;
  for (int i = 0; i < dim; ++i) g.lipschitz += std::fabs(slope[i]);
  return g;
}

InitialData InitialData::cosine(int dim, double amplitude,
                                const std::array<double, kMaxDim>& wavevector) {
  require_dim(dim);
  InitialData g;
  g.kind = InitialKind::cosine;
  g.dim = dim;
  g.amplitude = amplitude;
  g.wavevector = wavevector;
  double k1 = 0.0;
  for (int i = 0; i < dim; ++i) k1 += std::fabs(wavevector[i]);
  g.lipschitz = std::fabs(amplitude) * k1;
  return g;
}

InitialData InitialData::capped_abs(int dim, double cap) {
  require_dim(dim);
  if (!(cap > 0.0)) throw InvalidSpec("capped_abs needs cap > 0");
  InitialData g;
  g.kind = InitialKind::capped_abs;
  g.dim = dim;
  g.cap = cap;
  g.lipschitz = 1.0;
  return g;
}

InitialData InitialData::constant(int dim, double value) {
  require_dim(dim);
  InitialData g;
  g.kind = InitialKind::constant;
  g.dim = dim;
  g.value = value;
  g.lipschitz = 0.0;
  return g;
}

double InitialData::eval(const double* x) const {
  switch (kind) {
    case InitialKind::linear: {
      double acc = offset;
      for (int i = 0; i < dim; ++i) acc += slope[i] * x[i];
      return acc;
    }
    case InitialKind::cosine: {
      double phase = 0.0;
      for (int i = 0; i < dim; ++i) phase += wavevector[i] * x[i];
      return offset + amplitude * std::cos(phase);
    }
    case InitialKind::capped_abs: {
      double r2 = 0.0;
      for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
      return offset + std::min(std::sqrt(r2), cap);
    }
    case InitialKind::constant: return offset + value;
  }
  return 0.0;
}

InitialData InitialData::shifted_by(double c) const {
  InitialData g = *this;
  g.offset += c;
  return g;
}

std::vector<double> InitialData::axis_kinks(int axis) const {
  (void)axis;
  if (kind == InitialKind::capped_abs && dim == 1) return {-cap, 0.0, cap};
  return {};
}

double InitialData::eval_site(const Site& s, double epsilon) const {
  double x[kMaxDim] = {0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) x[i] = epsilon * static_cast<double>(s[i]);
  return eval(x);
}

void InitialData::gradient(const double* x, double* out) const {
  switch (kind) {
    case InitialKind::linear:
      for (int i = 0; i < dim; ++i) out[i] = slope[i];
      return;
    case InitialKind::cosine: {
      double phase = 0.0;
      for (int i = 0; i < dim; ++i) phase += wavevector[i] * x[i];
      const double s = -amplitude * std::sin(phase);
      for (int i = 0; i < dim; ++i) out[i] = s * wavevector[i];
      return;
    }
    case InitialKind::capped_abs: {
      double r2 = 0.0;
      for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
      const double r = std::sqrt(r2);
      if (r == 0.0 || r >= cap) {
        for (int i = 0; i < dim; ++i) out[i] = 0.0;
      } else {
        for (int i = 0; i < dim; ++i) out[i] = x[i] / r;
      }
      return;
    }
    case InitialKind::constant:
      for (int i = 0; i < dim; ++i) out[i] = 0.0;
      return;
  }
}

std::string InitialData::name() const {
  std::ostringstream os;
  os << to_string(kind);
  switch (kind) {
    case InitialKind::linear:
      os << "(a=" << slope[0];
      for (int i = 1; i < dim; ++i) os << "," << slope[i];
      os << ")";
      break;
    case InitialKind::cosine:
      os << "(A=" << amplitude << ",k=" << wavevector[0];
      for (int i = 1; i < dim; ++i) os << "," << wavevector[i];
      os << ")";
      break;
    case InitialKind::capped_abs: os << "(M=" << cap << ")"; break;
    case InitialKind::constant: os << "(" << value << ")"; break;
  }
  return os.str();
}

double HField::sup_abs() const {
  double m = 0.0;
  for (const double v : values) m = std::max(m, std::fabs(v));
  return m;
}

SurfaceSlice init_surface(const InitialData& g, double epsilon, const Box& box) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw InvalidSpec("epsilon must lie in (0,1)");
  }
  if (box.dim != g.dim) throw DimensionMismatch("box dimension != initial data dimension");
  if (box.empty()) throw InvalidSpec("initial box is empty");
  SurfaceSlice slice;
  slice.epsilon = epsilon;
  slice.time_step = 0;
  slice.domain = box;
  slice.heights.resize(static_cast<std::size_t>(box.volume()));
  for_each_site(box, [&](const Site& s) {
    slice.heights[box.index_of(s)] = g.eval_site(s, epsilon);
  });
  return slice;
}

SurfaceSlice evolve_step(const SurfaceSlice& slice, const DrivingSpec& spec) {
  if (spec.dim != slice.domain.dim) {
    throw DimensionMismatch("driving dimension != slice dimension");
  }
  for (int i = 0; i < slice.domain.dim; ++i) {
    if (slice.domain.side(i) < 3) {
      throw DomainExhausted("domain side " + std::to_string(i) +
                            " has no interior left");
    }
  }
  SurfaceSlice next;
  next.epsilon = slice.epsilon;
  next.time_step = slice.time_step + 1;
  next.domain = slice.domain.shrunk(1);
  next.heights.resize(static_cast<std::size_t>(next.domain.volume()));

  const Box& prev_box = slice.domain;
  NeighborhoodVector u(spec.dim);
  for_each_site(next.domain, [&](const Site& s) {
    u.center() = slice.heights[prev_box.index_of(s)];
    Site nb = s;
    for (int axis = 0; axis < spec.dim; ++axis) {
      nb[axis] = s[axis] + 1;
      u.neighbor(axis, +1) = slice.heights[prev_box.index_of(nb)];
      nb[axis] = s[axis] - 1;
      u.neighbor(axis, -1) = slice.heights[prev_box.index_of(nb)];
      nb[axis] = s[axis];
    }
    next.heights[next.domain.index_of(s)] = evaluate(spec, u);
  });
  return next;
}

HField compute_h_field(const SurfaceSlice& prev, const SurfaceSlice& next,
                       const CoefficientSet& cs) {
  if (next.time_step != prev.time_step + 1) {
    throw InvalidSpec("h-field needs consecutive time steps");
  }
  const Box interior = prev.domain.shrunk(1);
  for (int i = 0; i < prev.domain.dim; ++i) {
    if (next.domain.lo[i] < interior.lo[i] || next.domain.hi[i] > interior.hi[i]) {
      throw InvalidSpec("next domain not contained in the interior of prev");
    }
  }
  HField h;
  h.epsilon = next.epsilon;
  h.time_step = next.time_step;
  h.domain = next.domain;
  h.values.resize(static_cast<std::size_t>(next.domain.volume()));
  const int d = prev.domain.dim;
  for_each_site(next.domain, [&](const Site& s) {
    double acc = next.at(s) - cs.alpha * prev.at(s);
    Site nb = s;
    for (int axis = 0; axis < d; ++axis) {
      nb[axis] = s[axis] + 1;
      acc -= cs.beta * prev.at(nb);
      nb[axis] = s[axis] - 1;
      acc -= cs.beta * prev.at(nb);
      nb[axis] = s[axis];
    }
    h.values[h.domain.index_of(s)] = acc;
  });
  return h;
}

RoughnessReport roughness_report(const SurfaceSlice& slice) {
  RoughnessReport report;
  const Box& box = slice.domain;
  const int d = box.dim;
  for_each_site(box, [&](const Site& s) {
    Site nb = s;
    for (int axis = 0; axis < d; ++axis) {
      if (s[axis] + 1 <= box.hi[axis]) {
        nb[axis] = s[axis] + 1;
        const double inc = std::fabs(slice.at(nb) - slice.at(s));
        if (inc > report.max_increment) {
          report.max_increment = inc;
          report.argmax_increment = s;
          report.increment_axis = axis;
        }
        if (s[axis] - 1 >= box.lo[axis]) {
          const double up = slice.at(nb);
          nb[axis] = s[axis] - 1;
          const double dn = slice.at(nb);
          const double second = std::fabs(up - 2.0 * slice.at(s) + dn);
          if (second > report.max_second_diff[axis]) {
            report.max_second_diff[axis] = second;
            report.argmax_second_diff[axis] = s;
          }
        }
        nb[axis] = s[axis];
      }
    }
  });
  return report;
}

double rescaled_memory_estimate(int dim, long long t_steps) {
  double volume = 1.0;
  for (int i = 0; i < dim; ++i) volume *= static_cast<double>(2 * t_steps + 1);
  return 2.0 * 8.0 * volume;
}

RescaledValue evaluate_rescaled(const InitialData& g, const DrivingSpec& spec,
                                double epsilon, double t, const double* x,
                                ParityRule rule, const EvolutionLimits& limits) {
  if (g.dim != spec.dim) throw DimensionMismatch("initial data dimension != spec dimension");
  if (!(t >= 0.0)) throw InvalidSpec("t must be nonnegative");
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) throw InvalidSpec("epsilon must lie in (0,1)");

  RescaledValue out;
  out.time_steps = guarded_floor(t / (epsilon * epsilon));

  double scaled[kMaxDim] = {0.0, 0.0, 0.0};
  for (int i = 0; i < g.dim; ++i) scaled[i] = x[i] / epsilon;
  switch (rule) {
    case ParityRule::floor:
      out.site = floor_site(scaled, g.dim);
      break;
    case ParityRule::parity0:
      out.site = parity_floor(scaled, g.dim, static_cast<int>(out.time_steps % 2));
      break;
    case ParityRule::parity1:
      out.site = parity_floor(scaled, g.dim, static_cast<int>((out.time_steps + 1) % 2));
      break;
  }

  if (rule != ParityRule::floor) {
    // Parity evaluators only matter for periodic walks; estimate the hold
    // derivative cheaply and flag when it is clearly nonzero.
    const double h = 1e-4;
    NeighborhoodVector up(spec.dim), dn(spec.dim);
    up.center() = h;
    dn.center() = -h;
    const double alpha_est = (evaluate(spec, up) - evaluate(spec, dn)) / (2.0 * h);
    out.parity_flagged = std::fabs(alpha_est) > 1e-6;
  }

  const double bytes = rescaled_memory_estimate(g.dim, out.time_steps);
  if (bytes > limits.memory_cap_bytes) {
    std::ostringstream os;
    os << "light-cone evolution needs about " << bytes
       << " bytes, above the cap of " << limits.memory_cap_bytes;
    throw SizingError(os.str());
  }

  const Box box = Box::centered(g.dim, out.site, out.time_steps);
  SurfaceSlice slice = init_surface(g, epsilon, box);
  for (long long step = 0; step < out.time_steps; ++step) {
    slice = evolve_step(slice, spec);
  }
  const double phi0 = evaluate(spec, NeighborhoodVector(spec.dim));
  out.value = slice.at(out.site) - static_cast<double>(out.time_steps) * phi0;
  return out;
}

}  // namespace kpz
