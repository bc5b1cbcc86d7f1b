#include "kpz/rwalk.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kpz/errors.hpp"

namespace kpz {

namespace {

void check_probabilities(double alpha, double beta, int dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidSpec("dimension must be in 1..3");
  if (alpha < 0.0 || beta < 0.0) {
    throw InvalidSpec("walk probabilities must be nonnegative");
  }
  if (std::fabs(alpha + 2.0 * dim * beta - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "alpha + 2 d beta = " << alpha + 2.0 * dim * beta << " != 1";
    throw InvalidSpec(os.str());
  }
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

double WalkKernel::total_mass() const {
  double acc = 0.0;
  for (const double m : mass) acc += m;
  return acc;
}

WalkKernel kernel_exact(double alpha, double beta, int dim, long long t) {
  check_probabilities(alpha, beta, dim);
  if (t < 0) throw InvalidSpec("t must be nonnegative");

  WalkKernel k;
  k.alpha = alpha;
  k.beta = beta;
  k.dim = dim;
  k.t = t;
  k.support = Box::cube(dim, -t, t);
  k.mass.assign(static_cast<std::size_t>(k.support.volume()), 0.0);
  k.mass[k.support.index_of(Site{})] = 1.0;

  std::vector<double> next(k.mass.size());
  for (long long step = 1; step <= t; ++step) {
    // Only sites within step of the origin can carry mass; updating the full
    // box is still exact because everything outside is zero.
    for_each_site(k.support, [&](const Site& s) {
      double acc = alpha * k.mass[k.support.index_of(s)];
      Site nb = s;
      for (int axis = 0; axis < dim; ++axis) {
        nb[axis] = s[axis] + 1;
        if (nb[axis] <= k.support.hi[axis]) acc += beta * k.mass[k.support.index_of(nb)];
        nb[axis] = s[axis] - 1;
        if (nb[axis] >= k.support.lo[axis]) acc += beta * k.mass[k.support.index_of(nb)];
        nb[axis] = s[axis];
      }
      next[k.support.index_of(s)] = acc;
    });
    k.mass.swap(next);
  }
  return k;
}

double kernel_gaussian(long long t, const Site& x, int dim, double beta,
                       ParityMode mode) {
  if (t < 1) throw InvalidSpec("kernel_gaussian needs t >= 1");
  double r2 = 0.0;
  for (int i = 0; i < dim; ++i) r2 += static_cast<double>(x[i]) * static_cast<double>(x[i]);
  const double denom = 4.0 * beta * static_cast<double>(t);
  const double density =
      std::pow(4.0 * std::numbers::pi * beta * static_cast<double>(t), -dim / 2.0) *
      std::exp(-r2 / denom);
  if (mode == ParityMode::aperiodic) return density;
  const int xt_parity = static_cast<int>(((t % 2) + 2) % 2);
  return coordinate_sum_parity(x, dim) == xt_parity ? 2.0 * density : 0.0;
}

ErrorTable clt_error_table(double alpha, double beta, int dim,
                           const std::vector<long long>& times) {
  check_probabilities(alpha, beta, dim);
  if (times.empty()) throw InvalidSpec("times must be nonempty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 2 || (i > 0 && times[i] <= times[i - 1])) {
      throw InvalidSpec("times must be increasing and >= 2");
    }
  }
  const ParityMode mode = alpha == 0.0 ? ParityMode::periodic : ParityMode::aperiodic;

  ErrorTable table;
  std::vector<double> log_t, log_e;
  for (const long long t : times) {
    const WalkKernel k = kernel_exact(alpha, beta, dim, t);
    // Pad the scan beyond the light cone until the Gaussian tail is far
    // below round-off of the peak.
    const long long pad =
        8 + static_cast<long long>(std::ceil(std::sqrt(4.0 * beta * t * 45.0)));
    const Box scan = Box::cube(dim, -t - pad, t + pad);
    double sup = 0.0;
    for_each_site(scan, [&](const Site& s) {
      const double err = std::fabs(k.at(s) - kernel_gaussian(t, s, dim, beta, mode));
      if (err > sup) sup = err;
    });
    ErrorTableRow row;
    row.t = t;
    row.sup_err = sup;
    row.scaled_err = sup * std::pow(static_cast<double>(t), (dim + 2) / 2.0);
    table.rows.push_back(row);
    log_t.push_back(std::log(static_cast<double>(t)));
    log_e.push_back(std::log(sup));
  }
  table.fitted_order =
      times.size() >= 2 ? -fit_loglog_slope(log_t, log_e) : 0.0;
  return table;
}

ReconstructionReport reconstruct_via_representation(const InitialData& g,
                                                    const DrivingSpec& spec,
                                                    double epsilon,
                                                    long long t_steps,
                                                    const std::vector<Site>& targets) {
  if (t_steps < 1) throw InvalidSpec("t_steps must be >= 1");
  if (targets.empty()) throw InvalidSpec("need at least one target site");

  ReconstructionReport report;
  report.coeffs = extract_coefficients(spec);
  report.targets = targets;

  Box target_box;
  target_box.dim = g.dim;
  target_box.lo = targets.front();
  target_box.hi = targets.front();
  for (const Site& s : targets) {
    for (int i = 0; i < g.dim; ++i) {
      target_box.lo[i] = std::min(target_box.lo[i], s[i]);
      target_box.hi[i] = std::max(target_box.hi[i], s[i]);
    }
  }
  const Box init_box = target_box.dilated(t_steps);

  // Evolve once, keeping every slice and the h-field of every step.
  std::vector<SurfaceSlice> slices;
  slices.reserve(static_cast<std::size_t>(t_steps) + 1);
  slices.push_back(init_surface(g, epsilon, init_box));
  std::vector<HField> hfields;  // hfields[s] is h at time step s+1
  for (long long step = 0; step < t_steps; ++step) {
    SurfaceSlice next = evolve_step(slices.back(), spec);
    hfields.push_back(compute_h_field(slices.back(), next, report.coeffs));
    slices.push_back(std::move(next));
  }

  // Kernels p(s, .) for s = 0..t_steps.
  std::vector<WalkKernel> kernels;
  kernels.reserve(static_cast<std::size_t>(t_steps) + 1);
  for (long long s = 0; s <= t_steps; ++s) {
    kernels.push_back(kernel_exact(report.coeffs.alpha, report.coeffs.beta, g.dim, s));
  }

  const SurfaceSlice& initial = slices.front();
  const SurfaceSlice& final_slice = slices.back();
  for (const Site& x : targets) {
    double acc = 0.0;
    // Initial-data term: sum_y p(t, x - y) g_eps(y) over the light cone.
    for_each_site(kernels.back().support, [&](const Site& d) {
      Site y = x;
      for (int i = 0; i < g.dim; ++i) y[i] = x[i] - d[i];
      acc += kernels.back().at(d) * initial.at(y);
    });
    // Source terms: sum over 0 <= s <= t-1 of p(s, x - y) h(t - s, y).
    for (long long s = 0; s <= t_steps - 1; ++s) {
      const WalkKernel& p = kernels[static_cast<std::size_t>(s)];
      const HField& h = hfields[static_cast<std::size_t>(t_steps - s - 1)];
      for_each_site(p.support, [&](const Site& d) {
        Site y = x;
        for (int i = 0; i < g.dim; ++i) y[i] = x[i] - d[i];
        acc += p.at(d) * h.at(y);
      });
    }
    const double direct = final_slice.at(x);
    report.direct.push_back(direct);
    report.reconstructed.push_back(acc);
    report.residual.push_back(std::fabs(direct - acc));
    report.max_residual = std::max(report.max_residual, report.residual.back());
  }
  return report;
}

}  // namespace kpz
