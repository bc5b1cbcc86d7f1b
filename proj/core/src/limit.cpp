#include "kpz/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "kpz/errors.hpp"

namespace kpz {

namespace {

// Composite-Simpson weight of node i among n (n odd), including the h/3.
double simpson_weight(int i, int n, double h) {
  const double c = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
  return c * h / 3.0;
}

// Composite Simpson nodes along one axis, with panels split at the initial
// datum's kinks so a non-smooth g does not stall the h^4 convergence.
struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

AxisRule make_axis_rule(double lo, double hi, std::vector<double> kinks,
                        int target_nodes) {
  std::vector<double> edges = {lo};
  std::sort(kinks.begin(), kinks.end());
  for (const double k : kinks) {
    if (k > lo + 1e-12 && k < hi - 1e-12) edges.push_back(k);
  }
  edges.push_back(hi);

  AxisRule rule;
  const double total = hi - lo;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p];
    const double b = edges[p + 1];
    int n = static_cast<int>(std::ceil(target_nodes * (b - a) / total));
    n = std::max(n, 5);
    if (n % 2 == 0) ++n;
    const double h = (b - a) / (n - 1);
    for (int i = 0; i < n; ++i) {
      rule.nodes.push_back(a + i * h);
      rule.weights.push_back(simpson_weight(i, n, h));
    }
  }
  return rule;
}

struct TensorQuadrature {
  int dim = 1;
  std::array<AxisRule, kMaxDim> axes;

  static TensorQuadrature make(const InitialData& g, const double* center,
                               double radius, int target_nodes) {
    TensorQuadrature quad;
    quad.dim = g.dim;
    for (int a = 0; a < g.dim; ++a) {
      quad.axes[static_cast<std::size_t>(a)] =
          make_axis_rule(center[a] - radius, center[a] + radius, g.axis_kinks(a),
                         target_nodes);
    }
    return quad;
  }

  template <typename F>
  void visit(F&& f) const {
    std::array<std::size_t, kMaxDim> idx{};
    while (true) {
      double y[kMaxDim] = {0.0, 0.0, 0.0};
      double w = 1.0;
      for (int a = 0; a < dim; ++a) {
        const auto& rule = axes[static_cast<std::size_t>(a)];
        y[a] = rule.nodes[idx[static_cast<std::size_t>(a)]];
        w *= rule.weights[idx[static_cast<std::size_t>(a)]];
      }
      f(y, w);
      int a = dim - 1;
      while (a >= 0) {
        if (++idx[static_cast<std::size_t>(a)] < axes[static_cast<std::size_t>(a)].nodes.size()) break;
        idx[static_cast<std::size_t>(a)] = 0;
        --a;
      }
      if (a < 0) break;
    }
  }
};

double log_kernel_prefactor(int dim, double beta, double t) {
  return -0.5 * dim * std::log(4.0 * std::numbers::pi * beta * t);
}

// log of integral K(t, x - y) exp(b g(y)) dy over the truncated box, with
// the largest exponent pulled out of the sum.
double log_heat_exp_integral(const InitialData& g, double beta, double b, double t,
                             const double* x, double radius, int n) {
  const auto quad = TensorQuadrature::make(g, x, radius, n);
  const double inv_denom = 1.0 / (4.0 * beta * t);
  auto exponent = [&](const double* y) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double d = x[a] - y[a];
      r2 += d * d;
    }
    return b * g.eval(y) - r2 * inv_denom;
  };
  double peak = -std::numeric_limits<double>::infinity();
  quad.visit([&](const double* y, double) { peak = std::max(peak, exponent(y)); });
  double acc = 0.0;
  quad.visit([&](const double* y, double w) { acc += w * std::exp(exponent(y) - peak); });
  return peak + std::log(acc) + log_kernel_prefactor(g.dim, beta, t);
}

double heat_integral(const InitialData& g, double beta, double t, const double* x,
                     double radius, int n) {
  const auto quad = TensorQuadrature::make(g, x, radius, n);
  const double inv_denom = 1.0 / (4.0 * beta * t);
  const double pref = std::exp(log_kernel_prefactor(g.dim, beta, t));
  double acc = 0.0;
  quad.visit([&](const double* y, double w) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double d = x[a] - y[a];
      r2 += d * d;
    }
    acc += w * pref * std::exp(-r2 * inv_denom) * g.eval(y);
  });
  return acc;
}

// Halve the spacing until two successive evaluations agree to tol. The
// starting count keeps several nodes per kernel width, otherwise the first
// comparisons sample a narrow Gaussian too coarsely to mean anything.
template <typename Eval>
double refine(const QuadratureConfig& quad, double radius, double kernel_width,
              Eval&& eval) {
  int n = 33;
  const double wanted = 12.0 * radius / std::max(kernel_width, 1e-6);
  while (n < wanted && 2 * n - 1 <= quad.max_points_per_axis) n = 2 * n - 1;
  double prev = eval(n);
  while (true) {
    n = 2 * n - 1;
    if (n > quad.max_points_per_axis) {
      std::ostringstream os;
      os << "quadrature did not converge within " << quad.max_points_per_axis
         << " points per axis";
      throw QuadratureError(os.str());
    }
    const double cur = eval(n);
    if (std::fabs(cur - prev) < quad.tol) return cur;
    prev = cur;
  }
}

}  // namespace

LimitEvaluator LimitEvaluator::make(const InitialData& g, double beta, double gamma,
                                    QuadratureConfig quad) {
  if (quad.max_points_per_axis < 16) throw InvalidSpec("max_points_per_axis >= 16");
  if (!(quad.tol > 0.0)) throw InvalidSpec("quadrature tol must be positive");
  LimitEvaluator ev;
  ev.g = g;
  ev.beta = beta;
  ev.gamma = gamma;
  ev.branch = classify_branch(beta, gamma);
  ev.b_ratio = ev.branch == Branch::kpz ? gamma / beta : 0.0;
  ev.quad = quad;
  return ev;
}

LimitEvaluator LimitEvaluator::from_coefficients(const InitialData& g,
                                                 const CoefficientSet& cs,
                                                 QuadratureConfig quad) {
  return make(g, cs.beta, cs.gamma, quad);
}

double LimitEvaluator::gradient_bound() const {
  return g.lipschitz * std::sqrt(static_cast<double>(g.dim));
}

double truncation_radius(const LimitEvaluator& ev, double t) {
  const double width = std::sqrt(4.0 * ev.beta * t);
  const double tail = std::sqrt(2.0 * std::log(1.0 / ev.quad.tol));
  const double drift =
      std::fabs(ev.b_ratio) * ev.g.lipschitz * width / 2.0;
  return width * (tail + drift) + 2.0;
}

double cole_hopf_eval(const LimitEvaluator& ev, double t, const double* x) {
  if (t < 0.0) throw InvalidSpec("t must be nonnegative");
  if (t == 0.0 || ev.branch == Branch::frozen) return ev.g.eval(x);
  const double radius = truncation_radius(ev, t);
  const double width = std::sqrt(2.0 * ev.beta * t);
  if (ev.branch == Branch::heat) {
    return refine(ev.quad, radius, width, [&](int n) {
      return heat_integral(ev.g, ev.beta, t, x, radius, n);
    });
  }
  const double scale = ev.beta / ev.gamma;
  return refine(ev.quad, radius, width, [&](int n) {
    return scale * log_heat_exp_integral(ev.g, ev.beta, ev.b_ratio, t, x, radius, n);
  });
}

std::array<double, kMaxDim> limit_gradient(const LimitEvaluator& ev, double t,
                                           const double* x) {
  if (!(t > 0.0)) throw InvalidSpec("limit_gradient needs t > 0");
  std::array<double, kMaxDim> grad{};
  const double h = ev.quad.gradient_fd_step;
  double p[kMaxDim] = {0.0, 0.0, 0.0};
  for (int a = 0; a < ev.g.dim; ++a) p[a] = x[a];
  for (int a = 0; a < ev.g.dim; ++a) {
    auto central = [&](double step) {
      p[a] = x[a] + step;
      const double up = cole_hopf_eval(ev, t, p);
      p[a] = x[a] - step;
      const double dn = cole_hopf_eval(ev, t, p);
      p[a] = x[a];
      return (up - dn) / (2.0 * step);
    };
    const double coarse = central(h);
    const double fine = central(0.5 * h);
    grad[a] = (4.0 * fine - coarse) / 3.0;
  }
  return grad;
}

double duhamel_residual(const LimitEvaluator& ev, double t, const double* x,
                        const DuhamelOptions& opts) {
  if (ev.g.dim != 1) throw DimensionMismatch("duhamel residual is restricted to d = 1");
  if (!(t > 0.0)) throw InvalidSpec("duhamel residual needs t > 0");
  if (ev.branch == Branch::frozen) throw InvalidSpec("duhamel residual needs beta != 0");
  if (opts.time_intervals < 2 || opts.time_intervals % 2 != 0) {
    throw InvalidSpec("time_intervals must be even and >= 2");
  }

  const double lhs = cole_hopf_eval(ev, t, x);
  const double heat_term =
      refine(ev.quad, truncation_radius(ev, t), std::sqrt(2.0 * ev.beta * t), [&](int n) {
        return heat_integral(ev.g, ev.beta, t, x, truncation_radius(ev, t), n);
      });

  // |grad f|^2 is bounded, so a truncation at seven Gaussian widths keeps
  // the neglected inner tail at the e^{-49} level.
  auto inner_radius = [&](double s) { return 7.0 * std::sqrt(4.0 * ev.beta * s); };

  auto grad_sq_at = [&](double tau, double y) {
    const double p[1] = {y};
    const auto grad = limit_gradient(ev, tau, p);
    return grad[0] * grad[0];
  };

  auto integrand = [&](double s) {
    if (s == 0.0) return grad_sq_at(t, x[0]);
    if (s == t) {
      // tau = 0: the gradient of the initial data enters directly.
      return refine(ev.quad, inner_radius(t), std::sqrt(2.0 * ev.beta * t), [&](int n) {
        const auto quad = TensorQuadrature::make(ev.g, x, inner_radius(t), n);
        const double inv_denom = 1.0 / (4.0 * ev.beta * t);
        const double pref = std::exp(log_kernel_prefactor(1, ev.beta, t));
        double acc = 0.0;
        quad.visit([&](const double* y, double w) {
          double dg = 0.0;
          ev.g.gradient(y, &dg);
          const double d = x[0] - y[0];
          acc += w * pref * std::exp(-d * d * inv_denom) * dg * dg;
        });
        return acc;
      });
    }
    const double tau = t - s;
    const double radius = inner_radius(s);
    const int n = opts.space_points;
    const double h = 2.0 * radius / (n - 1);
    const double inv_denom = 1.0 / (4.0 * ev.beta * s);
    const double pref = std::exp(log_kernel_prefactor(1, ev.beta, s));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double y = x[0] - radius + i * h;
      const double d = x[0] - y;
      acc += simpson_weight(i, n, h) * pref * std::exp(-d * d * inv_denom) *
             grad_sq_at(tau, y);
    }
    return acc;
  };

  const int nt = opts.time_intervals;
  const double hs = t / nt;
  double time_integral = 0.0;
  for (int j = 0; j <= nt; ++j) {
    const double c = (j == 0 || j == nt) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    const double s = j == nt ? t : j * hs;  // hit the endpoint exactly
    time_integral += c * hs / 3.0 * integrand(s);
  }

  return std::fabs(lhs - heat_term - ev.gamma * time_integral);
}

}  // namespace kpz
