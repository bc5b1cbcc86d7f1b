// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Every tolerance here is pinned; nothing is deferred to calibration.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "kpz/harness.hpp"
#include "kpz/rwalk.hpp"
#include "oracles.hpp"

using namespace kpz;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int index, const char* name, bool ok, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %02d %-28s %s (%.1fs)\n", ok ? "PASS" : "FAIL", index,
              name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

InitialData cosine1() { return InitialData::cosine(1, 1.0, {1.0, 0.0, 0.0}); }
InitialData linear1() { return InitialData::linear(1, {1.0, 0.0, 0.0}); }

// --- 1. representation identity -------------------------------------------

void criterion_01() {
  Timer timer;
  double worst = 0.0;
  {
    std::vector<Site> targets;
    for (long long x = -10; x <= 10; ++x) targets.push_back(make_site(x));
    const auto r = reconstruct_via_representation(
        cosine1(), DrivingSpec::gradient_form(1, GradientFormVariant::sine), 0.1, 30,
        targets);
    worst = std::max(worst, r.max_residual);
  }
  {
    std::vector<Site> targets;
    for (long long x = -3; x <= 3; ++x)
      for (long long y = -3; y <= 3; ++y) targets.push_back(make_site(x, y));
    const auto r = reconstruct_via_representation(
        InitialData::cosine(2, 1.0, {1.0, 0.5, 0.0}),
        DrivingSpec::gradient_form(2, GradientFormVariant::sine), 0.1, 15, targets);
    worst = std::max(worst, r.max_residual);
  }
  report(1, "representation-identity", worst <= 1e-9,
         "max residual " + fmt(worst) + " <= 1e-9", timer.seconds());
}

// --- 2. Lipschitz preservation --------------------------------------------

void criterion_02() {
  Timer timer;
  double worst_excess = -1.0;
  long long steps_checked = 0;
  struct Case {
    DrivingSpec spec;
    InitialData g;
    long long radius;
    int steps;
  };
  std::vector<Case> cases;
  for (int dim : {1, 2}) {
    const long long radius = dim == 1 ? 120 : 24;
    const int steps = dim == 1 ? 100 : 20;
    std::vector<InitialData> data;
    if (dim == 1) {
      data = {cosine1(), linear1(), InitialData::capped_abs(1, 1.0)};
    } else {
      data = {InitialData::cosine(2, 1.0, {1.0, 0.5, 0.0}),
              InitialData::capped_abs(2, 1.0)};
    }
    for (const auto& g : data) {
      cases.push_back({DrivingSpec::average(dim), g, radius, steps});
      cases.push_back({DrivingSpec::logsumexp(dim, 1.0), g, radius, steps});
      cases.push_back({DrivingSpec::gradient_form(dim, GradientFormVariant::sine), g, radius, steps});
      cases.push_back({DrivingSpec::gradient_form(dim, GradientFormVariant::sine_neg), g, radius, steps});
      cases.push_back({DrivingSpec::lpp_max(dim), g, radius, steps});
      cases.push_back({DrivingSpec::rsos_maxmin(dim), g, radius, steps});
    }
  }
  cases.push_back({DrivingSpec::gibbs(1, GibbsPotential::quadratic), cosine1(), 60, 40});
  cases.push_back({DrivingSpec::gibbs(1, GibbsPotential::quartic, 0.1), cosine1(), 60, 40});
  cases.push_back({DrivingSpec::smoothed(1, DrivingKind::lpp_max, 0.5), cosine1(), 45, 30});

  const double eps = 0.1;
  for (const auto& c : cases) {
    auto slice = init_surface(c.g, eps, Box::cube(c.spec.dim, -c.radius, c.radius));
    const double budget = c.g.lipschitz * eps;
    for (int s = 0; s < c.steps; ++s) {
      slice = evolve_step(slice, c.spec);
      const double inc = roughness_report(slice).max_increment;
      worst_excess = std::max(worst_excess, inc - budget);
      ++steps_checked;
    }
  }
  std::ostringstream detail;
  detail << steps_checked << " steps, worst increment excess " << fmt(worst_excess)
         << " <= 1e-12";
  report(2, "lipschitz-preservation", worst_excess <= 1e-12, detail.str(),
         timer.seconds());
}

// --- 3. h-field scales like eps^2 -----------------------------------------

void criterion_03() {
  Timer timer;
  const auto spec = DrivingSpec::gradient_form(1, GradientFormVariant::sine);
  const auto cs = extract_coefficients(spec);
  std::vector<double> log_eps, log_sup;
  for (const double eps : {0.2, 0.1, 0.05, 0.025}) {
    const long long t_steps = guarded_floor(0.5 / (eps * eps));
    const long long radius = guarded_floor(1.0 / eps) + t_steps;
    auto slice = init_surface(cosine1(), eps, Box::cube(1, -radius, radius));
    double sup = 0.0;
    for (long long s = 0; s < t_steps; ++s) {
      auto next = evolve_step(slice, spec);
      sup = std::max(sup, compute_h_field(slice, next, cs).sup_abs());
      slice = std::move(next);
    }
    log_eps.push_back(std::log(eps));
    log_sup.push_back(std::log(sup));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(log_eps.size());
  for (std::size_t i = 0; i < log_eps.size(); ++i) {
    sx += log_eps[i];
    sy += log_sup[i];
    sxx += log_eps[i] * log_eps[i];
    sxy += log_eps[i] * log_sup[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  std::ostringstream detail;
  detail << "log-log slope " << slope << " in [1.8, 2.2]";
  report(3, "h-scaling", slope >= 1.8 && slope <= 2.2, detail.str(), timer.seconds());
}

// --- 4. linear-data closed form -------------------------------------------

void criterion_04() {
  Timer timer;
  ExperimentConfig config;
  config.dimension = 1;
  config.driving = DrivingSpec::gradient_form(1, GradientFormVariant::sine);
  config.initial = linear1();
  config.epsilons = {0.2, 0.1, 0.05};
  config.eval_points = {{1.0, {0.0, 0.0, 0.0}}};
  const auto report_sweep = run_convergence_sweep(config);

  bool ok = report_sweep.branch == Branch::kpz;
  std::ostringstream detail;
  detail << "errors";
  for (std::size_t i = 0; i < report_sweep.cells.size(); ++i) {
    const auto& cell = report_sweep.cells[i];
    const long long steps = guarded_floor(cell.point.t / (cell.epsilon * cell.epsilon));
    const double oracle_value =
        static_cast<double>(steps) * oracles::linear_step_gradient_sine(cell.epsilon);
    const double oracle_err = std::fabs(oracle_value - 0.125);
    detail << " " << fmt(cell.abs_err);
    if (std::fabs(cell.abs_err - oracle_err) > 0.2 * oracle_err) ok = false;
  }
  detail << " within 20% of the recursion oracle";
  report(4, "linear-closed-form", ok, detail.str(), timer.seconds());
}

// --- 5. heat branch --------------------------------------------------------

void criterion_05() {
  Timer timer;
  const auto g = cosine1();
  const auto spec = DrivingSpec::average(1);
  const double limit = std::exp(-0.5);
  std::vector<double> errs;
  const double p[1] = {0.0};
  for (const double eps : {0.2, 0.1, 0.05}) {
    const auto r = evaluate_rescaled(g, spec, eps, 1.0, p, ParityRule::parity0);
    errs.push_back(std::fabs(r.value - limit));
  }
  const bool ok = errs[1] <= 1e-2 && errs[2] <= 3e-3 && errs[0] > errs[1] &&
                  errs[1] > errs[2];
  std::ostringstream detail;
  detail << "errors " << fmt(errs[0]) << " > " << fmt(errs[1]) << " > " << fmt(errs[2])
         << " vs exp(-1/2)";
  report(5, "heat-branch", ok, detail.str(), timer.seconds());
}

// --- 6. kpz branch vs the log-transformed heat solution --------------------

void criterion_06() {
  Timer timer;
  ExperimentConfig config;
  config.dimension = 1;
  config.driving = DrivingSpec::logsumexp(1, 1.0);
  config.initial = cosine1();
  config.epsilons = {0.2, 0.1, 0.05};
  config.eval_points = {{1.0, {0.0, 0.0, 0.0}}};
  config.parity_rule = ParityRule::parity0;
  const auto sweep = run_convergence_sweep(config);

  bool ok = sweep.branch == Branch::kpz;
  const auto& cells = sweep.cells;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (cells[i].abs_err >= cells[i - 1].abs_err) ok = false;
  }
  if (cells.back().abs_err > 2e-2) ok = false;

  // Independent quadrature route for the same limit value.
  oracles::GaussHermiteColeHopf oracle;
  oracle.beta = sweep.coeffs.beta;
  oracle.gamma = sweep.coeffs.gamma;
  const double gh = oracle.eval_cosine(1.0, 1.0, 1.0, 0.0);
  if (std::fabs(gh - cells.front().f_limit) > 1e-7) ok = false;

  std::ostringstream detail;
  detail << "errors " << fmt(cells[0].abs_err) << " > " << fmt(cells[1].abs_err)
         << " > " << fmt(cells[2].abs_err) << ", final <= 2e-2";
  report(6, "kpz-branch-cole-hopf", ok, detail.str(), timer.seconds());
}

// --- 7. gradient-squared emergence ----------------------------------------

void criterion_07() {
  Timer timer;
  ExperimentConfig config;
  config.dimension = 1;
  config.driving = DrivingSpec::gradient_form(1, GradientFormVariant::sine);
  config.initial = linear1();
  config.epsilons = {0.2, 0.1, 0.05};
  config.eval_points = {{0.5, {0.0, 0.0, 0.0}}};
  const auto check = run_gradient_square_check(config);
  const auto& rows = check.rows;
  bool ok = rows.size() == 3;
  double final_rel = 1.0;
  if (ok) {
    final_rel = std::fabs(rows.back().h_rescaled - 0.125) / 0.125;
    ok = final_rel <= 5e-3 && check.errors_decreasing;
  }
  std::ostringstream detail;
  detail << "relative error " << fmt(final_rel) << " <= 5e-3 at eps=0.05";
  report(7, "gradient-squared-emergence", ok, detail.str(), timer.seconds());
}

// --- 8. local CLT decay ----------------------------------------------------

void criterion_08() {
  Timer timer;
  const std::vector<long long> times = {4, 16, 64, 256};
  bool ok = true;
  std::ostringstream detail;
  for (const auto params : {std::pair<double, double>{0.5, 0.25},
                            std::pair<double, double>{0.0, 0.5}}) {
    const auto table = clt_error_table(params.first, params.second, 1, times);
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
      if (table.rows[i].sup_err >= table.rows[i - 1].sup_err) ok = false;
    }
    if (table.fitted_order < 1.2) ok = false;
    detail << (params.first == 0.0 ? " periodic order " : "order ")
           << table.fitted_order;
  }
  detail << " >= 1.2, errors strictly decreasing";
  report(8, "clt-decay", ok, detail.str(), timer.seconds());
}

// --- 9. frozen branch ------------------------------------------------------

void criterion_09() {
  Timer timer;
  const auto spec = DrivingSpec::identity(1);
  bool ok = true;
  int points = 0;
  for (const auto& g : {cosine1(), linear1()}) {
    for (const double eps : {0.3, 0.1, 0.05}) {
      for (const double t : {0.5, 1.0}) {
        for (const double x : {-0.7, 0.0, 1.3}) {
          const double p[1] = {x};
          const auto r = evaluate_rescaled(g, spec, eps, t, p);
          const double expected = g.eval_site(make_site(guarded_floor(x / eps)), eps);
          if (r.value != expected) ok = false;  // bit-exact equality
          ++points;
        }
      }
    }
  }
  std::ostringstream detail;
  detail << points << " points bit-exact";
  report(9, "frozen-branch", ok, detail.str(), timer.seconds());
}

// --- 10. duhamel residual --------------------------------------------------

void criterion_10() {
  Timer timer;
  const double p[1] = {0.0};
  const auto kpz_ev = LimitEvaluator::make(cosine1(), 0.5, 0.5);
  const double res = duhamel_residual(kpz_ev, 1.0, p);
  DuhamelOptions dense;
  dense.time_intervals = 128;
  dense.space_points = 257;
  const double res_dense = duhamel_residual(kpz_ev, 1.0, p, dense);
  const auto heat_ev = LimitEvaluator::make(cosine1(), 0.5, 0.0);
  const double res_heat = duhamel_residual(heat_ev, 1.0, p);
  const bool ok = res <= 5e-3 && res_dense <= 5e-3 && res_heat <= 1e-8;
  std::ostringstream detail;
  detail << "kpz " << fmt(res) << " (double-res " << fmt(res_dense) << ") <= 5e-3, heat "
         << fmt(res_heat) << " <= 1e-8";
  report(10, "duhamel-residual", ok, detail.str(), timer.seconds());
}

// --- 11. axiom validation --------------------------------------------------

void criterion_11() {
  Timer timer;
  bool ok = true;
  int validated = 0;
  for (int dim : {1, 2}) {
    for (const auto& spec : shipped_catalog(dim)) {
      const auto r = validate_properties(spec, 1000, 1e-9);
      if (!r.all_passed()) {
        ok = false;
        std::printf("  axiom failure: %s\n", spec.name().c_str());
      }
      ++validated;
    }
  }
  // Probe flags: the max rules are not C2 (in d=1 the half-sum of max and
  // min over two neighbors is linear, so the flag is a d=2 statement).
  if (smoothness_probe(DrivingSpec::lpp_max(1), default_probe_steps()).c2_consistent) ok = false;
  if (smoothness_probe(DrivingSpec::lpp_max(2), default_probe_steps()).c2_consistent) ok = false;
  if (smoothness_probe(DrivingSpec::rsos_maxmin(2), default_probe_steps()).c2_consistent) ok = false;

  const auto broken = validate_properties(DrivingSpec::broken(1), 1000, 1e-9);
  if (broken.monotonicity.passed || broken.monotonicity.witness_u.empty()) ok = false;

  std::ostringstream detail;
  detail << validated
         << " catalog specs pass at 1e-9; lpp/rsos flagged non-smooth; broken has a witness";
  report(11, "axiom-validation", ok, detail.str(), timer.seconds());
}

// --- 12. parity agreement --------------------------------------------------

void criterion_12() {
  Timer timer;
  const auto g = cosine1();
  const auto spec = DrivingSpec::logsumexp(1, 1.0);
  const auto cs = extract_coefficients(spec);
  const auto ev = LimitEvaluator::from_coefficients(g, cs);
  const double p[1] = {0.0};
  const double limit = cole_hopf_eval(ev, 1.0, p);

  bool ok = true;
  std::vector<double> err0, err1;
  // Epsilons whose step counts share one parity, so each rule keeps probing
  // the same sublattice as the sweep refines.
  for (const double eps : {0.25, 0.125, 0.0625}) {
    const auto v0 = evaluate_rescaled(g, spec, eps, 1.0, p, ParityRule::parity0);
    const auto v1 = evaluate_rescaled(g, spec, eps, 1.0, p, ParityRule::parity1);
    if (std::fabs(v0.value - v1.value) > 2.0 * g.lipschitz * eps + 1e-12) ok = false;
    err0.push_back(std::fabs(v0.value - limit));
    err1.push_back(std::fabs(v1.value - limit));
  }
  for (std::size_t i = 1; i < err0.size(); ++i) {
    if (err0[i] >= err0[i - 1]) ok = false;
    if (err1[i] >= err1[i - 1]) ok = false;
  }
  std::ostringstream detail;
  detail << "gap <= 2 L eps; errors parity0 " << fmt(err0.back()) << ", parity1 "
         << fmt(err1.back()) << " both decreasing";
  report(12, "parity-agreement", ok, detail.str(), timer.seconds());
}

}  // namespace

int main() {
  criterion_01();
  criterion_02();
  criterion_03();
  criterion_04();
  criterion_05();
  criterion_06();
  criterion_07();
  criterion_08();
  criterion_09();
  criterion_10();
  criterion_11();
  criterion_12();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
