// Command-line front end for the lattice-growth scaling laboratory.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kpz/errors.hpp"
#include "kpz/harness.hpp"
#include "kpz/rwalk.hpp"

namespace {

using namespace kpz;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<EvalPoint> parse_points(const std::string& text, int dim) {
  // "t:x1[,x2..];t:x1[,x2..]"
  std::vector<EvalPoint> points;
  std::istringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    if (group.empty()) continue;
    const auto colon = group.find(':');
    if (colon == std::string::npos) throw InvalidSpec("point must look like t:x1[,x2..]");
    EvalPoint p;
    p.t = std::stod(group.substr(0, colon));
    std::istringstream coords(group.substr(colon + 1));
    std::string coord;
    int i = 0;
    while (std::getline(coords, coord, ',')) {
      if (i >= dim) throw InvalidSpec("too many coordinates in point");
      p.x[static_cast<std::size_t>(i++)] = std::stod(coord);
    }
    if (i != dim) throw InvalidSpec("point needs exactly dim coordinates");
    points.push_back(p);
  }
  if (points.empty()) throw InvalidSpec("no points given");
  return points;
}

std::vector<long long> parse_times(const std::string& text) {
  std::vector<long long> times;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) times.push_back(std::stoll(tok));
  }
  return times;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

int cmd_validate(const std::string& config_path, int samples, double tol) {
  const auto config = ExperimentConfig::from_json_file(config_path);
  const auto report = validate_properties(config.driving, samples, tol, config.seed);
  auto line = [](const char* name, const AxiomCheck& check) {
    std::printf("%-14s %s  worst violation %.3e\n", name,
                check.passed ? "pass" : "FAIL", check.worst);
  };
  std::printf("driving %s, %d samples, tol %.1e, seed %llu\n",
              config.driving.name().c_str(), report.samples, report.tol,
              static_cast<unsigned long long>(report.seed));
  line("equivariance", report.equivariance);
  line("monotonicity", report.monotonicity);
  line("symmetry", report.symmetry);
  line("contraction", report.contraction);
  const auto verdict = smoothness_probe(config.driving, default_probe_steps());
  std::printf("smoothness     %s  max spread %.3f (threshold %.2f)\n",
              verdict.c2_consistent ? "c2_consistent" : "non_smooth_flagged",
              verdict.max_spread, verdict.threshold);
  if (!report.all_passed()) {
    if (!report.monotonicity.passed && !report.monotonicity.witness_u.empty()) {
      std::printf("monotonicity witness u:");
      for (const double v : report.monotonicity.witness_u) std::printf(" %s", fmt(v).c_str());
      std::printf("\n                     v:");
      for (const double v : report.monotonicity.witness_v) std::printf(" %s", fmt(v).c_str());
      std::printf("\n");
    }
    return 1;
  }
  return 0;
}

int cmd_coeffs(const std::string& config_path) {
  const auto config = ExperimentConfig::from_json_file(config_path);
  const auto cs = extract_coefficients(config.driving);
  const auto consistency = check_coefficient_consistency(
      cs, config.dimension, config.tolerance("consistency_tol", 1e-6));
  std::cout << coefficient_set_to_json(cs, consistency.branch);
  return consistency.all_ok() ? 0 : 1;
}

int cmd_evolve(const std::string& config_path, double epsilon, long long steps,
               const std::string& out_path) {
  const auto config = ExperimentConfig::from_json_file(config_path);
  // Final window: one physical unit around the origin; the light cone adds
  // `steps` sites per face on top.
  const long long radius = guarded_floor(1.0 / epsilon) + 1;
  const Box window = Box::cube(config.dimension, -radius, radius);
  SurfaceSlice slice = init_surface(config.initial, epsilon, window.dilated(steps));
  for (long long s = 0; s < steps; ++s) slice = evolve_step(slice, config.driving);

  std::ostringstream os;
  for (int i = 0; i < config.dimension; ++i) os << "x" << (i + 1) << ",";
  os << "height\n";
  for_each_site(slice.domain, [&](const Site& site) {
    for (int i = 0; i < config.dimension; ++i) os << site[i] << ",";
    os << fmt(slice.at(site)) << "\n";
  });
  write_text(out_path, os.str());
  std::printf("wrote %lld sites at time step %lld to %s\n", slice.domain.volume(),
              slice.time_step, out_path.c_str());
  return 0;
}

int cmd_walk(double alpha, double beta, int dim, const std::string& times_text,
             const std::string& out_path) {
  const auto times = parse_times(times_text);
  const auto table = clt_error_table(alpha, beta, dim, times);
  std::ostringstream os;
  os << "t,sup_err,scaled_err,fitted_order\n";
  for (const auto& row : table.rows) {
    os << row.t << "," << fmt(row.sup_err) << "," << fmt(row.scaled_err) << ","
       << fmt(table.fitted_order) << "\n";
  }
  write_text(out_path, os.str());
  std::printf("fitted decay order %.4f over %zu times\n", table.fitted_order,
              table.rows.size());
  return 0;
}

int cmd_limit(const std::string& config_path, const std::string& points_text,
              const std::string& out_path) {
  const auto config = ExperimentConfig::from_json_file(config_path);
  const auto points = points_text.empty()
                          ? config.eval_points
                          : parse_points(points_text, config.dimension);
  const auto cs = extract_coefficients(config.driving);
  QuadratureConfig quad;
  quad.tol = config.tolerance("quadrature_tol", 1e-10);
  const auto ev = LimitEvaluator::from_coefficients(config.initial, cs, quad);

  std::ostringstream os;
  os << "t";
  for (int i = 0; i < config.dimension; ++i) os << ",x" << (i + 1);
  os << ",f\n";
  for (const auto& p : points) {
    os << fmt(p.t);
    for (int i = 0; i < config.dimension; ++i) os << "," << fmt(p.x[static_cast<std::size_t>(i)]);
    os << "," << fmt(cole_hopf_eval(ev, p.t, p.x.data())) << "\n";
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_text(out_path, os.str());
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path) {
  const auto config = ExperimentConfig::from_json_file(config_path);
  const auto report = run_convergence_sweep(config);
  const bool csv = out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".csv";
  emit_report(report, csv ? ReportFormat::csv : ReportFormat::json, out_path);
  std::printf("branch %s, %zu cells, %.2fs; wrote %s\n", to_string(report.branch),
              report.cells.size(), report.wall_seconds, out_path.c_str());
  for (const auto& fit : report.fits) {
    if (fit.valid) {
      std::printf("point t=%s: fitted order %.3f (residual %.2e)%s\n",
                  fmt(fit.point.t).c_str(), fit.order, fit.fit_residual,
                  fit.errors_monotone ? "" : "  [non-monotone errors]");
    }
  }
  return 0;
}

int cmd_duhamel(const std::string& config_path, const std::string& point_text) {
  const auto config = ExperimentConfig::from_json_file(config_path);
  const auto points = parse_points(point_text, config.dimension);
  const auto cs = extract_coefficients(config.driving);
  QuadratureConfig quad;
  quad.tol = config.tolerance("quadrature_tol", 1e-10);
  const auto ev = LimitEvaluator::from_coefficients(config.initial, cs, quad);
  const auto& p = points.front();
  const double residual = duhamel_residual(ev, p.t, p.x.data());
  std::printf("duhamel residual at t=%s x=%s: %s\n", fmt(p.t).c_str(),
              fmt(p.x[0]).c_str(), fmt(residual).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic lattice growth and its parabolic scaling limit"};
  app.require_subcommand(1);

  std::string config_path, out_path, points_text, times_text, point_text;
  int samples = 1000;
  double tol = 1e-9;
  double epsilon = 0.1, alpha = 0.5, beta = 0.25;
  int dim = 1;
  long long steps = 10;

  auto* validate = app.add_subcommand("validate", "check the driving axioms");
  validate->add_option("--config", config_path)->required();
  validate->add_option("--samples", samples);
  validate->add_option("--tol", tol);

  auto* coeffs = app.add_subcommand("coeffs", "extract alpha, beta, gamma");
  coeffs->add_option("--config", config_path)->required();

  auto* evolve = app.add_subcommand("evolve", "evolve and dump one slice as CSV");
  evolve->add_option("--config", config_path)->required();
  evolve->add_option("--epsilon", epsilon)->required();
  evolve->add_option("--steps", steps)->required();
  evolve->add_option("--out", out_path)->required();

  auto* walk = app.add_subcommand("walk", "kernel vs Gaussian error table");
  walk->add_option("--alpha", alpha)->required();
  walk->add_option("--beta", beta)->required();
  walk->add_option("--dim", dim)->required();
  walk->add_option("--times", times_text)->required();
  walk->add_option("--out", out_path)->required();

  auto* limit = app.add_subcommand("limit", "evaluate the continuum limit");
  limit->add_option("--config", config_path)->required();
  limit->add_option("--points", points_text);
  limit->add_option("--out", out_path);

  auto* sweep = app.add_subcommand("sweep", "epsilon sweep against the limit");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--out", out_path)->required();

  auto* duhamel = app.add_subcommand("duhamel", "integral-equation residual");
  duhamel->add_option("--config", config_path)->required();
  duhamel->add_option("--point", point_text)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(config_path, samples, tol);
    if (coeffs->parsed()) return cmd_coeffs(config_path);
    if (evolve->parsed()) return cmd_evolve(config_path, epsilon, steps, out_path);
    if (walk->parsed()) return cmd_walk(alpha, beta, dim, times_text, out_path);
    if (limit->parsed()) return cmd_limit(config_path, points_text, out_path);
    if (sweep->parsed()) return cmd_sweep(config_path, out_path);
    if (duhamel->parsed()) return cmd_duhamel(config_path, point_text);
  } catch (const QuadratureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SizingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    // axiom violations and invalid parameters
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
