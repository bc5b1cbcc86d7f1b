#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kpz/coeffs.hpp"
#include "kpz/driving.hpp"
#include "kpz/lattice.hpp"
#include "kpz/limit.hpp"

namespace kpz {

struct EvalPoint {
  double t = 1.0;
  std::array<double, kMaxDim> x{};
};

// One experiment: a driving function, initial data, an epsilon sweep, and
// the points where the discrete surface is compared to the continuum limit.
struct ExperimentConfig {
  int dimension = 1;
  DrivingSpec driving;
  InitialData initial;
  std::vector<double> epsilons;      // strictly decreasing, in (0,1)
  std::vector<EvalPoint> eval_points;
  std::map<std::string, double> tolerances;
  ParityRule parity_rule = ParityRule::floor;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;

  double tolerance(const std::string& key, double fallback) const;
  void validate() const;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::filesystem::path& path);
  std::string to_json_text() const;
};

struct ConvergenceCell {
  double epsilon = 0.0;
  EvalPoint point;
  double f_eps = 0.0;
  double f_limit = 0.0;
  double abs_err = 0.0;
};

struct PointFit {
  EvalPoint point;
  double order = 0.0;
  double fit_residual = 0.0;
  bool valid = false;          // false when an error vanished exactly
  bool errors_monotone = true; // non-increasing after the first entry
};

struct ConvergenceReport {
  ExperimentConfig config;
  CoefficientSet coeffs;
  Branch branch = Branch::kpz;
  std::vector<ConvergenceCell> cells;  // outer loop points, inner epsilons
  std::vector<PointFit> fits;
  std::string version;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;  // console metadata only, never emitted
};

// Validates the driving axioms, extracts coefficients, checks consistency,
// then compares the rescaled surface to the branch limit at every
// (epsilon, point) cell and fits per-point convergence orders.
ConvergenceReport run_convergence_sweep(const ExperimentConfig& config);

struct GradientSquareRow {
  double epsilon = 0.0;
  EvalPoint point;
  double h_rescaled = 0.0;   // eps^{-2} h_eps at the rescaled point
  double gamma_grad_sq = 0.0;
  double rel_err = 0.0;
};

struct GradientSquareReport {
  CoefficientSet coeffs;
  Branch branch = Branch::kpz;
  std::vector<GradientSquareRow> rows;
  bool errors_decreasing = true;  // per point, across the epsilon sweep
};

// Compares the rescaled deviation field h^(eps) against gamma |grad f|^2.
GradientSquareReport run_gradient_square_check(const ExperimentConfig& config);

enum class ReportFormat { csv, json };

// Deterministic emission: two runs with equal config and seed produce
// byte-identical files. Timing metadata is deliberately left out.
void emit_report(const ConvergenceReport& report, ReportFormat format,
                 const std::filesystem::path& path);

std::string report_to_csv(const ConvergenceReport& report);
std::string report_to_json(const ConvergenceReport& report);

std::string coefficient_set_to_json(const CoefficientSet& cs, Branch branch);

extern const char* const kVersion;

}  // namespace kpz
