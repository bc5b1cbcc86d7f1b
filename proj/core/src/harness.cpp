#include "kpz/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kpz/errors.hpp"

namespace kpz {

const char* const kVersion = "0.1.0";

namespace {

using ordered_json = nlohmann::ordered_json;

DrivingKind driving_kind_from_string(const std::string& s) {
  if (s == "average") return DrivingKind::average;
  if (s == "logsumexp") return DrivingKind::logsumexp;
  if (s == "gradient_form") return DrivingKind::gradient_form;
  if (s == "lpp_max") return DrivingKind::lpp_max;
  if (s == "rsos_maxmin") return DrivingKind::rsos_maxmin;
  if (s == "smoothed") return DrivingKind::smoothed;
  if (s == "gibbs") return DrivingKind::gibbs;
  if (s == "identity") return DrivingKind::identity;
  if (s == "broken") return DrivingKind::broken;
  throw InvalidSpec("unknown driving kind '" + s + "'");
}

InitialKind initial_kind_from_string(const std::string& s) {
  if (s == "linear") return InitialKind::linear;
  if (s == "cosine") return InitialKind::cosine;
  if (s == "capped_abs") return InitialKind::capped_abs;
  if (s == "constant") return InitialKind::constant;
  throw InvalidSpec("unknown initial kind '" + s + "'");
}

ParityRule parity_rule_from_string(const std::string& s) {
  if (s == "floor") return ParityRule::floor;
  if (s == "parity0") return ParityRule::parity0;
  if (s == "parity1") return ParityRule::parity1;
  throw InvalidSpec("unknown parity rule '" + s + "'");
}

std::array<double, kMaxDim> array_from_json(const ordered_json& j, int dim,
                                            const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw InvalidSpec(std::string(what) + " must be an array of length dim");
  }
  std::array<double, kMaxDim> out{};
  for (int i = 0; i < dim; ++i) out[static_cast<std::size_t>(i)] = j[static_cast<std::size_t>(i)].get<double>();
  return out;
}

DrivingSpec driving_from_json(const ordered_json& j, int dim) {
  const auto kind = driving_kind_from_string(j.at("kind").get<std::string>());
  const ordered_json params = j.value("params", ordered_json::object());
  switch (kind) {
    case DrivingKind::average: return DrivingSpec::average(dim);
    case DrivingKind::logsumexp:
      return DrivingSpec::logsumexp(dim, params.value("theta", 1.0));
    case DrivingKind::gradient_form: {
      const std::string v = params.value("variant", "sine");
      if (v != "sine" && v != "sine_neg") throw InvalidSpec("unknown gradient_form variant");
      return DrivingSpec::gradient_form(
          dim, v == "sine" ? GradientFormVariant::sine : GradientFormVariant::sine_neg);
    }
    case DrivingKind::lpp_max: return DrivingSpec::lpp_max(dim);
    case DrivingKind::rsos_maxmin: return DrivingSpec::rsos_maxmin(dim);
    case DrivingKind::smoothed:
      return DrivingSpec::smoothed(
          dim, driving_kind_from_string(params.value("base", "lpp_max")),
          params.value("delta", 0.5), params.value("order", 20));
    case DrivingKind::gibbs: {
      const std::string p = params.value("potential", "quadratic");
      if (p != "quadratic" && p != "quartic") throw InvalidSpec("unknown gibbs potential");
      return DrivingSpec::gibbs(
          dim, p == "quadratic" ? GibbsPotential::quadratic : GibbsPotential::quartic,
          params.value("lambda", 0.0));
    }
    case DrivingKind::identity: return DrivingSpec::identity(dim);
    case DrivingKind::broken: return DrivingSpec::broken(dim);
  }
  throw InvalidSpec("unknown driving kind");
}

ordered_json driving_to_json(const DrivingSpec& spec) {
  ordered_json out;
  out["kind"] = to_string(spec.kind);
  ordered_json params = ordered_json::object();
  switch (spec.kind) {
    case DrivingKind::logsumexp: params["theta"] = spec.theta; break;
    case DrivingKind::gradient_form: params["variant"] = to_string(spec.variant); break;
    case DrivingKind::smoothed:
      params["base"] = to_string(spec.smoothed_base);
      params["delta"] = spec.delta;
      params["order"] = spec.quad_order;
      break;
    case DrivingKind::gibbs:
      params["potential"] = to_string(spec.potential);
      if (spec.potential == GibbsPotential::quartic) params["lambda"] = spec.lambda;
      break;
    default: break;
  }
  out["params"] = params;
  return out;
}

InitialData initial_from_json(const ordered_json& j, int dim) {
  const auto kind = initial_kind_from_string(j.at("kind").get<std::string>());
  const ordered_json params = j.value("params", ordered_json::object());
  InitialData g;
  switch (kind) {
    case InitialKind::linear:
      g = InitialData::linear(dim, array_from_json(params.at("slope"), dim, "slope"));
      break;
    case InitialKind::cosine:
      g = InitialData::cosine(dim, params.value("amplitude", 1.0),
                              array_from_json(params.at("wavevector"), dim, "wavevector"));
      break;
    case InitialKind::capped_abs:
      g = InitialData::capped_abs(dim, params.value("cap", 1.0));
      break;
    case InitialKind::constant:
      g = InitialData::constant(dim, params.value("value", 0.0));
      break;
  }
  if (j.contains("lipschitz")) {
    const double given = j.at("lipschitz").get<double>();
    if (given < g.lipschitz - 1e-12) {
      throw InvalidSpec("configured lipschitz constant is below the analytic one");
    }
    g.lipschitz = given;
  }
  return g;
}

ordered_json initial_to_json(const InitialData& g) {
  ordered_json out;
  out["kind"] = to_string(g.kind);
  ordered_json params = ordered_json::object();
  switch (g.kind) {
    case InitialKind::linear: {
      ordered_json slope = ordered_json::array();
      for (int i = 0; i < g.dim; ++i) slope.push_back(g.slope[static_cast<std::size_t>(i)]);
      params["slope"] = slope;
      break;
    }
    case InitialKind::cosine: {
      params["amplitude"] = g.amplitude;
      ordered_json wv = ordered_json::array();
      for (int i = 0; i < g.dim; ++i) wv.push_back(g.wavevector[static_cast<std::size_t>(i)]);
      params["wavevector"] = wv;
      break;
    }
    case InitialKind::capped_abs: params["cap"] = g.cap; break;
    case InitialKind::constant: params["value"] = g.value; break;
  }
  out["params"] = params;
  out["lipschitz"] = g.lipschitz;
  return out;
}

ordered_json config_to_json(const ExperimentConfig& config) {
  ordered_json out;
  out["dimension"] = config.dimension;
  out["driving"] = driving_to_json(config.driving);
  out["initial"] = initial_to_json(config.initial);
  out["epsilons"] = config.epsilons;
  ordered_json points = ordered_json::array();
  for (const auto& p : config.eval_points) {
    ordered_json jp;
    jp["t"] = p.t;
    ordered_json x = ordered_json::array();
    for (int i = 0; i < config.dimension; ++i) x.push_back(p.x[static_cast<std::size_t>(i)]);
    jp["x"] = x;
    points.push_back(jp);
  }
  out["eval_points"] = points;
  out["tolerances"] = config.tolerances;
  out["parity_rule"] = to_string(config.parity_rule);
  out["seed"] = config.seed;
  return out;
}

ordered_json coeffs_to_json(const CoefficientSet& cs, Branch branch) {
  ordered_json out;
  out["phi0"] = cs.phi0;
  out["alpha"] = cs.alpha;
  out["beta"] = cs.beta;
  out["gamma1"] = cs.gamma1;
  out["gamma2"] = cs.gamma2;
  if (cs.has_gamma3) out["gamma3"] = cs.gamma3;
  out["gamma"] = cs.gamma;
  out["cross_b_spread"] = cs.cross_b_spread;
  out["extrapolation_residual"] = cs.extrapolation_residual;
  out["fd_steps_used"] = cs.fd_steps_used;
  out["branch"] = to_string(branch);
  return out;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  LineFit fit;
  const auto n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

QuadratureConfig quadrature_from_config(const ExperimentConfig& config) {
  QuadratureConfig quad;
  quad.tol = config.tolerance("quadrature_tol", 1e-10);
  quad.gradient_fd_step = config.tolerance("gradient_fd_step", 1e-3);
  return quad;
}

CoefficientSet extract_checked(const ExperimentConfig& config, Branch* branch_out) {
  const auto report = validate_properties(
      config.driving,
      static_cast<int>(config.tolerance("validate_samples", 1000)),
      config.tolerance("validate_tol", 1e-9), config.seed);
  if (!report.all_passed()) {
    std::ostringstream os;
    os << "driving axioms failed for " << config.driving.name() << ":";
    if (!report.equivariance.passed) os << " equivariance(" << report.equivariance.worst << ")";
    if (!report.monotonicity.passed) os << " monotonicity(" << report.monotonicity.worst << ")";
    if (!report.symmetry.passed) os << " symmetry(" << report.symmetry.worst << ")";
    if (!report.contraction.passed) os << " contraction(" << report.contraction.worst << ")";
    throw ValidationError(os.str());
  }
  const CoefficientSet cs = extract_coefficients(config.driving);
  const auto consistency =
      check_coefficient_consistency(cs, config.dimension, config.tolerance("consistency_tol", 1e-6));
  if (!consistency.all_ok()) {
    std::ostringstream os;
    os << "coefficient consistency failed (sum residual " << consistency.sum_rule_residual << ")";
    throw ValidationError(os.str());
  }
  if (branch_out) *branch_out = consistency.branch;
  return cs;
}

}  // namespace

double ExperimentConfig::tolerance(const std::string& key, double fallback) const {
  const auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

void ExperimentConfig::validate() const {
  if (dimension < 1 || dimension > kMaxDim) throw InvalidSpec("dimension must be in 1..3");
  if (dimension != driving.dim) throw InvalidSpec("driving dimension mismatch");
  if (dimension != initial.dim) throw InvalidSpec("initial data dimension mismatch");
  if (epsilons.empty()) throw InvalidSpec("epsilons must be nonempty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || !(epsilons[i] < 1.0)) {
      throw InvalidSpec("epsilons must lie in (0,1)");
    }
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw InvalidSpec("epsilons must be strictly decreasing");
    }
  }
  if (eval_points.empty()) throw InvalidSpec("eval_points must be nonempty");
  const double eps_max = epsilons.front();
  for (const auto& p : eval_points) {
    if (!(p.t > 0.0)) throw InvalidSpec("eval point times must be positive");
    if (guarded_floor(p.t / (eps_max * eps_max)) < 1) {
      throw InvalidSpec("every t must give at least one step at the largest epsilon");
    }
  }
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    ExperimentConfig config;
    config.dimension = j.at("dimension").get<int>();
    config.driving = driving_from_json(j.at("driving"), config.dimension);
    config.initial = initial_from_json(j.at("initial"), config.dimension);
    config.epsilons = j.at("epsilons").get<std::vector<double>>();
    for (const auto& jp : j.at("eval_points")) {
      EvalPoint p;
      p.t = jp.at("t").get<double>();
      p.x = array_from_json(jp.at("x"), config.dimension, "eval point x");
      config.eval_points.push_back(p);
    }
    if (j.contains("tolerances")) {
      for (const auto& [key, value] : j.at("tolerances").items()) {
        config.tolerances[key] = value.get<double>();
      }
    }
    config.parity_rule = parity_rule_from_string(j.value("parity_rule", "floor"));
    config.seed = j.value("seed", config.seed);
    config.validate();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("config is missing or mistypes a field: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string ExperimentConfig::to_json_text() const {
  return config_to_json(*this).dump(2) + "\n";
}

ConvergenceReport run_convergence_sweep(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();

  ConvergenceReport report;
  report.config = config;
  report.version = kVersion;
  report.seed = config.seed;
  report.coeffs = extract_checked(config, &report.branch);

  const LimitEvaluator ev = LimitEvaluator::from_coefficients(
      config.initial, report.coeffs, quadrature_from_config(config));

  for (const auto& point : config.eval_points) {
    std::vector<double> log_eps, log_err, errs;
    for (const double eps : config.epsilons) {
      ConvergenceCell cell;
      cell.epsilon = eps;
      cell.point = point;
      cell.f_eps = evaluate_rescaled(config.initial, config.driving, eps, point.t,
                                     point.x.data(), config.parity_rule)
                       .value;
      cell.f_limit = cole_hopf_eval(ev, point.t, point.x.data());
      cell.abs_err = std::fabs(cell.f_eps - cell.f_limit);
      report.cells.push_back(cell);
      errs.push_back(cell.abs_err);
      if (cell.abs_err > 0.0) {
        log_eps.push_back(std::log(eps));
        log_err.push_back(std::log(cell.abs_err));
      }
    }
    PointFit fit;
    fit.point = point;
    fit.valid = log_eps.size() == config.epsilons.size() && log_eps.size() >= 2;
    if (fit.valid) {
      const LineFit lf = least_squares(log_eps, log_err);
      fit.order = lf.slope;
      fit.fit_residual = lf.residual_rms;
    }
    for (std::size_t i = 2; i < errs.size(); ++i) {
      if (errs[i] > errs[i - 1] * (1.0 + 1e-12)) fit.errors_monotone = false;
    }
    report.fits.push_back(fit);
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

GradientSquareReport run_gradient_square_check(const ExperimentConfig& config) {
  config.validate();

  GradientSquareReport report;
  report.coeffs = extract_checked(config, &report.branch);
  if (report.branch == Branch::frozen) {
    throw ValidationError("gradient-square check needs the kpz or heat branch");
  }

  const LimitEvaluator ev = LimitEvaluator::from_coefficients(
      config.initial, report.coeffs, quadrature_from_config(config));

  for (const auto& point : config.eval_points) {
    double prev_err = 0.0;
    bool first = true;
    for (const double eps : config.epsilons) {
      GradientSquareRow row;
      row.epsilon = eps;
      row.point = point;

      const long long t_steps = guarded_floor(point.t / (eps * eps));
      if (t_steps < 1) throw InvalidSpec("t too small for this epsilon");
      double scaled[kMaxDim] = {0.0, 0.0, 0.0};
      for (int i = 0; i < config.dimension; ++i) scaled[i] = point.x[static_cast<std::size_t>(i)] / eps;
      Site site{};
      switch (config.parity_rule) {
        case ParityRule::floor: site = floor_site(scaled, config.dimension); break;
        case ParityRule::parity0:
          site = parity_floor(scaled, config.dimension, static_cast<int>(t_steps % 2));
          break;
        case ParityRule::parity1:
          site = parity_floor(scaled, config.dimension, static_cast<int>((t_steps + 1) % 2));
          break;
      }

      const Box box = Box::centered(config.dimension, site, t_steps);
      SurfaceSlice prev = init_surface(config.initial, eps, box);
      SurfaceSlice cur = prev;
      for (long long step = 0; step < t_steps; ++step) {
        SurfaceSlice next = evolve_step(cur, config.driving);
        prev = std::move(cur);
        cur = std::move(next);
      }
      const HField h = compute_h_field(prev, cur, report.coeffs);
      row.h_rescaled = h.at(site) / (eps * eps);

      const auto grad = limit_gradient(ev, point.t, point.x.data());
      double gsq = 0.0;
      for (int i = 0; i < config.dimension; ++i) gsq += grad[static_cast<std::size_t>(i)] * grad[static_cast<std::size_t>(i)];
      row.gamma_grad_sq = report.coeffs.gamma * gsq;
      row.rel_err = std::fabs(row.h_rescaled - row.gamma_grad_sq) /
                    std::max(std::fabs(row.gamma_grad_sq), 1e-12);
      report.rows.push_back(row);

      if (!first && row.rel_err > prev_err * (1.0 + 1e-12)) {
        report.errors_decreasing = false;
      }
      prev_err = row.rel_err;
      first = false;
    }
  }
  return report;
}

std::string report_to_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "epsilon,t";
  for (int i = 0; i < report.config.dimension; ++i) os << ",x" << (i + 1);
  os << ",f_eps,f_limit,abs_err,fitted_order\n";
  const std::size_t n_eps = report.config.epsilons.size();
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    const auto& cell = report.cells[c];
    const auto& fit = report.fits[c / n_eps];
    os << format_double(cell.epsilon) << "," << format_double(cell.point.t);
    for (int i = 0; i < report.config.dimension; ++i) {
      os << "," << format_double(cell.point.x[static_cast<std::size_t>(i)]);
    }
    os << "," << format_double(cell.f_eps) << "," << format_double(cell.f_limit)
       << "," << format_double(cell.abs_err) << ","
       << (fit.valid ? format_double(fit.order) : "nan") << "\n";
  }
  return os.str();
}

std::string report_to_json(const ConvergenceReport& report) {
  ordered_json j;
  j["version"] = report.version;
  j["seed"] = report.seed;
  j["config"] = config_to_json(report.config);
  j["coefficients"] = coeffs_to_json(report.coeffs, report.branch);
  ordered_json cells = ordered_json::array();
  for (const auto& cell : report.cells) {
    ordered_json jc;
    jc["epsilon"] = cell.epsilon;
    jc["t"] = cell.point.t;
    ordered_json x = ordered_json::array();
    for (int i = 0; i < report.config.dimension; ++i) x.push_back(cell.point.x[static_cast<std::size_t>(i)]);
    jc["x"] = x;
    jc["f_eps"] = cell.f_eps;
    jc["f_limit"] = cell.f_limit;
    jc["abs_err"] = cell.abs_err;
    cells.push_back(jc);
  }
  j["cells"] = cells;
  ordered_json fits = ordered_json::array();
  for (const auto& fit : report.fits) {
    ordered_json jf;
    jf["t"] = fit.point.t;
    ordered_json x = ordered_json::array();
    for (int i = 0; i < report.config.dimension; ++i) x.push_back(fit.point.x[static_cast<std::size_t>(i)]);
    jf["x"] = x;
    jf["valid"] = fit.valid;
    jf["order"] = fit.order;
    jf["fit_residual"] = fit.fit_residual;
    jf["errors_monotone"] = fit.errors_monotone;
    fits.push_back(jf);
  }
  j["fits"] = fits;
  return j.dump(2) + "\n";
}

std::string coefficient_set_to_json(const CoefficientSet& cs, Branch branch) {
  return coeffs_to_json(cs, branch).dump(2) + "\n";
}

void emit_report(const ConvergenceReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << (format == ReportFormat::csv ? report_to_csv(report) : report_to_json(report));
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace kpz
