#include "kpz/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "kpz/errors.hpp"

namespace kpz {

namespace {

// One Richardson step per adjacent pair under an O(h^2) error model; the
// last pair is the estimate, the distance to the previous pair the residual.
struct Extrapolated {
  double value = 0.0;
  double residual = 0.0;
};

Extrapolated richardson(const std::vector<double>& raw) {
  if (raw.size() == 1) return {raw[0], 0.0};
  std::vector<double> r;
  for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
    r.push_back((4.0 * raw[i + 1] - raw[i]) / 3.0);
  }
  Extrapolated out;
  out.value = r.back();
  out.residual = r.size() >= 2 ? std::fabs(r[r.size() - 1] - r[r.size() - 2])
                               : std::fabs(r.back() - raw.back());
  return out;
}

class PhiProbe {
 public:
  explicit PhiProbe(const DrivingSpec& spec) : spec_(spec), zero_(spec.dim) {}

  double at(std::initializer_list<std::pair<int, double>> bumps) const {
    NeighborhoodVector u = zero_;
    for (const auto& [idx, v] : bumps) u[idx] += v;
    return evaluate(spec_, u);
  }

 private:
  const DrivingSpec& spec_;
  NeighborhoodVector zero_;
};

}  // namespace

const char* to_string(Branch branch) {
  switch (branch) {
    case Branch::kpz: return "kpz";
    case Branch::heat: return "heat";
    case Branch::frozen: return "frozen";
  }
  return "?";
}

Branch classify_branch(double beta, double gamma) {
  if (std::fabs(beta) <= kBetaZeroThreshold) return Branch::frozen;
  if (std::fabs(gamma) <= kGammaZeroThreshold) return Branch::heat;
  return Branch::kpz;
}

CoefficientSet extract_coefficients(const DrivingSpec& spec,
                                    std::vector<double> steps) {
  if (steps.size() < 2) throw InvalidSpec("need at least two step sizes");
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (!(steps[i] > 0.0) || !(steps[i] < steps[i - 1])) {
      throw InvalidSpec("steps must be positive and decreasing");
    }
  }

  const auto verdict = smoothness_probe(spec, default_probe_steps());
  if (!verdict.c2_consistent) {
    std::ostringstream os;
    os << "smoothness probe flagged " << spec.name() << " (spread "
       << verdict.max_spread << " > " << verdict.threshold << ")";
    throw NonSmoothDriving(os.str());
  }

  const PhiProbe phi(spec);
  const int d = spec.dim;
  const double f0 = phi.at({});

  CoefficientSet cs;
  cs.phi0 = f0;
  cs.fd_steps_used = steps;

  // alpha: central difference along the center coordinate
  {
    std::vector<double> est;
    for (const double h : steps) {
      est.push_back((phi.at({{0, h}}) - phi.at({{0, -h}})) / (2.0 * h));
    }
    const auto e = richardson(est);
    cs.alpha = e.value;
    cs.extrapolation_residual = std::max(cs.extrapolation_residual, e.residual);
  }

  double spread = 0.0;
  auto track_spread = [&spread](const std::vector<double>& per_dir) {
    const auto [mn, mx] = std::minmax_element(per_dir.begin(), per_dir.end());
    spread = std::max(spread, *mx - *mn);
  };

  // beta and gamma1 per direction, then averaged
  std::vector<double> betas, gamma1s, gamma2s;
  for (int axis = 0; axis < d; ++axis) {
    for (int sign = +1; sign >= -1; sign -= 2) {
      const int b = NeighborhoodVector::flat(axis, sign);
      std::vector<double> d1, d2;
      for (const double h : steps) {
        const double up = phi.at({{b, h}});
        const double dn = phi.at({{b, -h}});
        d1.push_back((up - dn) / (2.0 * h));
        d2.push_back((up - 2.0 * f0 + dn) / (h * h));
      }
      const auto e1 = richardson(d1);
      const auto e2 = richardson(d2);
      betas.push_back(e1.value);
      gamma1s.push_back(e2.value);
      cs.extrapolation_residual =
          std::max({cs.extrapolation_residual, e1.residual, e2.residual});
    }
  }
  track_spread(betas);
  track_spread(gamma1s);

  // gamma2: 4-point cross stencil along (b, -b) pairs
  for (int axis = 0; axis < d; ++axis) {
    const int bp = NeighborhoodVector::flat(axis, +1);
    const int bm = NeighborhoodVector::flat(axis, -1);
    std::vector<double> est;
    for (const double h : steps) {
      est.push_back((phi.at({{bp, h}, {bm, h}}) - phi.at({{bp, h}, {bm, -h}}) -
                     phi.at({{bp, -h}, {bm, h}}) + phi.at({{bp, -h}, {bm, -h}})) /
                    (4.0 * h * h));
    }
    const auto e = richardson(est);
    gamma2s.push_back(e.value);
    cs.extrapolation_residual = std::max(cs.extrapolation_residual, e.residual);
  }
  track_spread(gamma2s);

  cs.beta = std::accumulate(betas.begin(), betas.end(), 0.0) /
            static_cast<double>(betas.size());
  cs.gamma1 = std::accumulate(gamma1s.begin(), gamma1s.end(), 0.0) /
              static_cast<double>(gamma1s.size());
  cs.gamma2 = std::accumulate(gamma2s.begin(), gamma2s.end(), 0.0) /
              static_cast<double>(gamma2s.size());
  cs.gamma = cs.gamma1 - cs.gamma2;

  // gamma3: orthogonal mixed derivative, only defined for d >= 2
  if (d >= 2) {
    std::vector<double> gamma3s;
    for (int axis = 0; axis < d; ++axis) {
      const int b = NeighborhoodVector::flat(axis, +1);
      const int bp = NeighborhoodVector::flat((axis + 1) % d, +1);
      std::vector<double> est;
      for (const double h : steps) {
        est.push_back((phi.at({{b, h}, {bp, h}}) - phi.at({{b, h}, {bp, -h}}) -
                       phi.at({{b, -h}, {bp, h}}) + phi.at({{b, -h}, {bp, -h}})) /
                      (4.0 * h * h));
      }
      const auto e = richardson(est);
      gamma3s.push_back(e.value);
      cs.extrapolation_residual = std::max(cs.extrapolation_residual, e.residual);
    }
    track_spread(gamma3s);
    cs.gamma3 = std::accumulate(gamma3s.begin(), gamma3s.end(), 0.0) /
                static_cast<double>(gamma3s.size());
    cs.has_gamma3 = true;
  }

  cs.cross_b_spread = spread;
  const double spread_budget = 100.0 * std::max(cs.extrapolation_residual, 1e-14);
  if (spread > spread_budget) {
    std::ostringstream os;
    os << "per-direction estimates for " << spec.name() << " spread " << spread
       << " exceeds budget " << spread_budget;
    throw InconsistentDirections(os.str());
  }
  return cs;
}

ConsistencyReport check_coefficient_consistency(const CoefficientSet& cs, int dim,
                                                double tol) {
  ConsistencyReport report;
  report.tol = tol;
  report.sum_rule_residual = std::fabs(cs.alpha + 2.0 * dim * cs.beta - 1.0);
  report.sum_rule_ok = report.sum_rule_residual <= tol;
  report.nonneg_ok = cs.alpha >= -tol && cs.beta >= -tol;
  if (std::fabs(cs.beta) <= tol) {
    // Monotone C2 driving with vanishing beta forces every second
    // derivative at the flat configuration to vanish as well.
    report.degenerate_ok = std::fabs(cs.gamma1) <= tol &&
                           std::fabs(cs.gamma2) <= tol &&
                           (!cs.has_gamma3 || std::fabs(cs.gamma3) <= tol);
  }
  report.branch = classify_branch(cs.beta, cs.gamma);
  return report;
}

}  // namespace kpz
