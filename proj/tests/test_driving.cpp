#include <doctest.h>

#include <cmath>
#include <random>

#include "kpz/driving.hpp"
#include "kpz/errors.hpp"
#include "oracles.hpp"

using namespace kpz;

namespace {

NeighborhoodVector nv1(double minus, double center, double plus) {
  NeighborhoodVector u(1);
  u.center() = center;
  u.neighbor(0, -1) = minus;
  u.neighbor(0, +1) = plus;
  return u;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

}  // namespace

TEST_CASE("evaluate: catalog point values") {
  CHECK(evaluate(DrivingSpec::average(1), nv1(0.0, 5.0, 2.0)) == doctest::Approx(1.0));
  CHECK(evaluate(DrivingSpec::logsumexp(1, 1.0), NeighborhoodVector(1)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(evaluate(DrivingSpec::lpp_max(1), nv1(3.0, -1.0, 2.0)) == doctest::Approx(3.0));
  CHECK(evaluate(DrivingSpec::gradient_form(1, GradientFormVariant::sine),
                 NeighborhoodVector(1)) == doctest::Approx(0.0));
  CHECK(evaluate(DrivingSpec::rsos_maxmin(1), nv1(1.0, -7.0, 3.0)) == doctest::Approx(2.0));
  CHECK(evaluate(DrivingSpec::identity(1), nv1(1.0, -7.0, 3.0)) == doctest::Approx(-7.0));
}

TEST_CASE("evaluate: dimension mismatch throws") {
  CHECK_THROWS_AS(evaluate(DrivingSpec::average(2), NeighborhoodVector(1)),
                  DimensionMismatch);
}

TEST_CASE("evaluate is a pure function") {
  const auto spec = DrivingSpec::gibbs(1, GibbsPotential::quartic, 0.1);
  const auto u = nv1(0.3, -0.2, 0.9);
  const double first = evaluate(spec, u);
  for (int i = 0; i < 3; ++i) CHECK(evaluate(spec, u) == first);
}

TEST_CASE("spec factories validate parameters") {
  CHECK_THROWS_AS(DrivingSpec::logsumexp(1, 0.0), InvalidSpec);
  CHECK_THROWS_AS(DrivingSpec::smoothed(2, DrivingKind::lpp_max, 0.5), InvalidSpec);
  CHECK_THROWS_AS(DrivingSpec::smoothed(1, DrivingKind::lpp_max, -1.0), InvalidSpec);
  CHECK_THROWS_AS(DrivingSpec::smoothed(1, DrivingKind::lpp_max, 0.5, 3), InvalidSpec);
  CHECK_THROWS_AS(DrivingSpec::gibbs(1, GibbsPotential::quartic, -0.1), InvalidSpec);
}

TEST_CASE("validate_properties: linear symmetric rules pass tightly") {
  for (const auto& spec : {DrivingSpec::average(1), DrivingSpec::average(2)}) {
    const auto report = validate_properties(spec, 200, 1e-12);
    CHECK(report.all_passed());
  }
}

TEST_CASE("validate_properties: max is a sup-norm contraction") {
  const auto report = validate_properties(DrivingSpec::lpp_max(1), 500, 1e-12);
  CHECK(report.all_passed());
  CHECK(report.contraction.passed);
}

TEST_CASE("validate_properties: broken kind fails monotonicity with a witness") {
  const auto report = validate_properties(DrivingSpec::broken(1), 200, 1e-9);
  CHECK_FALSE(report.all_passed());
  CHECK_FALSE(report.monotonicity.passed);
  REQUIRE(report.monotonicity.witness_u.size() == 3);
  REQUIRE(report.monotonicity.witness_v.size() == 3);
  // The witness pair must actually witness: v dominates u yet phi drops.
  const auto& wu = report.monotonicity.witness_u;
  const auto& wv = report.monotonicity.witness_v;
  for (int i = 0; i < 3; ++i) CHECK(wv[static_cast<std::size_t>(i)] >= wu[static_cast<std::size_t>(i)]);
  const auto spec = DrivingSpec::broken(1);
  NeighborhoodVector u(1), v(1);
  for (int i = 0; i < 3; ++i) {
    u[i] = wu[static_cast<std::size_t>(i)];
    v[i] = wv[static_cast<std::size_t>(i)];
  }
  CHECK(evaluate(spec, v) < evaluate(spec, u));
}

TEST_CASE("validate_properties: full catalog at spec tolerance") {
  for (int dim : {1, 2}) {
    for (const auto& spec : shipped_catalog(dim)) {
      CAPTURE(spec.name());
      const auto report = validate_properties(spec, 1000, 1e-9);
      CHECK(report.all_passed());
    }
  }
}

TEST_CASE("equivariance under constant shifts, random samples") {
  std::mt19937_64 rng(7);
  for (const auto& spec : shipped_catalog(1)) {
    CAPTURE(spec.name());
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      NeighborhoodVector u(1);
      for (int k = 0; k < u.size(); ++k) u[k] = uniform(rng, -1.0, 1.0);
      const double c = uniform(rng, -3.0, 3.0);
      worst = std::max(worst,
                       std::fabs(evaluate(spec, u.shifted(c)) - evaluate(spec, u) - c));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("gibbs with quadratic potential is the neighbor average") {
  std::mt19937_64 rng(11);
  for (int dim : {1, 2}) {
    const auto gibbs = DrivingSpec::gibbs(dim, GibbsPotential::quadratic);
    const auto avg = DrivingSpec::average(dim);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      NeighborhoodVector u(dim);
      for (int k = 0; k < u.size(); ++k) u[k] = uniform(rng, -2.0, 2.0);
      worst = std::max(worst, std::fabs(evaluate(gibbs, u) - evaluate(avg, u)));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("smoothness probe: gradient_form sine stabilizes at the analytic value") {
  const auto verdict = smoothness_probe(DrivingSpec::gradient_form(1, GradientFormVariant::sine),
                                        default_probe_steps());
  CHECK(verdict.c2_consistent);
  // Oracle: second derivative along b at the flat point is q''(0)/2d = 1/8.
  bool saw_origin_probe = false;
  for (const auto& probe : verdict.probes) {
    if (probe.base_offset == 0.0) {
      saw_origin_probe = true;
      for (const double est : probe.estimates) {
        CHECK(est == doctest::Approx(0.125).epsilon(1e-4));
      }
    }
  }
  CHECK(saw_origin_probe);
}

TEST_CASE("smoothness probe: lpp_max diverges like 1/h at the flat point") {
  const std::vector<double> steps = default_probe_steps();
  const auto verdict = smoothness_probe(DrivingSpec::lpp_max(1), steps);
  CHECK_FALSE(verdict.c2_consistent);
  for (const auto& probe : verdict.probes) {
    if (probe.base_offset == 0.0) {
      for (std::size_t i = 0; i < steps.size(); ++i) {
        CHECK(probe.estimates[i] ==
              doctest::Approx(oracles::lpp_second_difference_flat(steps[i])).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("smoothness probe: rsos is linear in d=1, kinked in d=2") {
  CHECK(smoothness_probe(DrivingSpec::rsos_maxmin(1), default_probe_steps()).c2_consistent);
  const auto verdict = smoothness_probe(DrivingSpec::rsos_maxmin(2), default_probe_steps());
  CHECK_FALSE(verdict.c2_consistent);
}

TEST_CASE("smoothness probe: remaining catalog verdicts") {
  CHECK(smoothness_probe(DrivingSpec::average(2), default_probe_steps()).c2_consistent);
  CHECK(smoothness_probe(DrivingSpec::logsumexp(1, 1.0), default_probe_steps()).c2_consistent);
  CHECK(smoothness_probe(DrivingSpec::identity(1), default_probe_steps()).c2_consistent);
  CHECK(smoothness_probe(DrivingSpec::gibbs(1, GibbsPotential::quartic, 0.1),
                         default_probe_steps())
            .c2_consistent);
  CHECK_FALSE(smoothness_probe(DrivingSpec::lpp_max(2), default_probe_steps()).c2_consistent);
}

TEST_CASE("smoothed kind: equivariant, monotone, close to its base for small delta") {
  const auto spec = DrivingSpec::smoothed(1, DrivingKind::lpp_max, 0.05, 20);
  const auto base = DrivingSpec::lpp_max(1);
  // Smoothing a 1-Lipschitz max moves it by at most E|max of noise|.
  const auto u = nv1(0.8, -0.1, 0.3);
  CHECK(std::fabs(evaluate(spec, u) - evaluate(base, u)) < 0.1);
  const auto report = validate_properties(spec, 300, 1e-10);
  CHECK(report.all_passed());
}

TEST_CASE("renormalized spec shifts evaluations exactly") {
  const auto spec = DrivingSpec::logsumexp(1, 1.0);
  const double phi0 = evaluate(spec, NeighborhoodVector(1));
  const auto tilde = spec.shifted(phi0);
  CHECK(evaluate(tilde, NeighborhoodVector(1)) == doctest::Approx(0.0).epsilon(1e-15));
  const auto u = nv1(0.4, 0.1, -0.2);
  CHECK(evaluate(tilde, u) == doctest::Approx(evaluate(spec, u) - phi0).epsilon(1e-15));
}
