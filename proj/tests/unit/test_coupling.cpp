#include <doctest.h>

#include <cmath>
#include <vector>

#include "pdmp/coupling.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/estimators.hpp"
#include "pdmp/quadrature.hpp"
#include "support.hpp"

using namespace pdmp;

namespace {

HazardProfile profile(Law law) { return HazardProfile(DistributionSpec(law, Role::InterArrival)); }

Model make_model(Law intake, Law interarrival, Law metabolic) {
  return Model(DistributionSpec(intake, Role::Intake),
               DistributionSpec(interarrival, Role::InterArrival),
               DistributionSpec(metabolic, Role::Metabolic));
}

// Independent route to the first coupled-age event: Poisson candidates at a
// constant majorant rate, kept as common with rate zeta(younger) and as a
// lone elder jump with rate zeta(elder) - zeta(younger).
CoupledEventKind thinning_first_event(const HazardProfile& h, double a0, double a1,
                                      double majorant, RandomStream& rng) {
  double s = 0.0;
  for (;;) {
    s += rng.exp1() / majorant;
    const double za = h.hazard(a0 + s);
    const double zb = h.hazard(a1 + s);
    const double u = rng.uniform01() * majorant;
    const double common = std::min(za, zb);
    if (u < common) return CoupledEventKind::Common;
    if (u < std::max(za, zb)) {
      return za > zb ? CoupledEventKind::FirstOnly : CoupledEventKind::SecondOnly;
    }
  }
}

}  // namespace

TEST_CASE("constant hazard: the first event is common and tau_A is exponential") {
  const HazardProfile h = profile(Exponential{1.0});
  RandomStream rng(1);
  std::vector<double> taus;
  for (int i = 0; i < 20000; ++i) {
    const auto path = simulate_coupled_ages(0.3, 2.0, h, 1e3, rng);
    REQUIRE(path.events.size() == 1);
    CHECK(path.events.front().kind == CoupledEventKind::Common);
    taus.push_back(path.report.tau_A);
  }
  const MeanEstimate m = mean_estimate(taus);
  CHECK(std::abs(m.mean - 1.0) < 3.0 * m.sd / std::sqrt(20000.0));
  CHECK(ks_distance(taus, [](double t) { return 1.0 - std::exp(-t); }) <
        testing_support::ks_critical(taus.size()));
}

TEST_CASE("equal ages are already coalesced") {
  RandomStream rng(1);
  const auto path = simulate_coupled_ages(0.7, 0.7, profile(Weibull{2.0, 1.0}), 10.0, rng);
  CHECK(path.report.tau_A == 0.0);
  CHECK(path.events.empty());
}

TEST_CASE("first-event classification agrees with a thinning oracle") {
  // zeta(t) = 2t, ages 0 and 1: the elder is the second process.
  const HazardProfile h = profile(Weibull{2.0, 1.0});
  constexpr int n = 100000;
  RandomStream rng(17), oracle_rng(18);
  int common = 0, oracle_common = 0;
  for (int i = 0; i < n; ++i) {
    const auto path = simulate_coupled_ages(0.0, 1.0, h, 50.0, rng);
    REQUIRE_FALSE(path.events.empty());
    const auto kind = path.events.front().kind;
    CHECK(kind != CoupledEventKind::FirstOnly);
    common += kind == CoupledEventKind::Common;
    oracle_common += thinning_first_event(h, 0.0, 1.0, h.hazard(6.0), oracle_rng) ==
                     CoupledEventKind::Common;
  }
  // E[zeta(s)/zeta(1+s)] with s the elder's residual time from age 1.
  const double exact = integrate_to_infinity(
      [](double s) { return 2.0 * s * std::exp(-(2.0 * s + s * s)); }, 0.0, {}, 1e-12);
  const double p = static_cast<double>(common) / n;
  const double q = static_cast<double>(oracle_common) / n;
  const double se = std::sqrt(exact * (1.0 - exact) / n);
  CHECK(std::abs(p - exact) < 3.0 * se);
  CHECK(std::abs(p - q) < 3.0 * std::sqrt(2.0) * se);
}

TEST_CASE("only the elder ever jumps alone") {
  const HazardProfile h = profile(Gamma{3.0, 1.0});
  RandomStream rng(4);
  for (int i = 0; i < 2000; ++i) {
    const auto path = simulate_coupled_ages(0.0, 2.5, h, 500.0, rng);
    for (const auto& ev : path.events) {
      if (ev.kind == CoupledEventKind::FirstOnly) CHECK(ev.age_before > ev.age_tilde_before);
      if (ev.kind == CoupledEventKind::SecondOnly) CHECK(ev.age_tilde_before > ev.age_before);
    }
    if (std::isfinite(path.report.tau_A)) {
      CHECK(path.events.back().kind == CoupledEventKind::Common);
      CHECK(path.events.back().t == path.report.tau_A);
    }
  }
}

TEST_CASE("full coupling: identical starts stay identical") {
  const Model m = make_model(Uniform{0.0, 1.0}, Weibull{2.0, 1.0}, Uniform{0.5, 1.5});
  RandomStream rng(3);
  const ProcessState s{1.5, 0.8, 0.4, 0.0};
  const CoupledPath p = simulate_coupled_full(s, s, m, 30.0, rng);
  CHECK(p.report.tau == 0.0);
  CHECK(p.report.tau_A == 0.0);
  CHECK(p.first.jump_times == p.second.jump_times);
  CHECK(p.first.levels == p.second.levels);
  CHECK(p.first.thetas == p.second.thetas);
  CHECK(p.final_state.y == p.final_state.y_tilde);
}

TEST_CASE("full coupling: absorption and the contraction identity after tau_A") {
  const Model m = make_model(Uniform{0.0, 1.0}, Weibull{2.0, 1.0}, Uniform{0.5, 1.5});
  RandomStream rng(8);
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const CoupledPath p = simulate_coupled_full({1.0, 1.0, 0.0, 0.0}, {3.0, 0.7, 0.9, 0.0}, m,
                                                5.0, rng);
    const double ta = p.report.tau_A;
    if (!std::isfinite(ta)) continue;
    const ProcessState y0 = state_at(p.first, ta);
    const ProcessState yt0 = state_at(p.second, ta);
    const double gap0 = std::abs(y0.x - yt0.x);
    const double rate0 = integrated_rate(p.first, ta);
    for (double t = ta; t <= 5.0; t += 0.05) {
      const ProcessState y = state_at(p.first, t);
      const ProcessState yt = state_at(p.second, t);
      CHECK(y.age == yt.age);
      CHECK(y.theta == yt.theta);
      const double expected = gap0 * std::exp(-(integrated_rate(p.first, t) - rate0));
      CHECK(std::abs(std::abs(y.x - yt.x) - expected) <= 1e-12 * expected);
      ++checked;
    }
    // Once the ages merge, every later event is common.
    bool merged = false;
    for (const auto& ev : p.events) {
      if (merged) CHECK(ev.kind == CoupledEventKind::Common);
      merged = merged || ev.kind == CoupledEventKind::Common;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("full coupling: each component is marginally the single process") {
  const Model m = make_model(Exponential{1.0}, Weibull{2.0, 1.0}, Uniform{0.5, 1.5});
  const ProcessState a{1.0, 1.0, 0.0, 0.0}, b{3.0, 0.7, 1.2, 0.0};
  constexpr int n = 20000;
  constexpr double t = 2.5;
  std::vector<double> cx, cage, ctheta, sx, sage, stheta, cxt, sxt;
  RandomStream rng(21), rng2(22);
  for (int i = 0; i < n; ++i) {
    const CoupledPath p = simulate_coupled_full(a, b, m, t, rng);
    cx.push_back(p.final_state.y.x);
    cage.push_back(p.final_state.y.age);
    ctheta.push_back(p.final_state.y.theta);
    cxt.push_back(p.final_state.y_tilde.x);
    sx.push_back(simulate_path(a, m, t, rng2).final_state.x);
    const SimulatedPath q = simulate_path(b, m, t, rng2);
    sxt.push_back(q.final_state.x);
    sage.push_back(q.final_state.age);
    stheta.push_back(q.final_state.theta);
  }
  const double crit = testing_support::ks_two_sample_critical(n, n);
  CHECK(testing_support::ks_two_sample(cx, sx) < crit);
  CHECK(testing_support::ks_two_sample(cxt, sxt) < crit);
  // The second component's age and rate against independent runs of the same start.
  std::vector<double> cage2, ctheta2;
  RandomStream rng3(23);
  for (int i = 0; i < n; ++i) {
    const CoupledPath p = simulate_coupled_full(a, b, m, t, rng3);
    cage2.push_back(p.final_state.y_tilde.age);
    ctheta2.push_back(p.final_state.y_tilde.theta);
  }
  CHECK(testing_support::ks_two_sample(cage2, sage) < crit);
  CHECK(testing_support::ks_two_sample(ctheta2, stheta) < crit);
  (void)cage;
  (void)ctheta;
}

TEST_CASE("full coupling: Wasserstein contraction with constant hazard") {
  const Model m = make_model(Uniform{0.0, 1.0}, Exponential{1.0}, Dirac{1.0});
  RandomStream rng(31);
  for (double t : {2.0, 4.0, 8.0}) {
    std::vector<double> ratio;
    for (int i = 0; i < 20000; ++i) {
      const CoupledPath p = simulate_coupled_full({2.0, 1.0, 0.0, 0.0}, {4.0, 1.0, 0.0, 0.0}, m,
                                                  t, rng);
      ratio.push_back(std::abs(p.final_state.y.x - p.final_state.y_tilde.x) / 2.0);
    }
    const MeanEstimate est = mean_estimate(ratio);
    CHECK(est.mean <= std::exp(-0.5 * t) + est.half_width);
  }
}

TEST_CASE("TV jump coupling") {
  const DistributionSpec f(Uniform{0.0, 1.0}, Role::Intake);
  RandomStream rng(5);
  SUBCASE("zero gap always merges") {
    for (int i = 0; i < 1000; ++i) {
      const auto o = tv_jump_coupling(1.25, 1.25, f, rng);
      CHECK(o.merged);
      CHECK(o.x_plus == o.x_tilde_plus);
    }
  }
  SUBCASE("box overlap and marginals") {
    constexpr int n = 100000;
    int merged = 0;
    std::vector<double> du, dut;
    for (int i = 0; i < n; ++i) {
      const auto o = tv_jump_coupling(1.0, 1.3, f, rng);
      merged += o.merged;
      if (o.merged) CHECK(o.x_plus == o.x_tilde_plus);
      du.push_back(o.x_plus - 1.0);
      dut.push_back(o.x_tilde_plus - 1.3);
    }
    const double p = static_cast<double>(merged) / n;
    CHECK(std::abs(p - 0.7) < 2.0 * std::sqrt(0.21 / n));
    CHECK(ks_distance(du, [&](double x) { return f.cdf(x); }) < testing_support::ks_critical(n));
    CHECK(ks_distance(dut, [&](double x) { return f.cdf(x); }) < testing_support::ks_critical(n));
  }
  SUBCASE("exponential intakes merge with probability exp(-gap)") {
    const DistributionSpec e(Exponential{1.0}, Role::Intake);
    constexpr int n = 50000;
    int merged = 0;
    for (int i = 0; i < n; ++i) merged += tv_jump_coupling(0.0, 0.4, e, rng).merged;
    CHECK(std::abs(static_cast<double>(merged) / n - std::exp(-0.4)) < 3.0 * std::sqrt(0.25 / n));
  }
  SUBCASE("point masses have no TV coupling") {
    CHECK_THROWS_AS(tv_jump_coupling(0.0, 1.0, DistributionSpec(Dirac{1.0}, Role::Intake), rng),
                    NoDensityError);
  }
}

TEST_CASE("three-phase coupling") {
  const Model m = make_model(Uniform{0.0, 1.0}, Exponential{1.0}, Dirac{1.0});
  CouplingPhaseParams params{0.2, 0.6, 0.05, std::nullopt};
  RandomStream rng(12);
  SUBCASE("identical starts coalesce at once") {
    const ProcessState s{2.0, 1.0, 0.0, 0.0};
    const CouplingReport r = run_three_phase(s, s, params, m, 10.0, rng);
    CHECK(r.tau == 0.0);
    CHECK(r.phases->merged);
  }
  SUBCASE("constant hazard: phase-one success probability") {
    constexpr int n = 50000;
    constexpr double t = 5.0;
    int success = 0;
    for (int i = 0; i < n; ++i) {
      const auto r = run_three_phase({2.0, 1.0, 0.0, 0.0}, {4.0, 1.0, 1.0, 0.0}, params, m, t, rng);
      success += r.phases->ages_by_alpha;
      if (std::isfinite(r.tau) && std::isfinite(r.tau_A)) CHECK(r.tau_A <= r.tau);
    }
    const double exact = 1.0 - std::exp(-params.alpha * t);
    CHECK(std::abs(static_cast<double>(success) / n - exact) <
          2.0 * std::sqrt(exact * (1.0 - exact) / n));
  }
  SUBCASE("invalid phases") {
    CouplingPhaseParams bad{0.6, 0.2, 0.1, std::nullopt};
    CHECK_THROWS_AS(run_three_phase({}, {}, bad, m, 1.0, rng), InvalidSpecError);
    bad = {0.2, 0.6, 1.5, std::nullopt};
    CHECK_THROWS_AS(run_three_phase({}, {}, bad, m, 1.0, rng), InvalidSpecError);
  }
}

TEST_CASE("age-coalescence bound parameters") {
  const HazardProfile ray = profile(Weibull{2.0, std::sqrt(2.0)});
  const AgeCouplingParams tuning{0.5, 1.0, 2.0};
  const AgeBoundParams p = age_bound_params(AgeCase::UnboundedHazard, ray, tuning);
  CHECK(p.p1 == doctest::Approx(1.0 - std::exp(-0.25)));
  CHECK(p.p1 == doctest::Approx(0.2212).epsilon(1e-3));
  CHECK(p.p2 == doctest::Approx(0.5 * std::exp(-1.5) * (1.0 - std::exp(-0.5))));
  CHECK(p.p2 == doctest::Approx(0.0439).epsilon(1e-3));

  const HazardProfile shifted = profile(ShiftedExponential{0.5, 2.0});
  const AgeBoundParams q = age_bound_params(AgeCase::BoundedHazard, shifted, {0.3, 1.0, 2.0});
  CHECK(q.p1 == doctest::Approx(std::exp(-2.0)));
  CHECK(q.p2 == doctest::Approx(1.0));

  CHECK(classify(ray) == AgeCase::UnboundedHazard);
  CHECK(classify(shifted) == AgeCase::BoundedHazard);
  CHECK(classify(profile(Uniform{1.0, 3.0})) == AgeCase::FiniteSupport);
  CHECK(classify(profile(Uniform{0.0, 3.0})) == AgeCase::PositiveFloor);
  CHECK_THROWS_AS(classify(profile(Uniform{1.0, 1.4})), HypothesisError);

  RandomStream rng(1);
  CHECK_THROWS_AS(age_coalescence_algorithm(AgeCase::BoundedHazard, tuning, ray, 0, 1, 10, rng),
                  HypothesisError);
  CHECK_THROWS_AS(age_coalescence_algorithm(AgeCase::FiniteSupport, tuning, ray, 0, 1, 10, rng),
                  HypothesisError);
  try {
    age_bound_params(AgeCase::FiniteSupport, profile(Uniform{1.0, 4.0}), {0.4, 1.5, 3.0});
    FAIL("expected a hypothesis error");
  } catch (const HypothesisError& e) {
    CHECK(e.assumption() == "age-epsilon");
  }
  CHECK_THROWS_AS(age_bound_params(AgeCase::UnboundedHazard, ray, {0.5, 1.0, 1.4}),
                  HypothesisError);
}

TEST_CASE("age coalescence is dominated by the bounding variable") {
  RandomStream rng(77);
  SUBCASE("case iii") {
    const HazardProfile ray = profile(Weibull{2.0, std::sqrt(2.0)});
    std::vector<double> tau, bound;
    for (int i = 0; i < 20000; ++i) {
      const auto r =
          age_coalescence_algorithm(AgeCase::UnboundedHazard, {0.5, 1.0, 2.0}, ray, 0.0, 1.0,
                                    1e6, rng);
      tau.push_back(r.tau_A);
      bound.push_back(*r.bound_variable);
    }
    std::vector<double> grid;
    for (int k = 1; k <= 20; ++k) grid.push_back(5.0 * k);
    CHECK(survival_compare(tau, bound, grid).all_hold());
  }
  SUBCASE("positive floor") {
    const HazardProfile h = profile(Uniform{0.0, 2.0});
    std::vector<double> tau, expo;
    for (int i = 0; i < 20000; ++i) {
      tau.push_back(simulate_coupled_ages(0.0, 1.5, h, 1e6, rng).report.tau_A);
      expo.push_back(rng.exp1() / 0.5);
    }
    std::vector<double> grid;
    for (int k = 1; k <= 20; ++k) grid.push_back(0.5 * k);
    CHECK(survival_compare(tau, expo, grid).all_hold());
  }
}
