#include "pdmp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pdmp/errors.hpp"
#include "pdmp/quadrature.hpp"
#include "pdmp/renewal.hpp"

namespace pdmp {

namespace {

double clipped_factor(double constant, double rate, double t) {
  return std::max(0.0, 1.0 - constant * std::exp(-rate * t));
}

}  // namespace

RateReport compute_rates(const Model& model, const RateOptions& opt) {
  const DistributionSpec& g = model.interarrival();
  const DistributionSpec& h = model.metabolic;
  const DistributionSpec& f = model.intake;
  RateReport r;
  auto& prov = r.provenance;

  r.mean_intake = f.mean();
  r.mean_rate = h.mean();
  r.mean_interarrival = g.mean();
  r.v_G = g.laplace_abscissa();
  prov["v_G"] = "abscissa of convergence of the inter-intake Laplace transform";
  r.rho = contraction_deficit(g, h);
  prov["rho"] = "1 - E[exp(-Theta dT)]";
  if (!(r.rho > 0.0 && r.rho < 1.0)) {
    throw HypothesisError("H1", "contraction deficit must lie in (0,1), got " +
                                    std::to_string(r.rho));
  }

  // Phase 1: age coalescence.
  r.age_case = opt.age_case.value_or(classify(model.hazard));
  if (r.age_case == AgeCase::PositiveFloor) {
    const AgeBoundParams params = age_bound_params(r.age_case, model.hazard, {});
    r.C1 = 1.0;
    r.v1 = params.exp_rate;
    prov["v1"] = "age coalescence dominated by Exp(zeta(0))";
  } else {
    if (!opt.age_tuning) {
      throw HypothesisError("age-tuning", "epsilon, b, c are required when inf zeta = 0");
    }
    const AgeBoundParams params = age_bound_params(r.age_case, model.hazard, *opt.age_tuning);
    r.p1 = params.p1;
    r.p2 = params.p2;
    const AgeTailBound tail(params, opt.age_tail_draws, opt.age_tail_seed);
    r.C1 = tail.envelope().constant;
    r.v1 = tail.envelope().rate;
    prov["v1"] = "exponential envelope of the age-coalescence bounding variable, case " +
                 std::string(to_string(r.age_case)) + ", capped by its moment bound";
  }
  prov["C1"] = prov["v1"];
  prov["p1"] = prov["p2"] = "age-coalescence step probabilities";

  // Phase 2: Wasserstein contraction of the levels.
  const RenewalKernel kernel(g, h, r.order);
  const LaplaceRoot root = find_w(kernel, opt.w_cap);
  r.w = root.value;
  r.w_capped = root.capped;
  r.w_margin = opt.w_margin;
  prov["w"] = root.capped ? "renewal kernel Laplace transform below 1 up to the cap"
                          : "root of psi_J(u) = 1 by bisection";
  const double tilt = r.w * (1.0 - opt.w_margin);
  const double horizon = opt.renewal_horizon.value_or(10.0 / r.w);
  const RenewalSolution sol =
      solve_renewal(kernel, tilt, opt.renewal_step,
                    std::max(horizon, 10.0 * opt.renewal_step), opt.directly_integrable);
  r.C_renewal = sol.constant();
  prov["C_renewal"] = "grid maximum of the tilted renewal solution";
  if (const auto* e = std::get_if<Exponential>(&g.law())) {
    r.exponential_interarrival = true;
    r.lambda = e->rate;
    r.v2_prime = exponential_case_decay(e->rate, h, r.order) / r.order;
    r.C2_prime = 1.0;
    prov["v2_prime"] = "lambda (1 - E[exp(-p Theta dT)]) / p, constant hazard";
  } else {
    r.v2_prime = tilt / r.order;
    r.C2_prime = r.C_renewal;
    prov["v2_prime"] = "(w - margin) / p from the renewal solution";
  }
  prov["C2_prime"] = prov["v2_prime"];

  // Phase 3 threshold: sup eta.
  r.eta = eta_envelope(opt.eta_eps_max, f, opt.holder, opt.tail);
  r.C4 = r.eta.constant;
  r.v4_prime = r.eta.exponent;
  prov["C4"] = prov["v4_prime"] = r.eta.provenance;

  r.v_prime = r.v2_prime / (1.0 + r.v4_prime);
  r.v2 = r.v2_prime - r.v_prime;
  r.v4 = r.v4_prime * r.v_prime;
  prov["v_prime"] = "v2' / (1 + v4'), equalising v2 and v4";
  prov["v2"] = "v2' - v'";
  prov["v4"] = "v4' v'";

  // Waiting for a jump after beta t.
  if (opt.v3) {
    r.v3 = *opt.v3;
  } else {
    r.v3 = std::isfinite(r.v_G) ? 0.5 * r.v_G : 1.0 / r.mean_interarrival;
  }
  r.C3 = g.laplace(r.v3);
  if (!(r.v3 > 0.0) || !std::isfinite(r.C3)) {
    throw HypothesisError("H3", "inter-intake law has no exponential moment of order v3 = " +
                                    std::to_string(r.v3));
  }
  prov["v3"] = opt.v3 ? "configured exponential moment order of G"
                      : "half the abscissa of convergence of G (or 1/E[dT])";
  prov["C3"] = "psi_G(v3)";

  // Phase split equalising alpha v1 = (beta - alpha) v2 = (1 - beta) v3.
  const double rate = 1.0 / (1.0 / r.v1 + 1.0 / r.v2 + 1.0 / r.v3);
  r.alpha = opt.alpha.value_or(rate / r.v1);
  r.beta = opt.beta.value_or(r.alpha + rate / r.v2);
  if (!(r.alpha > 0.0 && r.alpha < r.beta && r.beta < 1.0)) {
    throw InvalidSpecError("phase split needs 0 < alpha < beta < 1");
  }
  prov["alpha"] = prov["beta"] = (opt.alpha || opt.beta)
                                     ? "configured phase split"
                                     : "equalised phase rates alpha v1 = (beta-alpha) v2 = (1-beta) v3";

  const double keep = 1.0 - r.rho;
  r.moment_bound = opt.initial.level_sum * (1.0 + 1.0 / keep) + 2.0 * r.mean_intake / r.rho;
  prov["moment_bound"] = "E[X0+X~0](1 + 1/E[exp(-Theta dT)]) + 2E[U]/(1 - E[exp(-Theta dT)])";
  r.C2 = r.moment_bound * r.C2_prime;
  prov["C2"] = "moment bound times C2'";
  r.C1_w1 = (r.moment_bound + 2.0 * r.mean_rate + 2.0 * r.mean_interarrival) * r.C1;
  r.C2_w1 = r.moment_bound * r.C2_prime;
  prov["C1_w1"] = "(moment bound + 2E[Theta] + 2E[dT]) C1";
  prov["C2_w1"] = "moment bound times C2'";
  return r;
}

MainBounds main_theorem_bounds(const RateReport& r) {
  MainBounds out;
  out.tv.provenance = "main-theorem-tv-product";
  out.tv.evaluate = [r](double t) {
    const double survive = clipped_factor(r.C1, r.v1 * r.alpha, t) *
                           clipped_factor(r.C2, r.v2 * (r.beta - r.alpha), t) *
                           clipped_factor(r.C3, r.v3 * (1.0 - r.beta), t) *
                           clipped_factor(r.C4, r.v4 * (r.beta - r.alpha), t);
    return std::clamp(1.0 - survive, 0.0, 1.0);
  };
  out.w1.provenance = "main-theorem-w1-sum";
  out.w1.evaluate = [r](double t) {
    return r.C1_w1 * std::exp(-r.v1 * r.alpha * t) +
           r.C2_w1 * std::exp(-r.v2_prime * (1.0 - r.alpha) * t);
  };
  return out;
}

double default_epsilon_tv(const RateReport& r, double t) {
  return std::exp(-r.v_prime * (r.beta - r.alpha) * t);
}

CouplingPhaseParams default_phase_params(const RateReport& r, double t) {
  CouplingPhaseParams p;
  p.alpha = r.alpha;
  p.beta = r.beta;
  p.epsilon_tv = default_epsilon_tv(r, t);
  return p;
}

double expected_max(const DistributionSpec& x, const DistributionSpec& y) {
  std::vector<double> breaks;
  for (const auto* s : {&x, &y}) {
    if (std::holds_alternative<Dirac>(s->law())) {
      breaks.push_back(std::get<Dirac>(s->law()).value);
    } else {
      for (double b : s->density_breaks()) breaks.push_back(b);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> interior;
  for (double b : breaks) {
    if (b > 0.0) interior.push_back(b);
  }
  const double scale = std::max({x.mean(), y.mean(), 1e-3});
  if (std::isfinite(x.support_hi()) && std::isfinite(y.support_hi())) {
    interior.insert(interior.begin(), 0.0);
    interior.push_back(std::max(x.support_hi(), y.support_hi()));
    std::sort(interior.begin(), interior.end());
    interior.erase(std::unique(interior.begin(), interior.end()), interior.end());
    return integrate_pieces([&](double t) { return 1.0 - x.cdf(t) * y.cdf(t); }, interior, 1e-12);
  }
  return integrate_to_infinity([&](double t) { return 1.0 - x.cdf(t) * y.cdf(t); }, 0.0, interior,
                               1e-12, scale);
}

ExpCaseBounds exp_case_bounds(double lambda, const DistributionSpec& metabolic,
                              const DistributionSpec& intake, const HolderData& holder,
                              const InitialMoments& initial) {
  if (!(lambda > 0.0)) throw HypothesisError("exp-case", "needs an exponential rate > 0");
  require_density(intake, "H4a");
  if (!std::isfinite(holder.support_bound)) {
    throw HypothesisError("exp-case", "needs an intake density with compact support");
  }
  const double hh = holder.exponent;
  if (!(holder.constant > 0.0) || !(hh > 0.0 && hh <= 1.0)) {
    throw HypothesisError("H4a", "Holder data needs K > 0 and 0 < h <= 1");
  }
  const DistributionSpec g(Exponential{lambda}, Role::InterArrival);
  ExpCaseBounds out;
  const double rho = contraction_deficit(g, metabolic);
  out.rho = rho;
  const double k_eta = holder.constant * (holder.support_bound + 1.0) / 2.0;
  const double c_moment =
      initial.level_sum * (1.0 + 1.0 / (1.0 - rho)) + 2.0 * intake.mean() / rho;

  out.rate_method1 = lambda * rho * hh / (1.0 + hh + 2.0 * rho * hh);
  out.rate_method2 = lambda * rho * hh / (1.0 + hh);
  out.constant_method1 = 2.0 + c_moment + k_eta;
  const double r2 = out.rate_method2;
  out.constant_method2 = k_eta + lambda / (lambda - r2) * std::exp(-r2 / lambda) +
                         initial.level_max / ((1.0 - rho) * (1.0 - rho));

  const double r1 = out.rate_method1;
  out.method1.provenance = "exp-case-method1-product";
  out.method1.evaluate = [=](double t) {
    const double q = std::exp(-r1 * t);
    const double keep = (1.0 - q) * (1.0 - q) * std::max(0.0, 1.0 - c_moment * q) *
                        std::max(0.0, 1.0 - k_eta * q);
    return std::clamp(1.0 - keep, 0.0, 1.0);
  };
  const double c1 = out.constant_method1;
  out.method1_simplified.provenance = "exp-case-method1-simplified";
  out.method1_simplified.evaluate = [=](double t) { return c1 * std::exp(-r1 * t); };

  const double level_max = initial.level_max;
  out.method2.provenance = "exp-case-method2-random-split";
  out.method2.evaluate = [=](double t) {
    const double eps = std::exp(-lambda * rho * t / (1.0 + hh));
    const double lt = lambda * (1.0 - rho) * t;
    const double a = std::exp(-lambda * t) *
                     (1.0 + lambda * t +
                      level_max / (eps * (1.0 - rho) * (1.0 - rho)) * (std::expm1(lt) - lt));
    const double keep =
        std::max(0.0, 1.0 - a) * std::max(0.0, 1.0 - k_eta * std::pow(eps, hh));
    return std::clamp(1.0 - keep, 0.0, 1.0);
  };
  const double c2 = out.constant_method2;
  out.method2_simplified.provenance = "exp-case-method2-simplified";
  out.method2_simplified.evaluate = [=](double t) { return c2 * std::exp(-r2 * t); };
  return out;
}

}  // namespace pdmp
