#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "pdmp/age_bounds.hpp"
#include "pdmp/coupling.hpp"
#include "pdmp/eta.hpp"
#include "pdmp/process.hpp"

namespace pdmp {

/// A closed-form bound as a function of time, tagged with where it comes from.
struct BoundCurve {
  std::string provenance;
  std::function<double(double)> evaluate;

  double operator()(double t) const { return evaluate(t); }
};

/// First moments of the initial levels.
struct InitialMoments {
  double level_sum = 0.0;  // E[X0 + X~0]
  double level_max = 0.0;  // E[X0 v X~0]
};

struct RateOptions {
  InitialMoments initial;
  std::optional<AgeCase> age_case;             // default: classify the hazard
  std::optional<AgeCouplingParams> age_tuning; // required unless zeta(0) > 0
  std::size_t age_tail_draws = 1'000'000;
  std::uint64_t age_tail_seed = 0x9e3779b97f4a7c15ULL;
  std::optional<HolderData> holder;
  std::optional<TailData> tail;
  double eta_eps_max = 1.0;
  double w_margin = 0.05;  // renewal tilt is w (1 - w_margin)
  double w_cap = 1e3;
  double renewal_step = 1e-3;
  std::optional<double> renewal_horizon;  // default 10 / w
  bool directly_integrable = false;
  std::optional<double> v3;
  std::optional<double> alpha;
  std::optional<double> beta;
};

/// Every constant entering the convergence bounds.
struct RateReport {
  double order = 1.0;
  AgeCase age_case = AgeCase::PositiveFloor;
  bool exponential_interarrival = false;
  double lambda = 0.0;  // rate of G when exponential

  double w = 0.0;
  bool w_capped = false;
  double w_margin = 0.0;
  double v_G = 0.0;
  double rho = 0.0;
  double C_renewal = 0.0;
  double p1 = 1.0;
  double p2 = 1.0;
  EtaEnvelope eta;

  double v1 = 0.0, v2 = 0.0, v3 = 0.0, v4 = 0.0;
  double C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0;
  double v2_prime = 0.0, C2_prime = 0.0, v4_prime = 0.0, v_prime = 0.0;
  double alpha = 0.0, beta = 0.0;
  double moment_bound = 0.0;  // bound on E[X_s] + E[X~_s]
  double C1_w1 = 0.0, C2_w1 = 0.0;

  double mean_intake = 0.0;
  double mean_rate = 0.0;
  double mean_interarrival = 0.0;

  /// Constant name -> origin of its value.
  std::map<std::string, std::string> provenance;
};

/// Computes the constants of the total-variation and Wasserstein bounds for
/// the order-1 distance. Throws HypothesisError when an assumption fails.
RateReport compute_rates(const Model& model, const RateOptions& options);

struct MainBounds {
  BoundCurve tv;
  BoundCurve w1;
};

/// TV: 1 - prod_i max(0, 1 - C_i exp(-v_i l_i t)) with phase lengths
/// alpha, beta - alpha, 1 - beta, beta - alpha.
/// W1: C1 exp(-v1 alpha t) + C2 exp(-v2' (1 - alpha) t).
MainBounds main_theorem_bounds(const RateReport& report);

/// Phase-3 closeness threshold exp(-v' (beta - alpha) t).
double default_epsilon_tv(const RateReport& report, double t);
/// alpha, beta from the report and the default threshold at horizon t.
CouplingPhaseParams default_phase_params(const RateReport& report, double t);

struct ExpCaseBounds {
  double rho = 0.0;
  double rate_method1 = 0.0;  // lambda rho h / (1 + h + 2 rho h)
  double rate_method2 = 0.0;  // lambda rho h / (1 + h)
  double constant_method1 = 0.0;
  double constant_method2 = 0.0;
  BoundCurve method1;             // product form at the optimal split
  BoundCurve method1_simplified;  // C exp(-rate_method1 t)
  BoundCurve method2;             // random-split bound with its optimal epsilon
  BoundCurve method2_simplified;  // C exp(-rate_method2 t)
};

/// Bounds for exponential inter-intake times and a Holder intake density with
/// compact support. Throws HypothesisError otherwise.
ExpCaseBounds exp_case_bounds(double lambda, const DistributionSpec& metabolic,
                              const DistributionSpec& intake, const HolderData& holder,
                              const InitialMoments& initial);

/// E[max(X, Y)] for independent X, Y.
double expected_max(const DistributionSpec& x, const DistributionSpec& y);

}  // namespace pdmp
