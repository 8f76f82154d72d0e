#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pdmp/hazard.hpp"
#include "pdmp/random.hpp"

namespace pdmp {

/// Regimes of the hazard profile that admit a stochastic bound on the age
/// coalescence time tau_A.
enum class AgeCase {
  PositiveFloor,    // zeta(0) > 0: tau_A is dominated by Exp(zeta(0))
  FiniteSupport,    // inf zeta = 0, 3a/2 < d < inf            (case i)
  BoundedHazard,    // inf zeta = 0, d = inf, sup zeta < inf   (case ii)
  UnboundedHazard,  // inf zeta = 0, d = inf, sup zeta = inf   (case iii)
};

std::string_view to_string(AgeCase c);
/// Parses "floor", "i", "ii", "iii".
AgeCase parse_age_case(std::string_view s);

/// The regime a profile falls in. Throws HypothesisError for the finite
/// support configuration a <= d <= 3a/2, which has no bound.
AgeCase classify(const HazardProfile& profile);

/// Tuning of the age coalescence bound: the epsilon-coalescence window and
/// the common-jump domain [b, c].
struct AgeCouplingParams {
  double epsilon = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Explicit parameters of the bounding variable.
struct AgeBoundParams {
  AgeCase kase = AgeCase::PositiveFloor;
  double p1 = 1.0;
  double p2 = 1.0;
  AgeCouplingParams tuning;
  double a = 0.0;  // positivity point
  double d = 0.0;  // explosion point
  /// Rate of the exponential ingredients: zeta(0), zeta(b) or zeta(c).
  double exp_rate = 0.0;
};

/// p1 and p2 for `kase`. Validates the case hypotheses against the profile
/// (epsilon > a/2, a < b < c < d, zeta(b) > 0, c > b + epsilon) and throws
/// HypothesisError naming the violated one.
AgeBoundParams age_bound_params(AgeCase kase, const HazardProfile& profile,
                                const AgeCouplingParams& tuning);

/// One draw of the bounding variable (geometric/exponential combination).
double sample_age_bound(const AgeBoundParams& params, RandomStream& rng);

/// Geometric variate on {1, 2, ...} with success probability p.
std::uint64_t sample_geometric(double p, RandomStream& rng);

struct ExponentialTail {
  double constant = 1.0;
  double rate = 0.0;
  double operator()(double t) const;
};

/// Tail P(V > t) of the bounding variable V.
///
/// Exact for PositiveFloor; otherwise estimated from a cached Monte Carlo
/// sample, with an exponential envelope C1 exp(-v1 t) fitted to dominate
/// the empirical tail on a grid. v1 never exceeds the analytic
/// exponential-moment cap of the combination.
class AgeTailBound {
 public:
  AgeTailBound(const AgeBoundParams& params, std::size_t draws, std::uint64_t seed);

  const AgeBoundParams& params() const noexcept { return params_; }
  double survival(double t) const;
  const ExponentialTail& envelope() const noexcept { return envelope_; }
  /// Sup of the exponential moments guaranteed by Holder's inequality.
  double rate_cap() const noexcept { return cap_; }
  /// Chernoff bound inf_s E[exp(s V)] exp(-s t) with the Holder moment bound.
  double analytic_tail(double t) const;
  std::span<const double> sorted_sample() const noexcept { return sample_; }

 private:
  double log_moment_bound(double s) const;

  AgeBoundParams params_;
  std::vector<double> sample_;
  ExponentialTail envelope_;
  double cap_ = 0.0;
};

}  // namespace pdmp
