#pragma once

#include "pdmp/distributions.hpp"

namespace pdmp {

/// Hazard rate of an inter-arrival law G, with G([0,x]) = 1 - exp(-int_0^x zeta).
///
/// Every admissible G has a non-decreasing hazard, so the profile is fully
/// described by the family parameters plus two landmarks:
///   positivity_point() = inf{t : zeta(t) > 0}
///   explosion_point()  = sup{t : zeta(t) < inf}
class HazardProfile {
 public:
  /// Throws InvalidSpecError unless `g` has role InterArrival.
  explicit HazardProfile(DistributionSpec g);

  const DistributionSpec& law() const noexcept { return law_; }

  /// zeta(t). Throws std::domain_error for t < 0 or t >= explosion_point().
  double hazard(double t) const;
  /// int_0^t zeta; +inf once t reaches the explosion point.
  double cumulative(double t) const;

  double positivity_point() const noexcept { return a_; }
  double explosion_point() const noexcept { return d_; }
  double inf_hazard() const noexcept { return inf_; }
  /// zeta(d-), +inf when the hazard is unbounded.
  double sup_hazard() const noexcept { return sup_; }
  bool is_constant() const noexcept { return inf_ == sup_; }

 private:
  DistributionSpec law_;
  double a_ = 0.0;
  double d_ = 0.0;
  double inf_ = 0.0;
  double sup_ = 0.0;
};

/// Residual waiting time from age `age`: the s solving
///   int_0^s zeta(age + u) du = target.
/// Closed form for every family except Gamma, which is bisected to 1e-10.
/// Feeding target ~ Exp(1) yields an exact draw of the next event time.
double integrated_hazard_inverse(const HazardProfile& profile, double age, double target);

/// Generic bisection path of integrated_hazard_inverse (exposed for testing).
double integrated_hazard_inverse_bisect(const HazardProfile& profile, double age, double target,
                                        double tol = 1e-10);

}  // namespace pdmp
