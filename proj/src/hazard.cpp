#include "pdmp/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "pdmp/errors.hpp"
#include "pdmp/roots.hpp"

namespace pdmp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

HazardProfile::HazardProfile(DistributionSpec g) : law_(std::move(g)) {
  if (law_.role() != Role::InterArrival) {
    throw InvalidSpecError("hazard profile needs an inter-arrival law, got role " +
                           std::string(to_string(law_.role())));
  }
  const Law& law = law_.law();
  if (const auto* e = std::get_if<Exponential>(&law)) {
    a_ = 0.0, d_ = kInf, inf_ = sup_ = e->rate;
  } else if (const auto* g = std::get_if<Gamma>(&law)) {
    a_ = 0.0, d_ = kInf, sup_ = 1.0 / g->scale;
    inf_ = g->shape == 1.0 ? sup_ : 0.0;
  } else if (const auto* u = std::get_if<Uniform>(&law)) {
    a_ = u->lo, d_ = u->hi, sup_ = kInf;
    inf_ = u->lo > 0.0 ? 0.0 : 1.0 / u->hi;
  } else if (const auto* w = std::get_if<Weibull>(&law)) {
    a_ = 0.0, d_ = kInf;
    if (w->shape == 1.0) {
      inf_ = sup_ = 1.0 / w->scale;
    } else {
      inf_ = 0.0, sup_ = kInf;
    }
  } else if (const auto* s = std::get_if<ShiftedExponential>(&law)) {
    a_ = s->shift, d_ = kInf, sup_ = s->rate;
    inf_ = s->shift > 0.0 ? 0.0 : s->rate;
  }
}

double HazardProfile::hazard(double t) const {
  if (!(t >= 0.0) || t >= d_) {
    throw std::domain_error("hazard evaluated outside [0, d): t = " + std::to_string(t));
  }
  const Law& law = law_.law();
  if (const auto* e = std::get_if<Exponential>(&law)) return e->rate;
  if (const auto* g = std::get_if<Gamma>(&law)) {
    if (g->shape == 1.0) return 1.0 / g->scale;
    if (t == 0.0) return 0.0;
    const double x = t / g->scale;
    const double q = boost::math::gamma_q(g->shape, x);
    if (q < 1e-300) return 1.0 / g->scale;
    return boost::math::gamma_p_derivative(g->shape, x) / (g->scale * q);
  }
  if (const auto* u = std::get_if<Uniform>(&law)) return t < u->lo ? 0.0 : 1.0 / (u->hi - t);
  if (const auto* w = std::get_if<Weibull>(&law)) {
    return w->shape / w->scale * std::pow(t / w->scale, w->shape - 1.0);
  }
  if (const auto* s = std::get_if<ShiftedExponential>(&law)) return t < s->shift ? 0.0 : s->rate;
  throw std::logic_error("unreachable hazard family");
}

double HazardProfile::cumulative(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= d_) return kInf;
  const Law& law = law_.law();
  if (const auto* e = std::get_if<Exponential>(&law)) return e->rate * t;
  if (const auto* g = std::get_if<Gamma>(&law)) {
    return -std::log(boost::math::gamma_q(g->shape, t / g->scale));
  }
  if (const auto* u = std::get_if<Uniform>(&law)) {
    return t <= u->lo ? 0.0 : -std::log((u->hi - t) / (u->hi - u->lo));
  }
  if (const auto* w = std::get_if<Weibull>(&law)) return std::pow(t / w->scale, w->shape);
  if (const auto* s = std::get_if<ShiftedExponential>(&law)) {
    return t <= s->shift ? 0.0 : s->rate * (t - s->shift);
  }
  throw std::logic_error("unreachable hazard family");
}

double integrated_hazard_inverse_bisect(const HazardProfile& profile, double age, double target,
                                        double tol) {
  const double base = profile.cumulative(age);
  const double goal = base + target;
  auto below = [&](double s) { return profile.cumulative(age + s) < goal; };
  double hi = std::max(profile.law().mean(), 1e-6);
  for (int i = 0; i < 2000 && below(hi); ++i) hi *= 2.0;
  if (below(hi)) throw std::logic_error("integrated hazard does not reach the target");
  return bisect_crossing(below, 0.0, hi, tol);
}

double integrated_hazard_inverse(const HazardProfile& profile, double age, double target) {
  if (!(age >= 0.0) || age >= profile.explosion_point()) {
    throw std::domain_error("age outside [0, d)");
  }
  if (!(target > 0.0)) throw std::domain_error("integrated hazard target must be > 0");
  const Law& law = profile.law().law();
  if (const auto* e = std::get_if<Exponential>(&law)) return target / e->rate;
  if (const auto* u = std::get_if<Uniform>(&law)) {
    const double total = profile.cumulative(age) + target;
    return std::max(0.0, u->hi - (u->hi - u->lo) * std::exp(-total) - age);
  }
  if (const auto* w = std::get_if<Weibull>(&law)) {
    const double z = std::pow(age / w->scale, w->shape) + target;
    return std::max(0.0, w->scale * std::pow(z, 1.0 / w->shape) - age);
  }
  if (const auto* s = std::get_if<ShiftedExponential>(&law)) {
    return std::max(age, s->shift) + target / s->rate - age;
  }
  return integrated_hazard_inverse_bisect(profile, age, target);
}

}  // namespace pdmp
