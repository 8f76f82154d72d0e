#include "pdmp/age_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pdmp/errors.hpp"

namespace pdmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string case_assumption(AgeCase c) { return "age-case-" + std::string(to_string(c)); }

// log E[exp(l G)] for G geometric on {1, 2, ...} with parameter p.
double log_mgf_geometric(double p, double l) {
  if (p >= 1.0) return l;
  const double tail = (1.0 - p) * std::exp(l);
  if (tail >= 1.0) return kInf;
  return std::log(p) + l - std::log1p(-tail);
}

double log_mgf_exponential(double rate, double l) {
  if (l >= rate) return kInf;
  return std::log(rate / (rate - l));
}

// -log(1 - p) / scale, infinite for p = 1.
double geometric_rate(double p, double scale) {
  if (p >= 1.0) return kInf;
  return -std::log1p(-p) / scale;
}

}  // namespace

std::string_view to_string(AgeCase c) {
  switch (c) {
    case AgeCase::PositiveFloor: return "floor";
    case AgeCase::FiniteSupport: return "i";
    case AgeCase::BoundedHazard: return "ii";
    case AgeCase::UnboundedHazard: return "iii";
  }
  return "?";
}

AgeCase parse_age_case(std::string_view s) {
  if (s == "floor") return AgeCase::PositiveFloor;
  if (s == "i") return AgeCase::FiniteSupport;
  if (s == "ii") return AgeCase::BoundedHazard;
  if (s == "iii") return AgeCase::UnboundedHazard;
  throw InvalidSpecError("unknown age case '" + std::string(s) + "' (floor, i, ii, iii)");
}

AgeCase classify(const HazardProfile& profile) {
  if (profile.inf_hazard() > 0.0) return AgeCase::PositiveFloor;
  const double a = profile.positivity_point();
  const double d = profile.explosion_point();
  if (std::isfinite(d)) {
    if (!(d > 1.5 * a)) {
      throw HypothesisError("age-case-i", "finite support needs d > 3a/2, got a = " +
                                              std::to_string(a) + ", d = " + std::to_string(d));
    }
    return AgeCase::FiniteSupport;
  }
  return std::isfinite(profile.sup_hazard()) ? AgeCase::BoundedHazard : AgeCase::UnboundedHazard;
}

AgeBoundParams age_bound_params(AgeCase kase, const HazardProfile& profile,
                                const AgeCouplingParams& tuning) {
  AgeBoundParams out;
  out.kase = kase;
  out.tuning = tuning;
  out.a = profile.positivity_point();
  out.d = profile.explosion_point();
  const double a = out.a;
  const double d = out.d;

  if (kase == AgeCase::PositiveFloor) {
    if (!(profile.inf_hazard() > 0.0)) {
      throw HypothesisError("age-floor", "exponential domination needs zeta(0) > 0");
    }
    out.exp_rate = profile.inf_hazard();
    return out;
  }

  const std::string tag = case_assumption(kase);
  if (!(profile.inf_hazard() == 0.0)) {
    throw HypothesisError(tag, "needs inf zeta = 0; use the floor case when zeta(0) > 0");
  }
  switch (kase) {
    case AgeCase::FiniteSupport:
      if (!std::isfinite(d) || !(d > 1.5 * a)) {
        throw HypothesisError(tag, "needs d < inf and d > 3a/2");
      }
      break;
    case AgeCase::BoundedHazard:
      if (std::isfinite(d) || !std::isfinite(profile.sup_hazard())) {
        throw HypothesisError(tag, "needs d = inf and sup zeta < inf");
      }
      break;
    case AgeCase::UnboundedHazard:
      if (std::isfinite(d) || std::isfinite(profile.sup_hazard())) {
        throw HypothesisError(tag, "needs d = inf and sup zeta = inf");
      }
      break;
    case AgeCase::PositiveFloor: break;
  }

  const double eps = tuning.epsilon;
  const double b = tuning.b;
  const double c = tuning.c;
  if (!(eps > 0.5 * a) || !(eps + 0.5 * a < d)) {
    throw HypothesisError("age-epsilon", "needs a/2 < epsilon < d - a/2");
  }
  if (!(a < b && b < c && c < d)) throw HypothesisError("age-window", "needs a < b < c < d");
  if (!(c > b + eps)) throw HypothesisError("age-window", "needs c > b + epsilon");
  const double zb = profile.hazard(b);
  if (!(zb > 0.0)) throw HypothesisError("age-window", "needs zeta(b) > 0");

  const double window = std::exp(-b * profile.hazard(b + eps)) *
                        -std::expm1(-(c - b - eps) * zb);
  const double first = -std::expm1(-(eps - 0.5 * a) * profile.hazard(eps + 0.5 * a));
  switch (kase) {
    case AgeCase::FiniteSupport:
      out.p1 = first;
      out.p2 = window;
      break;
    case AgeCase::BoundedHazard:
      out.p1 = std::exp(-b * profile.sup_hazard());
      out.p2 = zb / profile.sup_hazard();
      out.exp_rate = zb;
      break;
    case AgeCase::UnboundedHazard: {
      const double zc = profile.hazard(c);
      out.p1 = first;
      out.p2 = zb / zc * window;
      out.exp_rate = zc;
      break;
    }
    case AgeCase::PositiveFloor: break;
  }
  if (!(out.p1 > 0.0 && out.p2 > 0.0)) {
    throw HypothesisError(tag, "coalescence probabilities vanish for this tuning");
  }
  return out;
}

std::uint64_t sample_geometric(double p, RandomStream& rng) {
  if (p >= 1.0) return 1;
  const double k = std::floor(std::log(rng.uniform_open()) / std::log1p(-p));
  return 1 + static_cast<std::uint64_t>(k);
}

double sample_age_bound(const AgeBoundParams& params, RandomStream& rng) {
  const double eps = params.tuning.epsilon;
  const double b = params.tuning.b;
  const double c = params.tuning.c;
  switch (params.kase) {
    case AgeCase::PositiveFloor:
      return rng.exp1() / params.exp_rate;
    case AgeCase::FiniteSupport: {
      const std::uint64_t h = sample_geometric(params.p2, rng);
      double v = c + (2.0 * static_cast<double>(h) - 1.0) * eps;
      for (std::uint64_t i = 0; i < h; ++i) {
        v += (params.d - eps) * static_cast<double>(sample_geometric(params.p1, rng));
      }
      return v;
    }
    case AgeCase::BoundedHazard: {
      const std::uint64_t h = sample_geometric(params.p2, rng);
      double v = 0.0;
      for (std::uint64_t i = 0; i < h; ++i) {
        const std::uint64_t g = sample_geometric(params.p1, rng);
        for (std::uint64_t j = 0; j < g; ++j) v += b + rng.exp1() / params.exp_rate;
      }
      return v;
    }
    case AgeCase::UnboundedHazard: {
      const std::uint64_t h = sample_geometric(params.p2, rng);
      double v = c - eps;
      for (std::uint64_t i = 0; i < h; ++i) {
        v += 2.0 * eps;
        const std::uint64_t g = sample_geometric(params.p1, rng);
        for (std::uint64_t j = 0; j < g; ++j) v += c - eps + rng.exp1() / params.exp_rate;
      }
      return v;
    }
  }
  throw std::logic_error("unreachable age case");
}

double ExponentialTail::operator()(double t) const { return constant * std::exp(-rate * t); }

AgeTailBound::AgeTailBound(const AgeBoundParams& params, std::size_t draws, std::uint64_t seed)
    : params_(params) {
  const double eps = params.tuning.epsilon;
  const double q = params.p1 * params.p2;
  switch (params.kase) {
    case AgeCase::PositiveFloor:
      cap_ = params.exp_rate;
      envelope_ = {1.0, cap_};
      return;
    case AgeCase::FiniteSupport:
      cap_ = 0.5 * std::min(geometric_rate(params.p2, 2.0 * eps),
                            geometric_rate(q, params.d - eps));
      break;
    case AgeCase::BoundedHazard:
      cap_ = 0.5 * std::min(geometric_rate(q, params.tuning.b), q * params.exp_rate);
      break;
    case AgeCase::UnboundedHazard:
      cap_ = std::min({geometric_rate(params.p2, 2.0 * eps),
                       geometric_rate(q, params.tuning.c - eps), q * params.exp_rate}) /
             3.0;
      break;
  }
  if (draws < 100) throw std::invalid_argument("age tail bound needs at least 100 draws");

  RandomStream rng(seed);
  sample_.resize(draws);
  for (double& v : sample_) v = sample_age_bound(params_, rng);
  std::sort(sample_.begin(), sample_.end());

  // Log-linear fit of the empirical tail beyond the median, up to the point
  // where only a handful of draws remain.
  const std::size_t n = sample_.size();
  const std::size_t keep = std::max<std::size_t>(10, n / 10000);
  const double t_max = sample_[n - keep];
  const double t_mid = sample_[n / 2];
  constexpr int kGrid = 200;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (int k = 0; k <= kGrid; ++k) {
    const double t = t_max * k / kGrid;
    const double s = survival(t);
    if (t < t_mid || s <= 0.0) continue;
    const double y = std::log(s);
    sx += t, sy += y, sxx += t * t, sxy += t * y, ++m;
  }
  double rate = cap_;
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    const double slope = denom > 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    if (slope < 0.0) rate = std::min(rate, -slope);
  }
  double constant = 1.0;
  for (int k = 0; k <= kGrid; ++k) {
    const double t = t_max * k / kGrid;
    constant = std::max(constant, survival(t) * std::exp(rate * t));
  }
  envelope_ = {constant, rate};
}

double AgeTailBound::survival(double t) const {
  if (t <= 0.0) return 1.0;
  if (params_.kase == AgeCase::PositiveFloor) return std::exp(-params_.exp_rate * t);
  const auto above = sample_.end() - std::upper_bound(sample_.begin(), sample_.end(), t);
  return static_cast<double>(above) / static_cast<double>(sample_.size());
}

double AgeTailBound::log_moment_bound(double s) const {
  const double eps = params_.tuning.epsilon;
  const double b = params_.tuning.b;
  const double c = params_.tuning.c;
  const double q = params_.p1 * params_.p2;
  switch (params_.kase) {
    case AgeCase::PositiveFloor:
      return log_mgf_exponential(params_.exp_rate, s);
    case AgeCase::FiniteSupport:
      return s * (c - eps) + 0.5 * (log_mgf_geometric(params_.p2, 4.0 * s * eps) +
                                    log_mgf_geometric(q, 2.0 * s * (params_.d - eps)));
    case AgeCase::BoundedHazard:
      return 0.5 * (log_mgf_geometric(q, 2.0 * s * b) +
                    log_mgf_exponential(q * params_.exp_rate, 2.0 * s));
    case AgeCase::UnboundedHazard:
      return s * (c - eps) + (log_mgf_geometric(params_.p2, 6.0 * s * eps) +
                              log_mgf_geometric(q, 3.0 * s * (c - eps)) +
                              log_mgf_exponential(q * params_.exp_rate, 3.0 * s)) /
                                 3.0;
  }
  throw std::logic_error("unreachable age case");
}

double AgeTailBound::analytic_tail(double t) const {
  double best = 0.0;  // log of the bound, s -> 0 gives 1
  constexpr int kSteps = 400;
  for (int k = 1; k < kSteps; ++k) {
    const double s = cap_ * k / kSteps;
    best = std::min(best, log_moment_bound(s) - s * t);
  }
  return std::exp(best);
}

}  // namespace pdmp
