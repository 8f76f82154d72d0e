#include "pdmp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "pdmp/errors.hpp"

namespace pdmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

void check(bool ok, const std::string& what) {
  if (!ok) throw InvalidSpecError(what);
}

void validate_params(const Law& law) {
  std::visit(overloaded{
                 [](const Exponential& d) { check(positive(d.rate), "Exponential rate must be > 0"); },
                 [](const Gamma& d) {
                   check(positive(d.shape) && positive(d.scale), "Gamma shape and scale must be > 0");
                 },
                 [](const Uniform& d) {
                   check(std::isfinite(d.lo) && std::isfinite(d.hi) && d.lo < d.hi,
                         "Uniform requires finite lo < hi");
                 },
                 [](const Weibull& d) {
                   check(positive(d.shape) && positive(d.scale), "Weibull shape and scale must be > 0");
                 },
                 [](const Dirac& d) { check(std::isfinite(d.value) && d.value >= 0.0, "Dirac value must be >= 0"); },
                 [](const ShiftedExponential& d) {
                   check(std::isfinite(d.shift) && d.shift >= 0.0 && positive(d.rate),
                         "ShiftedExponential needs shift >= 0 and rate > 0");
                 },
             },
             law);
}

void validate_role(const Law& law, Role role) {
  const bool nonnegative_support = std::visit(
      overloaded{[](const Uniform& d) { return d.lo >= 0.0; }, [](const auto&) { return true; }}, law);
  check(nonnegative_support, "support must lie in [0, inf)");
  switch (role) {
    case Role::InterArrival:
      check(!std::holds_alternative<Dirac>(law), "inter-arrival law needs a hazard rate (no point mass)");
      if (const auto* g = std::get_if<Gamma>(&law)) {
        check(g->shape >= 1.0, "inter-arrival Gamma needs shape >= 1 for a non-decreasing hazard");
      }
      if (const auto* w = std::get_if<Weibull>(&law)) {
        check(w->shape >= 1.0, "inter-arrival Weibull needs shape >= 1 for a non-decreasing hazard");
      }
      break;
    case Role::Metabolic:
      if (const auto* d = std::get_if<Dirac>(&law)) {
        check(d->value > 0.0, "metabolic law must put no mass on 0");
      }
      break;
    case Role::Intake:
    case Role::Initial:
      break;
  }
}

double weibull_log_density(const Weibull& d, double x) {
  const double z = x / d.scale;
  return std::log(d.shape / d.scale) + (d.shape - 1.0) * std::log(z) - std::pow(z, d.shape);
}

// Shape < 1 makes the density blow up at the lower support end.
double singular_shape(const Law& law) {
  if (const auto* g = std::get_if<Gamma>(&law); g && g->shape < 1.0) return g->shape;
  if (const auto* w = std::get_if<Weibull>(&law); w && w->shape < 1.0) return w->shape;
  return 0.0;
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Intake:
      return "intake";
    case Role::InterArrival:
      return "interarrival";
    case Role::Metabolic:
      return "metabolic";
    case Role::Initial:
      return "initial";
  }
  return "unknown";
}

DistributionSpec::DistributionSpec(Law law, Role role) : law_(law), role_(role) {
  validate_params(law_);
  validate_role(law_, role_);
}

std::string DistributionSpec::family_name() const {
  return std::visit(overloaded{
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const Gamma&) { return std::string("gamma"); },
                        [](const Uniform&) { return std::string("uniform"); },
                        [](const Weibull&) { return std::string("weibull"); },
                        [](const Dirac&) { return std::string("dirac"); },
                        [](const ShiftedExponential&) { return std::string("shifted_exponential"); },
                    },
                    law_);
}

std::string DistributionSpec::describe() const {
  std::ostringstream os;
  os.precision(10);
  std::visit(overloaded{
                 [&](const Exponential& d) { os << "Exponential(" << d.rate << ")"; },
                 [&](const Gamma& d) { os << "Gamma(" << d.shape << "," << d.scale << ")"; },
                 [&](const Uniform& d) { os << "Uniform(" << d.lo << "," << d.hi << ")"; },
                 [&](const Weibull& d) { os << "Weibull(" << d.shape << "," << d.scale << ")"; },
                 [&](const Dirac& d) { os << "Dirac(" << d.value << ")"; },
                 [&](const ShiftedExponential& d) {
                   os << "ShiftedExponential(" << d.shift << "," << d.rate << ")";
                 },
             },
             law_);
  return os.str();
}

double DistributionSpec::sample(RandomStream& rng) const {
  if (const auto* d = std::get_if<Dirac>(&law_)) return d->value;
  return quantile(rng.uniform_open());
}

bool DistributionSpec::has_density() const noexcept { return !std::holds_alternative<Dirac>(law_); }

double DistributionSpec::density(double x) const {
  return std::visit(
      overloaded{
          [&](const Exponential& d) { return x < 0.0 ? 0.0 : d.rate * std::exp(-d.rate * x); },
          [&](const Gamma& d) {
            if (x < 0.0) return 0.0;
            if (x == 0.0) return d.shape < 1.0 ? kInf : (d.shape == 1.0 ? 1.0 / d.scale : 0.0);
            return boost::math::gamma_p_derivative(d.shape, x / d.scale) / d.scale;
          },
          [&](const Uniform& d) { return (x >= d.lo && x < d.hi) ? 1.0 / (d.hi - d.lo) : 0.0; },
          [&](const Weibull& d) {
            if (x < 0.0) return 0.0;
            if (x == 0.0) return d.shape < 1.0 ? kInf : (d.shape == 1.0 ? 1.0 / d.scale : 0.0);
            return std::exp(weibull_log_density(d, x));
          },
          [&](const Dirac& d) -> double {
            throw NoDensityError("Dirac(" + std::to_string(d.value) + ") has no density");
          },
          [&](const ShiftedExponential& d) {
            return x < d.shift ? 0.0 : d.rate * std::exp(-d.rate * (x - d.shift));
          },
      },
      law_);
}

double DistributionSpec::cdf(double x) const { return 1.0 - survival(x); }

double DistributionSpec::survival(double x) const {
  return std::visit(overloaded{
                        [&](const Exponential& d) { return x <= 0.0 ? 1.0 : std::exp(-d.rate * x); },
                        [&](const Gamma& d) {
                          return x <= 0.0 ? 1.0 : boost::math::gamma_q(d.shape, x / d.scale);
                        },
                        [&](const Uniform& d) {
                          if (x <= d.lo) return 1.0;
                          if (x >= d.hi) return 0.0;
                          return (d.hi - x) / (d.hi - d.lo);
                        },
                        [&](const Weibull& d) {
                          return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / d.scale, d.shape));
                        },
                        [&](const Dirac& d) { return x < d.value ? 1.0 : 0.0; },
                        [&](const ShiftedExponential& d) {
                          return x <= d.shift ? 1.0 : std::exp(-d.rate * (x - d.shift));
                        },
                    },
                    law_);
}

double DistributionSpec::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile level outside [0,1]");
  return std::visit(
      overloaded{
          [&](const Exponential& d) { return -std::log1p(-p) / d.rate; },
          [&](const Gamma& d) {
            if (p == 1.0) return kInf;
            return boost::math::gamma_p_inv(d.shape, p) * d.scale;
          },
          [&](const Uniform& d) { return d.lo + p * (d.hi - d.lo); },
          [&](const Weibull& d) { return d.scale * std::pow(-std::log1p(-p), 1.0 / d.shape); },
          [&](const Dirac& d) { return d.value; },
          [&](const ShiftedExponential& d) { return d.shift - std::log1p(-p) / d.rate; },
      },
      law_);
}

double DistributionSpec::mean() const {
  return std::visit(overloaded{
                        [](const Exponential& d) { return 1.0 / d.rate; },
                        [](const Gamma& d) { return d.shape * d.scale; },
                        [](const Uniform& d) { return 0.5 * (d.lo + d.hi); },
                        [](const Weibull& d) { return d.scale * std::tgamma(1.0 + 1.0 / d.shape); },
                        [](const Dirac& d) { return d.value; },
                        [](const ShiftedExponential& d) { return d.shift + 1.0 / d.rate; },
                    },
                    law_);
}

double DistributionSpec::laplace(double u) const {
  if (u == 0.0) return 1.0;
  return std::visit(
      overloaded{
          [&](const Exponential& d) { return u < d.rate ? d.rate / (d.rate - u) : kInf; },
          [&](const Gamma& d) { return u * d.scale < 1.0 ? std::pow(1.0 - d.scale * u, -d.shape) : kInf; },
          [&](const Uniform& d) {
            const double width = d.hi - d.lo;
            return std::exp(u * d.lo) * std::expm1(u * width) / (u * width);
          },
          [&](const Weibull& d) {
            if (d.shape == 1.0) return u * d.scale < 1.0 ? 1.0 / (1.0 - d.scale * u) : kInf;
            if (d.shape < 1.0) {
              if (u > 0.0) return kInf;
              // X = scale * Y^(1/shape) with Y ~ Exp(1) keeps the integrand bounded.
              const double inv_shape = 1.0 / d.shape;
              return integrate_to_infinity(
                  [&](double y) { return std::exp(u * d.scale * std::pow(y, inv_shape) - y); }, 0.0,
                  {}, 1e-12);
            }
            const double width = std::max(d.scale, 1e-3);
            return integrate_to_infinity(
                [&](double x) {
                  return x <= 0.0 ? 0.0 : std::exp(u * x + weibull_log_density(d, x));
                },
                0.0, {}, 1e-12, width);
          },
          [&](const Dirac& d) { return std::exp(u * d.value); },
          [&](const ShiftedExponential& d) {
            return u < d.rate ? std::exp(u * d.shift) * d.rate / (d.rate - u) : kInf;
          },
      },
      law_);
}

double DistributionSpec::laplace_abscissa() const {
  return std::visit(overloaded{
                        [](const Exponential& d) { return d.rate; },
                        [](const Gamma& d) { return 1.0 / d.scale; },
                        [](const Uniform&) { return kInf; },
                        [](const Weibull& d) {
                          if (d.shape > 1.0) return kInf;
                          return d.shape == 1.0 ? 1.0 / d.scale : 0.0;
                        },
                        [](const Dirac&) { return kInf; },
                        [](const ShiftedExponential& d) { return d.rate; },
                    },
                    law_);
}

double DistributionSpec::support_lo() const {
  return std::visit(overloaded{
                        [](const Uniform& d) { return d.lo; },
                        [](const Dirac& d) { return d.value; },
                        [](const ShiftedExponential& d) { return d.shift; },
                        [](const auto&) { return 0.0; },
                    },
                    law_);
}

double DistributionSpec::support_hi() const {
  return std::visit(overloaded{
                        [](const Uniform& d) { return d.hi; },
                        [](const Dirac& d) { return d.value; },
                        [](const auto&) { return kInf; },
                    },
                    law_);
}

std::vector<double> DistributionSpec::density_breaks() const {
  std::vector<double> breaks{support_lo()};
  if (std::isfinite(support_hi()) && support_hi() > support_lo()) breaks.push_back(support_hi());
  return breaks;
}

double expectation(const DistributionSpec& spec, const RealFunction& fn, double abs_tol) {
  if (const auto* d = std::get_if<Dirac>(&spec.law())) return fn(d->value);
  const double lo = spec.support_lo();
  const double hi = spec.support_hi();
  auto weighted = [&](double x) {
    const double fx = spec.density(x);
    return fx == 0.0 ? 0.0 : fn(x) * fx;
  };
  if (std::isfinite(hi)) {
    const double breaks[] = {lo, hi};
    return integrate_pieces(weighted, breaks, abs_tol);
  }
  const double scale = std::max(spec.mean() - lo, 1e-3);
  if (const double shape = singular_shape(spec.law()); shape > 0.0) {
    // Substitute x = lo + s^m on [lo, lo + scale] so the x^(shape-1) spike
    // becomes a bounded integrand.
    const double m = std::ceil(1.0 / shape);
    const double s_max = std::pow(scale, 1.0 / m);
    auto near = [&](double s) {
      if (s <= 0.0) return 0.0;
      const double x = lo + std::pow(s, m);
      return weighted(x) * m * std::pow(s, m - 1.0);
    };
    return adaptive_simpson(near, 0.0, s_max, abs_tol / 2.0) +
           integrate_to_infinity(weighted, lo + scale, {}, abs_tol / 2.0, scale);
  }
  return integrate_to_infinity(weighted, lo, {}, abs_tol, scale);
}

void require_density(const DistributionSpec& spec, const std::string& assumption) {
  if (!spec.has_density()) {
    throw HypothesisError(assumption, spec.describe() + " has no Lebesgue density");
  }
}

}  // namespace pdmp
