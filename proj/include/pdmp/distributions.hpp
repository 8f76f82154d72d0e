#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pdmp/quadrature.hpp"
#include "pdmp/random.hpp"

namespace pdmp {

struct Exponential {
  double rate;
};
struct Gamma {
  double shape;
  double scale;
};
struct Uniform {
  double lo;
  double hi;
};
struct Weibull {
  double shape;
  double scale;
};
struct Dirac {
  double value;
};
/// `shift + Exponential(rate)`.
struct ShiftedExponential {
  double shift;
  double rate;
};

using Law = std::variant<Exponential, Gamma, Uniform, Weibull, Dirac, ShiftedExponential>;

/// What a law is used for in the model. Each role adds its own constraints.
enum class Role {
  Intake,        // F, jump heights U_n
  InterArrival,  // G, inter-intake times
  Metabolic,     // H, elimination rates
  Initial,       // a coordinate of an initial law
};

std::string_view to_string(Role role);

/// A validated one-dimensional parametric law.
///
/// Immutable after construction; safe to share across threads.
class DistributionSpec {
 public:
  /// Throws InvalidSpecError if `law` is malformed or unsuitable for `role`.
  DistributionSpec(Law law, Role role);

  const Law& law() const noexcept { return law_; }
  Role role() const noexcept { return role_; }
  std::string family_name() const;
  /// e.g. "Uniform(0,1)".
  std::string describe() const;

  /// One draw, by inversion of a single uniform (point masses consume none).
  double sample(RandomStream& rng) const;

  bool has_density() const noexcept;
  /// Throws NoDensityError for point masses.
  double density(double x) const;
  double cdf(double x) const;
  double survival(double x) const;
  double quantile(double p) const;
  double mean() const;

  /// E[exp(u X)]; +inf outside the domain of finiteness.
  double laplace(double u) const;
  /// sup{u : laplace(u) < inf}, possibly +inf.
  double laplace_abscissa() const;

  double support_lo() const;
  double support_hi() const;
  /// Points where the density is not smooth (support ends, shift point).
  std::vector<double> density_breaks() const;

 private:
  Law law_;
  Role role_;
};

/// E[fn(X)] for X with law `spec`, by quadrature against the density
/// (point masses evaluate directly).
double expectation(const DistributionSpec& spec, const RealFunction& fn,
                   double abs_tol = kQuadratureTolerance);

/// Throws HypothesisError tagged `assumption` if `spec` has no density.
void require_density(const DistributionSpec& spec, const std::string& assumption);

}  // namespace pdmp
