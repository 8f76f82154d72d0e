#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pdmp/distributions.hpp"

namespace pdmp {

/// Renewal data of the Wasserstein contraction: the sub-probability kernel
/// j(x) = E[exp(-p Theta x)] g(x) and the forcing z(t) = E[exp(-p Theta t)] P(dT > t).
class RenewalKernel {
 public:
  /// Throws InvalidSpecError on wrong roles or order < 1.
  RenewalKernel(DistributionSpec interarrival, DistributionSpec metabolic, double order);

  const DistributionSpec& interarrival() const noexcept { return interarrival_; }
  const DistributionSpec& metabolic() const noexcept { return metabolic_; }
  double order() const noexcept { return order_; }

  /// E[exp(-p Theta s)].
  double rate_transform(double s) const;
  double density(double x) const;
  double forcing(double t) const;
  /// J([0, inf)) = psi_J(0) < 1.
  double mass() const { return laplace(0.0); }
  /// psi_J(u) = int exp(u x) j(x) dx = E[psi_G(u - p Theta)]; +inf when divergent.
  double laplace(double u) const;

 private:
  DistributionSpec interarrival_;
  DistributionSpec metabolic_;
  double order_;
};

struct LaplaceRoot {
  double value = 0.0;
  /// psi_J < 1 up to the cap: every positive rate is admissible and `value`
  /// is the cap itself.
  bool capped = false;
};

/// w = sup{u : psi_J(u) < 1}, bracketed by bisection to `tol`.
LaplaceRoot find_w(const RenewalKernel& kernel, double cap = 1e3, double tol = 1e-10);

/// Grid solution of the tilted equation Z' = z' + J' * Z', where primes mark
/// multiplication by exp(w_shift t).
class RenewalSolution {
 public:
  RenewalSolution(double step, double w_shift, std::vector<double> tilted);

  double step() const noexcept { return step_; }
  double w_shift() const noexcept { return w_shift_; }
  double horizon() const noexcept { return step_ * static_cast<double>(tilted_.size() - 1); }
  const std::vector<double>& tilted() const noexcept { return tilted_; }
  /// max over the grid of exp(w_shift t) Z(t).
  double constant() const;
  /// Z(t) by linear interpolation of Z'; throws std::out_of_range past the horizon.
  double operator()(double t) const;

 private:
  double step_;
  double w_shift_;
  std::vector<double> tilted_;
};

/// Forward substitution of Z_n = z_n + h (j_0 Z_n / 2 + sum_{k=1}^{n-1} j_k Z_{n-k} + j_n Z_0 / 2)
/// for sampled kernel j and forcing z on a uniform grid of step h.
std::vector<double> solve_renewal_grid(std::span<const double> kernel,
                                       std::span<const double> forcing, double step);

/// Trapezoid forward substitution on [0, horizon]. Throws NonDefectiveError
/// when psi_J(w_shift) >= 1 unless `directly_integrable` vouches for the
/// critical case.
RenewalSolution solve_renewal(const RenewalKernel& kernel, double w_shift, double step,
                              double horizon, bool directly_integrable = false);

/// max over the grid of |Z' - z' - J' * Z'| for the discretised convolution.
double renewal_residual(const RenewalKernel& kernel, const RenewalSolution& sol);

/// lambda (1 - E[exp(-p Theta dT)]) for dT ~ Exp(lambda): the decay rate of Z
/// when the inter-intake hazard is constant.
double exponential_case_decay(double lambda, const DistributionSpec& metabolic, double order);

/// 1 - E[exp(-Theta dT)].
double contraction_deficit(const DistributionSpec& interarrival, const DistributionSpec& metabolic);

}  // namespace pdmp
