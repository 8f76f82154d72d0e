#pragma once

#include <limits>
#include <optional>
#include <string>

#include "pdmp/distributions.hpp"

namespace pdmp {

/// eta(eps) = 1/2 int |f(u) - f(u - eps)| du: the mass that a shift by eps
/// moves outside the overlap of the intake density with itself.
/// Throws NoDensityError for point masses.
double eta(double eps, const DistributionSpec& intake);

/// Holder regularity |f(x) - f(y)| <= K |x - y|^h of the intake density,
/// with the support inside [0, support_bound].
struct HolderData {
  double constant = 1.0;  // K
  double exponent = 1.0;  // h
  double support_bound = std::numeric_limits<double>::infinity();  // M
};

/// Polynomial tail P(U > x) <= C' x^{-p}, p > 1.
struct TailData {
  double constant = 1.0;  // C'
  double exponent = 2.0;  // p
};

/// sup_{x <= eps} eta(x) <= constant * eps^exponent on [0, eps_max].
struct EtaEnvelope {
  double constant = 1.0;
  double exponent = 1.0;
  std::string provenance;
};

/// Quantile bound D_eps <= (C' / ((p - 1) eps^h))^{1/(p-1)}.
double tail_quantile_bound(double eps, const HolderData& holder, const TailData& tail);

/// Closed-form envelope from Holder data (compact support, or unbounded
/// support with tail data); otherwise a fit that dominates the running max of
/// eta on 1000 grid points of (0, eps_max].
EtaEnvelope eta_envelope(double eps_max, const DistributionSpec& intake,
                         const std::optional<HolderData>& holder = std::nullopt,
                         const std::optional<TailData>& tail = std::nullopt);

}  // namespace pdmp
