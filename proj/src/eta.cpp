#include "pdmp/eta.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pdmp/errors.hpp"
#include "pdmp/quadrature.hpp"

namespace pdmp {

double eta(double eps, const DistributionSpec& intake) {
  if (!intake.has_density()) {
    throw NoDensityError("eta needs an intake density, got " + intake.describe());
  }
  const double shift = std::abs(eps);
  if (shift == 0.0) return 0.0;
  std::vector<double> breaks;
  for (double b : intake.density_breaks()) {
    breaks.push_back(b);
    breaks.push_back(b + shift);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  auto gap = [&](double u) { return std::abs(intake.density(u) - intake.density(u - shift)); };
  const double lo = intake.support_lo();
  double total = 0.0;
  if (std::isfinite(intake.support_hi())) {
    breaks.insert(breaks.begin(), lo);
    breaks.push_back(intake.support_hi() + shift);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    total = integrate_pieces(gap, breaks, 1e-12);
  } else {
    std::vector<double> interior;
    for (double b : breaks) {
      if (b > lo) interior.push_back(b);
    }
    total = integrate_to_infinity(gap, lo, interior, 1e-12, std::max(shift, intake.mean()));
  }
  return std::clamp(0.5 * total, 0.0, 1.0);
}

double tail_quantile_bound(double eps, const HolderData& holder, const TailData& tail) {
  const double p = tail.exponent;
  return std::pow(tail.constant / ((p - 1.0) * std::pow(eps, holder.exponent)), 1.0 / (p - 1.0));
}

EtaEnvelope eta_envelope(double eps_max, const DistributionSpec& intake,
                         const std::optional<HolderData>& holder,
                         const std::optional<TailData>& tail) {
  require_density(intake, "H4a");
  if (!(eps_max > 0.0)) throw InvalidSpecError("eta envelope needs eps_max > 0");
  if (holder) {
    const double k = holder->constant;
    const double h = holder->exponent;
    if (!(k > 0.0) || !(h > 0.0 && h <= 1.0)) {
      throw HypothesisError("H4a", "Holder data needs K > 0 and 0 < h <= 1");
    }
    if (std::isfinite(holder->support_bound)) {
      return {k * (holder->support_bound + 1.0) / 2.0, h, "eta-envelope-holder-compact"};
    }
    if (!tail) {
      throw HypothesisError("H4b", "unbounded support needs polynomial tail data");
    }
    const double p = tail->exponent;
    if (!(tail->constant > 0.0) || !(p > 2.0)) {
      throw HypothesisError("H4b", "tail data needs C' > 0 and p > 2 for a positive exponent");
    }
    const double c = k * (std::pow(tail->constant / (p - 1.0), 1.0 / (p - 1.0)) + 1.0) / 2.0 + 1.0;
    return {c, h - h / (p - 1.0), "eta-envelope-holder-tail"};
  }

  constexpr int kGrid = 1000;
  std::vector<double> xs(kGrid), running(kGrid);
  double best = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    xs[i] = eps_max * (i + 1) / kGrid;
    best = std::max(best, eta(xs[i], intake));
    running[i] = best;
  }
  // Log-log slope on the lower half of the grid, where the small-eps
  // behaviour shows.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (int i = 0; i < kGrid / 2; ++i) {
    if (running[i] <= 0.0) continue;
    const double x = std::log(xs[i]);
    const double y = std::log(running[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++m;
  }
  double v = 1.0;
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) v = std::clamp((m * sxy - sx * sy) / denom, 1e-3, 1.0);
  }
  double c = 0.0;
  for (int i = 0; i < kGrid; ++i) c = std::max(c, running[i] / std::pow(xs[i], v));
  return {c, v, "eta-envelope-numeric-fit"};
}

}  // namespace pdmp
