#include "pdmp/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pdmp/errors.hpp"
#include "pdmp/roots.hpp"

namespace pdmp {

RenewalKernel::RenewalKernel(DistributionSpec interarrival, DistributionSpec metabolic,
                             double order)
    : interarrival_(std::move(interarrival)), metabolic_(std::move(metabolic)), order_(order) {
  if (interarrival_.role() != Role::InterArrival) {
    throw InvalidSpecError("renewal kernel needs an inter-arrival law");
  }
  if (metabolic_.role() != Role::Metabolic) {
    throw InvalidSpecError("renewal kernel needs a metabolic law");
  }
  if (!(order_ >= 1.0) || !std::isfinite(order_)) {
    throw InvalidSpecError("Wasserstein order must be finite and >= 1");
  }
}

double RenewalKernel::rate_transform(double s) const {
  return metabolic_.laplace(-order_ * s);
}

double RenewalKernel::density(double x) const {
  if (x < 0.0) return 0.0;
  return rate_transform(x) * interarrival_.density(x);
}

double RenewalKernel::forcing(double t) const {
  if (t < 0.0) return 0.0;
  return rate_transform(t) * interarrival_.survival(t);
}

double RenewalKernel::laplace(double u) const {
  if (std::holds_alternative<Dirac>(metabolic_.law())) {
    return interarrival_.laplace(u - order_ * std::get<Dirac>(metabolic_.law()).value);
  }
  // psi_G(u - p theta) decreases in theta; it is finite for every theta as
  // soon as it is finite at the lower end of the support.
  if (!std::isfinite(interarrival_.laplace(u - order_ * metabolic_.support_lo()))) {
    return std::numeric_limits<double>::infinity();
  }
  return expectation(metabolic_, [&](double th) { return interarrival_.laplace(u - order_ * th); },
                     1e-12);
}

LaplaceRoot find_w(const RenewalKernel& kernel, double cap, double tol) {
  if (!(kernel.mass() < 1.0)) {
    throw NonDefectiveError("renewal kernel has total mass >= 1");
  }
  auto below = [&](double u) { return kernel.laplace(u) < 1.0; };
  double hi = 1.0;
  while (hi < cap && below(hi)) hi = std::min(2.0 * hi, cap);
  if (below(hi)) return {cap, true};
  return {bisect_crossing(below, 0.0, hi, tol), false};
}

RenewalSolution::RenewalSolution(double step, double w_shift, std::vector<double> tilted)
    : step_(step), w_shift_(w_shift), tilted_(std::move(tilted)) {
  if (tilted_.empty()) throw std::invalid_argument("empty renewal solution");
}

double RenewalSolution::constant() const {
  return *std::max_element(tilted_.begin(), tilted_.end());
}

double RenewalSolution::operator()(double t) const {
  if (t < 0.0 || t > horizon() * (1.0 + 1e-12)) {
    throw std::out_of_range("renewal solution queried outside its grid");
  }
  const double pos = t / step_;
  const std::size_t k = std::min(static_cast<std::size_t>(pos), tilted_.size() - 1);
  double value = tilted_[k];
  if (k + 1 < tilted_.size()) value += (pos - static_cast<double>(k)) * (tilted_[k + 1] - value);
  return std::exp(-w_shift_ * t) * value;
}

namespace {

struct TiltedGrid {
  std::vector<double> kernel;
  std::vector<double> forcing;
};

TiltedGrid tilted_grid(const RenewalKernel& kernel, double w_shift, double step, std::size_t n) {
  TiltedGrid g;
  g.kernel.resize(n);
  g.forcing.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = step * static_cast<double>(k);
    const double tilt = std::exp(w_shift * t);
    g.kernel[k] = tilt * kernel.density(t);
    g.forcing[k] = tilt * kernel.forcing(t);
  }
  return g;
}

// h (j_0 Z_n / 2 + sum_{k=1}^{n-1} j_k Z_{n-k} + j_n Z_0 / 2), leaving out the
// j_0 Z_n term when `skip_diagonal` is set.
double trapezoid_convolution(std::span<const double> j, std::span<const double> z,
                             std::size_t n, double step, bool skip_diagonal) {
  if (n == 0) return 0.0;
  double sum = 0.5 * j[n] * z[0];
  for (std::size_t k = 1; k < n; ++k) sum += j[k] * z[n - k];
  if (!skip_diagonal) sum += 0.5 * j[0] * z[n];
  return step * sum;
}

}  // namespace

RenewalSolution solve_renewal(const RenewalKernel& kernel, double w_shift, double step,
                              double horizon, bool directly_integrable) {
  if (!(step > 0.0) || !(horizon > step)) {
    throw std::invalid_argument("renewal grid needs 0 < step < horizon");
  }
  if (!(kernel.laplace(w_shift) < 1.0) && !directly_integrable) {
    throw NonDefectiveError("tilted renewal kernel is not defective at w_shift = " +
                            std::to_string(w_shift));
  }
  const auto n = static_cast<std::size_t>(std::ceil(horizon / step)) + 1;
  const TiltedGrid g = tilted_grid(kernel, w_shift, step, n);
  return RenewalSolution(step, w_shift, solve_renewal_grid(g.kernel, g.forcing, step));
}

std::vector<double> solve_renewal_grid(std::span<const double> kernel,
                                       std::span<const double> forcing, double step) {
  if (kernel.size() != forcing.size() || kernel.empty()) {
    throw std::invalid_argument("renewal grid needs kernel and forcing of equal, non-zero size");
  }
  const std::size_t n = kernel.size();
  std::vector<double> z(n, 0.0);
  z[0] = forcing[0];
  const double diag = 1.0 - 0.5 * step * kernel[0];
  for (std::size_t i = 1; i < n; ++i) {
    z[i] = (forcing[i] + trapezoid_convolution(kernel, z, i, step, true)) / diag;
  }
  return z;
}

double renewal_residual(const RenewalKernel& kernel, const RenewalSolution& sol) {
  const std::vector<double>& z = sol.tilted();
  const TiltedGrid g = tilted_grid(kernel, sol.w_shift(), sol.step(), z.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r =
        z[i] - g.forcing[i] - trapezoid_convolution(g.kernel, z, i, sol.step(), false);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double exponential_case_decay(double lambda, const DistributionSpec& metabolic, double order) {
  if (!(lambda > 0.0)) throw InvalidSpecError("exponential rate must be > 0");
  if (!(order >= 1.0)) throw InvalidSpecError("Wasserstein order must be >= 1");
  const double transform =
      expectation(metabolic, [&](double th) { return lambda / (lambda + order * th); }, 1e-12);
  return lambda * (1.0 - transform);
}

double contraction_deficit(const DistributionSpec& interarrival,
                           const DistributionSpec& metabolic) {
  return 1.0 - expectation(metabolic, [&](double th) { return interarrival.laplace(-th); }, 1e-12);
}

}  // namespace pdmp
