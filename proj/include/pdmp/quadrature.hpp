#pragma once

#include <functional>
#include <span>

namespace pdmp {

using RealFunction = std::function<double(double)>;

/// Default absolute tolerance for density and transform integrals.
inline constexpr double kQuadratureTolerance = 1e-9;

/// Adaptive Simpson rule on [a, b] with Richardson correction.
double adaptive_simpson(const RealFunction& f, double a, double b,
                        double abs_tol = kQuadratureTolerance, int max_depth = 50);

/// Integral over [breaks.front(), breaks.back()], split at every breakpoint.
/// Breakpoints must be sorted; duplicates are skipped.
double integrate_pieces(const RealFunction& f, std::span<const double> breaks,
                        double abs_tol = kQuadratureTolerance);

/// Integral over [a, +inf) by summing geometrically growing panels.
///
/// `breaks` lists interior points where f may be non-smooth; panels never
/// straddle them. `scale` sets the first panel width. Returns +inf when the
/// partial sums blow up or the tail fails to die out before 1e8 * scale.
double integrate_to_infinity(const RealFunction& f, double a,
                             std::span<const double> breaks = {},
                             double abs_tol = kQuadratureTolerance, double scale = 1.0);

}  // namespace pdmp
