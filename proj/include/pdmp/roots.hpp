#pragma once

#include <cmath>

namespace pdmp {

/// Bisection for the crossing point of a non-decreasing predicate.
///
/// Requires `below(lo)` true and `below(hi)` false. Returns the midpoint of
/// the final bracket, whose width is at most `tol`.
template <class Pred>
double bisect_crossing(Pred&& below, double lo, double hi, double tol) {
  for (int iter = 0; iter < 400 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (below(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace pdmp
