#include "pdmp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pdmp {

namespace {

struct Panel {
  double a, fa, m, fm, b, fb, whole;
};

double simpson_recurse(const RealFunction& f, const Panel& p, double tol, int depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double delta = left + right - p.whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol || !std::isfinite(delta)) {
    return left + right + delta / 15.0;
  }
  return simpson_recurse(f, {p.a, p.fa, lm, flm, p.m, p.fm, left}, 0.5 * tol, depth - 1) +
         simpson_recurse(f, {p.m, p.fm, rm, frm, p.b, p.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const RealFunction& f, double a, double b, double abs_tol,
                        int max_depth) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  // Force two levels of refinement so a coarse first estimate cannot
  // terminate early on an integrand that happens to vanish at the 3 nodes.
  const double q1 = 0.5 * (a + m);
  const double q3 = 0.5 * (m + b);
  const double fq1 = f(q1);
  const double fq3 = f(q3);
  const double left = (m - a) / 6.0 * (fa + 4.0 * fq1 + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * fq3 + fb);
  return simpson_recurse(f, {a, fa, q1, fq1, m, fm, left}, 0.5 * abs_tol, max_depth) +
         simpson_recurse(f, {m, fm, q3, fq3, b, fb, right}, 0.5 * abs_tol, max_depth);
}

double integrate_pieces(const RealFunction& f, std::span<const double> breaks,
                        double abs_tol) {
  if (breaks.size() < 2) return 0.0;
  const double pieces = static_cast<double>(breaks.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) {
      total += adaptive_simpson(f, breaks[i], breaks[i + 1], abs_tol / pieces);
    }
  }
  return total;
}

double integrate_to_infinity(const RealFunction& f, double a,
                             std::span<const double> breaks, double abs_tol,
                             double scale) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cuts;
  for (double c : breaks) {
    if (c > a && std::isfinite(c)) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  const double last_cut = cuts.empty() ? a : cuts.back();
  const double limit = a + 1e12 * scale;
  const double panel_tol = abs_tol / 8.0;

  double total = 0.0;
  double x = a;
  double width = scale;
  std::size_t next_cut = 0;
  int quiet_panels = 0;
  while (x < limit) {
    double end = x + width;
    while (next_cut < cuts.size() && cuts[next_cut] <= x) ++next_cut;
    if (next_cut < cuts.size() && cuts[next_cut] < end) end = cuts[next_cut];
    const double piece = adaptive_simpson(f, x, end, panel_tol);
    if (!std::isfinite(piece)) return kInf;
    total += piece;
    if (!std::isfinite(total) || std::abs(total) > 1e250) return kInf;
    x = end;
    width *= 2.0;
    if (x >= last_cut && std::abs(piece) <= 1e-3 * abs_tol) {
      if (++quiet_panels >= 2) return total;
    } else {
      quiet_panels = 0;
    }
  }
  return kInf;
}

}  // namespace pdmp
