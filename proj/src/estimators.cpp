#include "pdmp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdmp {

namespace {
constexpr double kZ = 1.959963984540054;
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::CouplingTailTV: return "coupling-tail-tv";
    case EstimatorKind::HistogramTV: return "histogram-tv";
    case EstimatorKind::SortedW1: return "sorted-w1";
    case EstimatorKind::SurvivalTail: return "survival-tail";
    case EstimatorKind::CoupledMean: return "coupled-mean";
  }
  return "?";
}

Interval wilson_interval(std::size_t successes, std::size_t n) {
  if (n == 0) throw std::invalid_argument("Wilson interval of an empty sample");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = kZ * kZ;
  const double centre = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = kZ / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  // The endpoints are exact at the boundary; rounding would leave them off by an ulp.
  const double low = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double high = successes == n ? 1.0 : std::min(1.0, centre + half);
  return {low, high};
}

MeanEstimate mean_estimate(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, kZ * sd / std::sqrt(n), sd};
}

EmpiricalCurve tv_via_coupling(std::span<const CouplingReport> reports,
                               std::span<const double> grid) {
  if (reports.empty()) throw std::invalid_argument("no coupling reports");
  std::vector<double> taus;
  taus.reserve(reports.size());
  for (const auto& r : reports) taus.push_back(r.tau);
  std::sort(taus.begin(), taus.end());
  EmpiricalCurve c;
  c.kind = EstimatorKind::CouplingTailTV;
  c.n_replicas = reports.size();
  for (double t : grid) {
    const auto above = static_cast<std::size_t>(
        taus.end() - std::upper_bound(taus.begin(), taus.end(), t));
    c.grid.push_back(t);
    c.values.push_back(static_cast<double>(above) / static_cast<double>(taus.size()));
    c.intervals.push_back(wilson_interval(above, taus.size()));
  }
  return c;
}

double w1_sorted(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("w1_sorted needs equal sample sizes");
  if (a.empty()) throw std::invalid_argument("w1_sorted needs non-empty samples");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double total = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) total += std::abs(sa[i] - sb[i]);
  return total / static_cast<double>(sa.size());
}

double tv_histogram(std::span<const double> a, std::span<const double> b, std::size_t bins) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  const double lo = pooled.front();
  const double hi = pooled.back();
  if (!(hi > lo)) return 0.0;
  if (bins == 0) {
    const auto q = [&](double p) {
      return pooled[static_cast<std::size_t>(p * static_cast<double>(pooled.size() - 1))];
    };
    const double iqr = q(0.75) - q(0.25);
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(pooled.size()));
    bins = width > 0.0 ? static_cast<std::size_t>(std::ceil((hi - lo) / width)) : 1;
    bins = std::clamp<std::size_t>(bins, 1, 100000);
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  auto fill = [&](std::span<const double> xs) {
    std::vector<double> h(bins, 0.0);
    for (double x : xs) {
      auto k = static_cast<std::size_t>((x - lo) / width);
      h[std::min(k, bins - 1)] += 1.0 / static_cast<double>(xs.size());
    }
    return h;
  };
  const auto ha = fill(a);
  const auto hb = fill(b);
  double l1 = 0.0;
  for (std::size_t k = 0; k < bins; ++k) l1 += std::abs(ha[k] - hb[k]);
  return std::min(1.0, 0.5 * l1);
}

double empirical_survival(std::span<const double> sorted, double t) {
  if (sorted.empty()) return 0.0;
  const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(above) / static_cast<double>(sorted.size());
}

bool DominanceReport::all_hold() const {
  return std::all_of(points.begin(), points.end(), [](const auto& p) { return p.holds; });
}

DominanceReport survival_compare(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> grid) {
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  DominanceReport rep;
  for (double t : grid) {
    DominancePoint p;
    p.t = t;
    p.survival_a = empirical_survival(sa, t);
    p.survival_b = empirical_survival(sb, t);
    double var = 0.0;
    if (!sa.empty()) var += p.survival_a * (1.0 - p.survival_a) / static_cast<double>(sa.size());
    if (!sb.empty()) var += p.survival_b * (1.0 - p.survival_b) / static_cast<double>(sb.size());
    p.slack = kZ * std::sqrt(var);
    p.holds = p.survival_a <= p.survival_b + p.slack;
    rep.points.push_back(p);
  }
  return rep;
}

double log_linear_slope(std::span<const double> t, std::span<const double> values) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < t.size() && i < values.size(); ++i) {
    if (!(values[i] > 0.0)) continue;
    const double y = std::log(values[i]);
    sx += t[i], sy += y, sxx += t[i] * t[i], sxy += t[i] * y, m += 1.0;
  }
  const double denom = m * sxx - sx * sx;
  if (m < 2.0 || !(denom > 0.0)) return std::nan("");
  return (m * sxy - sx * sy) / denom;
}

}  // namespace pdmp
