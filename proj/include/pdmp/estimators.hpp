#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "pdmp/coupling.hpp"

namespace pdmp {

enum class EstimatorKind { CouplingTailTV, HistogramTV, SortedW1, SurvivalTail, CoupledMean };

std::string_view to_string(EstimatorKind kind);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// 95% Wilson score interval for `successes` out of `n`.
Interval wilson_interval(std::size_t successes, std::size_t n);

struct MeanEstimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal approximation
  double sd = 0.0;
};

MeanEstimate mean_estimate(std::span<const double> xs);

/// Estimates on a time grid with 95% intervals.
struct EmpiricalCurve {
  EstimatorKind kind = EstimatorKind::CouplingTailTV;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<Interval> intervals;
  std::size_t n_replicas = 0;
};

/// Fraction of replicas with tau > t at each grid point, with Wilson
/// intervals. Throws std::invalid_argument on an empty report list.
EmpiricalCurve tv_via_coupling(std::span<const CouplingReport> reports,
                               std::span<const double> grid);

/// One-dimensional empirical W1: mean absolute difference of the sorted
/// samples. Throws std::invalid_argument on a size mismatch or empty input.
double w1_sorted(std::span<const double> a, std::span<const double> b);

/// Half the L1 distance between normalised histograms on common bins.
/// `bins == 0` selects Freedman-Diaconis on the pooled sample. Biased upward;
/// diagnostics only.
double tv_histogram(std::span<const double> a, std::span<const double> b, std::size_t bins = 0);

struct DominancePoint {
  double t = 0.0;
  double survival_a = 0.0;
  double survival_b = 0.0;
  double slack = 0.0;  // 1.96 sqrt(Sa(1-Sa)/na + Sb(1-Sb)/nb)
  bool holds = false;  // survival_a <= survival_b + slack
};

struct DominanceReport {
  std::vector<DominancePoint> points;
  bool all_hold() const;
};

/// Pointwise check that sample A is stochastically below sample B.
DominanceReport survival_compare(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> grid);

/// Empirical survival P(X > t) of a sorted sample.
double empirical_survival(std::span<const double> sorted, double t);

/// Largest Kolmogorov-Smirnov gap between a sample and a continuous cdf.
template <class Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf);

/// Least-squares slope of log(value) against t over the points with value > 0.
double log_linear_slope(std::span<const double> t, std::span<const double> values);

template <class Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    worst = std::max({worst, std::abs(f - static_cast<double>(i) / n),
                      std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return worst;
}

}  // namespace pdmp
