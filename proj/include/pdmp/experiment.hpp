#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "pdmp/bounds.hpp"
#include "pdmp/config.hpp"
#include "pdmp/coupling.hpp"
#include "pdmp/estimators.hpp"

namespace pdmp {

/// Stream families; replica i of family f at grid index k draws from
/// RandomStream::indexed(seed, stream_tag(f, k), i).
enum class StreamFamily : std::uint64_t {
  Simulate = 1,
  ThreePhase = 2,
  CoupledFull = 3,
  BoundVariable = 4,
  Paths = 5,
};

std::uint64_t stream_tag(StreamFamily family, std::uint64_t sub = 0);

std::size_t effective_parallelism(std::size_t requested);

/// Runs body(i) for i in [0, n) on `workers` threads with static chunking.
/// The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w * n / workers; i < (w + 1) * n / workers; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct MarginalRow {
  double t = 0.0;
  MeanEstimate x;
  MeanEstimate theta;
  MeanEstimate age;
};

/// Single-path simulation from the first initial law; marginal means on the grid.
std::vector<MarginalRow> run_simulation(const RunConfig& config);

struct CurveRow {
  double t = 0.0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bound = 0.0;
  std::string provenance;
};

struct CoupleResult {
  RateReport rates;
  std::vector<CurveRow> tv;
  std::vector<CurveRow> w1;
  /// Three-phase reports at the last grid point, with bound-variable draws.
  std::vector<CouplingReport> final_reports;
};

/// Three-phase coupling at every grid point (TV) and the full-process
/// coupling over the whole grid (W1, as the coupled mean of |Y_t - Y~_t|_1).
CoupleResult run_couple(const RunConfig& config);

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Dominance of every curve row by its bound (ci_low <= bound).
std::vector<CheckLine> verify_dominance(const CoupleResult& result);

/// Shortest round-trip text of a double; "inf"/"-inf"/"nan" for non-finite.
std::string format_number(double v);

void write_rate_report(const RateReport& report, const RunConfig& config,
                       const std::filesystem::path& file);
void write_curves(const std::vector<CurveRow>& rows, const std::filesystem::path& file);
void write_coupling_reports(const std::vector<CouplingReport>& reports,
                            const std::filesystem::path& file);
void write_marginals(const std::vector<MarginalRow>& rows, const std::filesystem::path& file);

/// Path CSVs for the first `outputs.path_replicas` replicas:
/// path_<i>.csv (t, x, theta, age, event_flag) and events_<i>.csv (n, T_n, U_n, Theta_n).
void dump_paths(const RunConfig& config, const std::filesystem::path& directory);

}  // namespace pdmp
