// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pdmp/bounds.hpp"
#include "pdmp/config.hpp"
#include "pdmp/coupling.hpp"
#include "pdmp/estimators.hpp"
#include "pdmp/eta.hpp"
#include "pdmp/experiment.hpp"
#include "pdmp/renewal.hpp"

using namespace pdmp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

DistributionSpec g_law(Law l) { return DistributionSpec(l, Role::InterArrival); }
DistributionSpec h_law(Law l) { return DistributionSpec(l, Role::Metabolic); }
DistributionSpec f_law(Law l) { return DistributionSpec(l, Role::Intake); }

constexpr std::size_t kN = 100000;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const fs::path kReference = fs::path(PDMP_CONFIG_DIR) / "exponential_reference.yaml";

// Criterion 8 result, reused by 9 and 10.
std::optional<CoupleResult> reference_result;

const CoupleResult& reference() {
  if (!reference_result) reference_result = run_couple(load_config(kReference.string()));
  return *reference_result;
}

void write_all(const CoupleResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  write_curves(r.tv, dir / "curves_tv.csv");
  write_curves(r.w1, dir / "curves_w1.csv");
  write_coupling_reports(r.final_reports, dir / "coupling_reports.csv");
}

Outcome constant_hazard() {
  const HazardProfile h(g_law(Exponential{1.0}));
  RandomStream rng(101);
  std::vector<double> tau;
  tau.reserve(kN);
  for (std::size_t i = 0; i < kN; ++i) tau.push_back(simulate_coupled_ages(0.0, 1.0, h, 1e3, rng).report.tau_A);
  const MeanEstimate m = mean_estimate(tau);
  const double ks = ks_distance(tau, [](double t) { return 1.0 - std::exp(-t); });
  const double mean_tol = 3.0 / std::sqrt(double(kN)) * m.sd;
  const double ks_tol = 1.63 / std::sqrt(double(kN));
  return {std::abs(m.mean - 1.0) <= mean_tol && ks <= ks_tol,
          "mean " + num(m.mean) + " (tol " + num(mean_tol) + "), KS " + num(ks) + " (tol " +
              num(ks_tol) + ")"};
}

Outcome age_domination() {
  const HazardProfile h(g_law(Weibull{2.0, std::sqrt(2.0)}));
  const AgeCouplingParams tuning{0.5, 1.0, 2.0};
  const AgeBoundParams p = age_bound_params(AgeCase::UnboundedHazard, h, tuning);
  RandomStream rng(202);
  std::vector<double> tau, bound;
  for (std::size_t i = 0; i < kN; ++i) {
    const CouplingReport r =
        age_coalescence_algorithm(AgeCase::UnboundedHazard, tuning, h, 0.0, 1.0, 1e6, rng);
    tau.push_back(r.tau_A);
    bound.push_back(*r.bound_variable);
  }
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(0.5 * k);
  const DominanceReport d = survival_compare(tau, bound, grid);
  double worst = -1.0;
  for (const auto& pt : d.points) worst = std::max(worst, pt.survival_a - pt.survival_b - pt.slack);
  return {d.all_hold() && std::abs(p.p1 - 0.2212) < 5e-4 && std::abs(p.p2 - 0.0439) < 5e-4,
          "p1 " + num(p.p1) + ", p2 " + num(p.p2) + ", worst excess " + num(worst)};
}

Outcome wasserstein_contraction() {
  const Model m(f_law(Uniform{0.0, 1.0}), g_law(Exponential{1.0}), h_law(Dirac{1.0}));
  RandomStream rng(303);
  bool ok = true;
  std::string detail;
  for (double t : {2.0, 4.0, 8.0}) {
    std::vector<double> ratio;
    ratio.reserve(kN);
    for (std::size_t i = 0; i < kN; ++i) {
      const CoupledPath p = simulate_coupled_full({2.0, 1.0, 0.0, 0.0}, {4.0, 1.0, 0.0, 0.0}, m, t, rng);
      ratio.push_back(std::abs(p.final_state.y.x - p.final_state.y_tilde.x) / 2.0);
    }
    const MeanEstimate e = mean_estimate(ratio);
    const double limit = std::exp(-t / 2.0) + 2.0 * e.half_width;
    ok = ok && e.mean <= limit;
    detail += "t=" + num(t) + ": " + num(e.mean) + " <= " + num(limit) + "; ";
  }
  return {ok, detail};
}

Outcome renewal_oracle() {
  bool ok = true;
  std::string detail;
  for (const auto& [g, theta] : {std::pair{Law{Gamma{2.0, 0.5}}, 0.8},
                                 std::pair{Law{Exponential{1.0}}, 1.0},
                                 std::pair{Law{Weibull{2.0, 1.0}}, 1.7}}) {
    const RenewalKernel k(g_law(g), h_law(Dirac{theta}), 1.0);
    const RenewalSolution sol = solve_renewal(k, 0.0, 1e-3, 10.0);
    double err = 0.0;
    for (std::size_t i = 0; i < sol.tilted().size(); ++i) {
      const double t = i * 1e-3;
      err = std::max(err, std::abs(sol(t) - std::exp(-theta * t)));
    }
    const double res = renewal_residual(k, sol);
    ok = ok && err <= 1e-3 && res <= 1e-6;
    detail += k.interarrival().describe() + ": err " + num(err) + ", residual " + num(res) + "; ";
  }
  return {ok, detail};
}

Outcome laplace_root() {
  const RenewalKernel k(g_law(Exponential{1.0}), h_law(Dirac{1.0}), 1.0);
  const LaplaceRoot w = find_w(k);
  return {!w.capped && std::abs(w.value - 1.0) <= 1e-8, "w " + num(w.value)};
}

Outcome eta_closed_forms() {
  const DistributionSpec uni = f_law(Uniform{0.0, 1.0}), ex = f_law(Exponential{1.0});
  double eu = 0.0, ee = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double e = i * 1e-3;
    eu = std::max(eu, std::abs(eta(e, uni) - e));
    ee = std::max(ee, std::abs(eta(e, ex) - (1.0 - std::exp(-e))));
  }
  return {eu <= 1e-6 && ee <= 1e-6, "uniform " + num(eu) + ", exponential " + num(ee)};
}

Outcome tv_jump() {
  const DistributionSpec f = f_law(Uniform{0.0, 1.0});
  RandomStream rng(707);
  std::size_t merged = 0;
  std::vector<double> pooled;
  pooled.reserve(2 * kN);
  for (std::size_t i = 0; i < kN; ++i) {
    const TvJumpOutcome o = tv_jump_coupling(1.0, 1.3, f, rng);
    merged += o.merged;
    pooled.push_back(o.x_plus - 1.0);
    pooled.push_back(o.x_tilde_plus - 1.3);
  }
  const double freq = double(merged) / kN;
  const double se = std::sqrt(0.7 * 0.3 / kN);
  const double ks = ks_distance(pooled, [&](double x) { return f.cdf(x); });
  const double ks_tol = 1.63 / std::sqrt(double(pooled.size()));
  return {std::abs(freq - 0.7) <= 2.0 * se && ks <= ks_tol,
          "merge " + num(freq) + " (2 SE " + num(2.0 * se) + "), KS " + num(ks) + " (tol " +
              num(ks_tol) + ")"};
}

Outcome main_theorem() {
  const CoupleResult& r = reference();
  std::size_t failed = 0;
  std::string first;
  for (const CheckLine& c : verify_dominance(r)) {
    if (!c.pass) {
      if (failed++ == 0) first = c.name + ": " + c.detail;
    }
  }
  return {failed == 0 && r.tv.size() == 20,
          std::to_string(r.tv.size() + r.w1.size()) + " grid checks, " + std::to_string(failed) +
              " failed" + (first.empty() ? "" : " (first: " + first + ")")};
}

Outcome rate_comparison() {
  const ExpCaseBounds e = exp_case_bounds(1.0, h_law(Dirac{1.0}), f_law(Uniform{0.0, 1.0}),
                                          HolderData{1.0, 1.0, 1.0}, {6.0, 4.0});
  std::vector<double> t, v;
  for (const CurveRow& row : reference().tv) {
    if (row.t >= 5.0 && row.t <= 20.0) {
      t.push_back(row.t);
      v.push_back(row.estimate);
    }
  }
  const double slope = log_linear_slope(t, v);
  const double limit = -0.25 * (1.0 - 0.3);
  const bool ok = std::abs(e.rate_method1 - 1.0 / 6.0) < 1e-12 &&
                  std::abs(e.rate_method2 - 0.25) < 1e-12 && e.rate_method2 > e.rate_method1 &&
                  slope <= limit;
  return {ok, "method1 " + num(e.rate_method1) + ", method2 " + num(e.rate_method2) +
                  ", empirical slope " + num(slope) + " (limit " + num(limit) + ")"};
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "pdmp_acceptance_determinism";
  fs::remove_all(base);
  write_all(reference(), base / "first");
  RunConfig cfg = load_config(kReference.string());
  cfg.experiment.parallelism = 1;
  write_all(run_couple(cfg), base / "second");
  cfg.experiment.parallelism = 8;
  write_all(run_couple(cfg), base / "parallel");
  bool ok = true;
  for (const char* f : {"curves_tv.csv", "curves_w1.csv", "coupling_reports.csv"}) {
    const std::string a = slurp(base / "first" / f);
    ok = ok && !a.empty() && a == slurp(base / "second" / f) && a == slurp(base / "parallel" / f);
  }
  fs::remove_all(base);
  return {ok, ok ? "byte-identical across repeat and parallelism 1 vs 8" : "outputs differ"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "constant-hazard coalescence", 10, constant_hazard},
      {2, "age-bound domination (unbounded hazard)", 60, age_domination},
      {3, "Wasserstein contraction, exponential case", 30, wasserstein_contraction},
      {4, "renewal solver oracle", 5, renewal_oracle},
      {5, "Laplace root", 1, laplace_root},
      {6, "eta closed forms", 60, eta_closed_forms},
      {7, "TV jump coupling", 60, tv_jump},
      {8, "main-theorem dominance", 300, main_theorem},
      {9, "exponential-case rate comparison", 60, rate_comparison},
      {10, "determinism", 900, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s criterion %d (%s): %s [%.2fs, budget %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), o.detail.c_str(), secs, c.budget_seconds,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
