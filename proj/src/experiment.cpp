#include "pdmp/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "pdmp/process.hpp"

namespace pdmp {

namespace {

std::ofstream open_output(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

AgeBoundParams bound_params_for(const RunConfig& config, const RateReport& rates) {
  const Model model = config.model.model();
  if (rates.age_case == AgeCase::PositiveFloor) {
    return age_bound_params(AgeCase::PositiveFloor, model.hazard, {});
  }
  return age_bound_params(rates.age_case, model.hazard, *config.rates.age_tuning);
}

}  // namespace

std::uint64_t stream_tag(StreamFamily family, std::uint64_t sub) {
  return (static_cast<std::uint64_t>(family) << 40) | sub;
}

std::size_t effective_parallelism(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max<unsigned>(1, std::thread::hardware_concurrency());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<MarginalRow> run_simulation(const RunConfig& config) {
  const Model model = config.model.model();
  const auto& ex = config.experiment;
  const std::size_t n = ex.replicas;
  const std::size_t g = ex.grid.size();
  std::vector<double> xs(n * g), thetas(n * g), ages(n * g);
  parallel_for(n, effective_parallelism(ex.parallelism), [&](std::size_t i) {
    RandomStream rng = RandomStream::indexed(ex.seed, stream_tag(StreamFamily::Simulate), i);
    const ProcessState init = config.model.initial.sample(rng);
    const SimulatedPath path = simulate_path(init, model, ex.horizon, rng);
    for (std::size_t k = 0; k < g; ++k) {
      const ProcessState s = state_at(path.log, ex.grid[k]);
      xs[k * n + i] = s.x;
      thetas[k * n + i] = s.theta;
      ages[k * n + i] = s.age;
    }
  });
  std::vector<MarginalRow> rows;
  for (std::size_t k = 0; k < g; ++k) {
    auto slice = [&](const std::vector<double>& v) {
      return std::span<const double>(v.data() + k * n, n);
    };
    rows.push_back({ex.grid[k], mean_estimate(slice(xs)), mean_estimate(slice(thetas)),
                    mean_estimate(slice(ages))});
  }
  return rows;
}

CoupleResult run_couple(const RunConfig& config) {
  const Model model = config.model.model();
  const auto& ex = config.experiment;
  const std::size_t n = ex.replicas;
  const std::size_t workers = effective_parallelism(ex.parallelism);
  CoupleResult result;
  result.rates = compute_rates(model, config.rates);
  const MainBounds bounds = main_theorem_bounds(result.rates);

  for (std::size_t k = 0; k < ex.grid.size(); ++k) {
    const double t = ex.grid[k];
    CouplingPhaseParams params = default_phase_params(result.rates, t);
    if (config.coupling.epsilon_tv) params.epsilon_tv = *config.coupling.epsilon_tv;
    std::vector<CouplingReport> reports(n);
    parallel_for(n, workers, [&](std::size_t i) {
      RandomStream rng =
          RandomStream::indexed(ex.seed, stream_tag(StreamFamily::ThreePhase, k), i);
      const ProcessState a = config.model.initial.sample(rng);
      const ProcessState b = config.model.initial_tilde.sample(rng);
      reports[i] = run_three_phase(a, b, params, model, t, rng);
    });
    const double grid_point[] = {t};
    const EmpiricalCurve curve = tv_via_coupling(reports, grid_point);
    result.tv.push_back({t, curve.values[0], curve.intervals[0].low, curve.intervals[0].high,
                         bounds.tv(t), bounds.tv.provenance});
    if (k + 1 == ex.grid.size()) result.final_reports = std::move(reports);
  }

  const AgeBoundParams bound = bound_params_for(config, result.rates);
  parallel_for(result.final_reports.size(), workers, [&](std::size_t i) {
    RandomStream rng = RandomStream::indexed(ex.seed, stream_tag(StreamFamily::BoundVariable), i);
    result.final_reports[i].bound_variable = sample_age_bound(bound, rng);
  });

  const std::size_t g = ex.grid.size();
  std::vector<double> gaps(n * g);
  parallel_for(n, workers, [&](std::size_t i) {
    RandomStream rng = RandomStream::indexed(ex.seed, stream_tag(StreamFamily::CoupledFull), i);
    const ProcessState a = config.model.initial.sample(rng);
    const ProcessState b = config.model.initial_tilde.sample(rng);
    const CoupledPath path = simulate_coupled_full(a, b, model, ex.grid.back(), rng);
    for (std::size_t k = 0; k < g; ++k) {
      const ProcessState y = state_at(path.first, ex.grid[k]);
      const ProcessState yt = state_at(path.second, ex.grid[k]);
      gaps[k * n + i] =
          std::abs(y.x - yt.x) + std::abs(y.theta - yt.theta) + std::abs(y.age - yt.age);
    }
  });
  for (std::size_t k = 0; k < g; ++k) {
    const MeanEstimate m = mean_estimate(std::span<const double>(gaps.data() + k * n, n));
    result.w1.push_back({ex.grid[k], m.mean, std::max(0.0, m.mean - m.half_width),
                         m.mean + m.half_width, bounds.w1(ex.grid[k]), bounds.w1.provenance});
  }
  return result;
}

std::vector<CheckLine> verify_dominance(const CoupleResult& result) {
  std::vector<CheckLine> lines;
  auto check = [&](const char* what, const std::vector<CurveRow>& rows) {
    for (const auto& r : rows) {
      CheckLine line;
      line.name = std::string(what) + " t=" + format_number(r.t);
      line.pass = r.ci_low <= r.bound;
      line.detail = "estimate " + format_number(r.estimate) + " [" + format_number(r.ci_low) +
                    ", " + format_number(r.ci_high) + "] vs bound " + format_number(r.bound);
      lines.push_back(std::move(line));
    }
  };
  check("tv", result.tv);
  check("w1", result.w1);
  return lines;
}

void write_curves(const std::vector<CurveRow>& rows, const std::filesystem::path& file) {
  std::ofstream out = open_output(file);
  out << "t,estimate,ci_low,ci_high,bound_value,bound_provenance\n";
  for (const auto& r : rows) {
    out << format_number(r.t) << ',' << format_number(r.estimate) << ','
        << format_number(r.ci_low) << ',' << format_number(r.ci_high) << ','
        << format_number(r.bound) << ',' << r.provenance << '\n';
  }
}

void write_coupling_reports(const std::vector<CouplingReport>& reports,
                            const std::filesystem::path& file) {
  std::ofstream out = open_output(file);
  out << "replica_id,tau_A,tau,ages_by_alpha,close_at_beta,jump_in_window,merged,"
         "common_events,lone_events,bound_variable_value\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const CouplingReport& r = reports[i];
    const PhaseOutcomes ph = r.phases.value_or(PhaseOutcomes{});
    out << i << ',' << format_number(r.tau_A) << ',' << format_number(r.tau) << ','
        << ph.ages_by_alpha << ',' << ph.close_at_beta << ',' << ph.jump_in_window << ','
        << ph.merged << ',' << r.common_events << ',' << r.lone_events << ','
        << (r.bound_variable ? format_number(*r.bound_variable) : std::string("nan")) << '\n';
  }
}

void write_marginals(const std::vector<MarginalRow>& rows, const std::filesystem::path& file) {
  std::ofstream out = open_output(file);
  out << "t,mean_x,half_width_x,mean_theta,half_width_theta,mean_age,half_width_age\n";
  for (const auto& r : rows) {
    out << format_number(r.t) << ',' << format_number(r.x.mean) << ','
        << format_number(r.x.half_width) << ',' << format_number(r.theta.mean) << ','
        << format_number(r.theta.half_width) << ',' << format_number(r.age.mean) << ','
        << format_number(r.age.half_width) << '\n';
  }
}

void write_rate_report(const RateReport& r, const RunConfig& config,
                       const std::filesystem::path& file) {
  using nlohmann::ordered_json;
  auto number = [](double v) -> ordered_json {
    if (std::isfinite(v)) return v;
    return format_number(v);
  };
  ordered_json j;
  j["schema_version"] = 1;
  j["model"] = {{"intake", config.model.intake.describe()},
                {"interarrival", config.model.interarrival.describe()},
                {"metabolic", config.model.metabolic.describe()}};
  j["order"] = r.order;
  j["age_case"] = std::string(to_string(r.age_case));
  j["exponential_interarrival"] = r.exponential_interarrival;
  j["w_capped"] = r.w_capped;
  ordered_json constants = ordered_json::object();
  auto put = [&](const std::string& name, double value) {
    const auto it = r.provenance.find(name);
    constants[name] = {{"value", number(value)},
                       {"provenance", it == r.provenance.end() ? std::string() : it->second}};
  };
  put("w", r.w);
  put("v_G", r.v_G);
  put("rho", r.rho);
  put("C_renewal", r.C_renewal);
  put("p1", r.p1);
  put("p2", r.p2);
  put("v1", r.v1);
  put("C1", r.C1);
  put("v2_prime", r.v2_prime);
  put("C2_prime", r.C2_prime);
  put("v_prime", r.v_prime);
  put("v2", r.v2);
  put("C2", r.C2);
  put("v3", r.v3);
  put("C3", r.C3);
  put("v4_prime", r.v4_prime);
  put("v4", r.v4);
  put("C4", r.C4);
  put("alpha", r.alpha);
  put("beta", r.beta);
  put("moment_bound", r.moment_bound);
  put("C1_w1", r.C1_w1);
  put("C2_w1", r.C2_w1);
  j["constants"] = constants;
  j["eta_envelope"] = {{"C", r.eta.constant}, {"v", r.eta.exponent},
                       {"provenance", r.eta.provenance}};
  j["bounds"] = {{"tv", "main-theorem-tv-product"}, {"w1", "main-theorem-w1-sum"}};
  std::ofstream out = open_output(file);
  out << j.dump(2) << '\n';
}

void dump_paths(const RunConfig& config, const std::filesystem::path& directory) {
  const Model model = config.model.model();
  const auto& ex = config.experiment;
  for (std::size_t i = 0; i < config.outputs.path_replicas; ++i) {
    RandomStream rng = RandomStream::indexed(ex.seed, stream_tag(StreamFamily::Paths), i);
    const ProcessState init = config.model.initial.sample(rng);
    const SimulatedPath path = simulate_path(init, model, ex.horizon, rng);
    const EventLog& log = path.log;

    std::ofstream out = open_output(directory / ("path_" + std::to_string(i) + ".csv"));
    out << "t,x,theta,age,event_flag\n";
    auto row = [&](const ProcessState& s, int flag) {
      out << format_number(s.t) << ',' << format_number(s.x) << ',' << format_number(s.theta)
          << ',' << format_number(s.age) << ',' << flag << '\n';
    };
    row(log.initial, 0);
    ProcessState s = log.initial;
    for (std::size_t n = 0; n < log.jump_times.size(); ++n) {
      flow(s, log.jump_times[n] - s.t);
      s.t = log.jump_times[n];
      row(s, 0);
      s.x = log.levels[n];
      s.theta = log.thetas[n];
      s.age = 0.0;
      row(s, 1);
    }
    row(path.final_state, 0);

    std::ofstream ev = open_output(directory / ("events_" + std::to_string(i) + ".csv"));
    ev << "n,T_n,U_n,Theta_n\n";
    for (std::size_t n = 0; n < log.jump_times.size(); ++n) {
      ev << n + 1 << ',' << format_number(log.jump_times[n]) << ','
         << format_number(log.intakes[n]) << ',' << format_number(log.thetas[n]) << '\n';
    }
  }
}

}  // namespace pdmp
