#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pdmp/distributions.hpp"
#include "pdmp/hazard.hpp"
#include "pdmp/random.hpp"

namespace pdmp {

/// Point of the state space: contaminant level, elimination rate, age since
/// the last intake, plus the absolute time it refers to.
struct ProcessState {
  double x = 0.0;
  double theta = 1.0;
  double age = 0.0;
  double t = 0.0;

  friend bool operator==(const ProcessState&, const ProcessState&) = default;
};

/// Throws InvalidSpecError unless x >= 0, theta > 0, age >= 0.
void validate_state(const ProcessState& s);

/// Deterministic flow over `dt`: x decays as exp(-theta dt), age and t advance.
void flow(ProcessState& s, double dt);

/// Intake event: x += u, age resets, a fresh elimination rate takes over.
void jump(ProcessState& s, double u, double new_theta);

/// The three laws driving the process: intakes F, inter-intake times G
/// (through its hazard profile) and metabolic rates H.
struct Model {
  Model(DistributionSpec intake, DistributionSpec interarrival, DistributionSpec metabolic,
        std::optional<DistributionSpec> first_interarrival = std::nullopt);

  DistributionSpec intake;
  HazardProfile hazard;
  DistributionSpec metabolic;
  /// Law of the first inter-intake time. When absent the first event follows
  /// the hazard from the initial age, which is G itself for age 0.
  std::optional<DistributionSpec> first_interarrival;

  const DistributionSpec& interarrival() const noexcept { return hazard.law(); }
};

/// Waiting time until the first event of a process started at `age`.
double first_event_delay(const Model& model, double age, RandomStream& rng);
/// Waiting time after an intake (age 0).
double renewal_delay(const Model& model, RandomStream& rng);

/// Event record of one trajectory; the full path is recovered on demand.
struct EventLog {
  ProcessState initial;
  double horizon = 0.0;
  std::vector<double> jump_times;  // T_1 < T_2 < ...
  std::vector<double> intakes;     // U_n
  std::vector<double> thetas;      // rate in force after T_n
  std::vector<double> levels;      // x right after T_n

  /// N_t = #{n : T_n <= t}.
  std::size_t count_until(double t) const;
  void record(const ProcessState& after, double intake);
};

struct SimulatedPath {
  EventLog log;
  ProcessState final_state;
};

/// Exact event-driven simulation on [0, horizon].
SimulatedPath simulate_path(const ProcessState& init, const Model& model, double horizon,
                            RandomStream& rng);

/// State at time t (cadlag: a jump at t is included). Throws
/// std::out_of_range for t outside [0, horizon].
ProcessState state_at(const EventLog& log, double t);

/// int_0^t Theta_s ds along the logged path.
double integrated_rate(const EventLog& log, double t);

}  // namespace pdmp
