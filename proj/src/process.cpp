#include "pdmp/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pdmp/errors.hpp"

namespace pdmp {

void validate_state(const ProcessState& s) {
  if (!(std::isfinite(s.x) && s.x >= 0.0)) throw InvalidSpecError("state needs x >= 0");
  if (!(std::isfinite(s.theta) && s.theta > 0.0)) throw InvalidSpecError("state needs theta > 0");
  if (!(std::isfinite(s.age) && s.age >= 0.0)) throw InvalidSpecError("state needs age >= 0");
}

void flow(ProcessState& s, double dt) {
  s.x *= std::exp(-s.theta * dt);
  s.age += dt;
  s.t += dt;
}

void jump(ProcessState& s, double u, double new_theta) {
  s.x += u;
  s.theta = new_theta;
  s.age = 0.0;
}

Model::Model(DistributionSpec intake_law, DistributionSpec interarrival_law,
             DistributionSpec metabolic_law, std::optional<DistributionSpec> first)
    : intake(std::move(intake_law)),
      hazard(std::move(interarrival_law)),
      metabolic(std::move(metabolic_law)),
      first_interarrival(std::move(first)) {
  if (intake.role() != Role::Intake) throw InvalidSpecError("intake law must have role intake");
  if (metabolic.role() != Role::Metabolic) {
    throw InvalidSpecError("metabolic law must have role metabolic");
  }
}

double first_event_delay(const Model& model, double age, RandomStream& rng) {
  if (model.first_interarrival) return model.first_interarrival->sample(rng);
  return integrated_hazard_inverse(model.hazard, age, rng.exp1());
}

double renewal_delay(const Model& model, RandomStream& rng) {
  return integrated_hazard_inverse(model.hazard, 0.0, rng.exp1());
}

std::size_t EventLog::count_until(double t) const {
  return static_cast<std::size_t>(std::upper_bound(jump_times.begin(), jump_times.end(), t) -
                                  jump_times.begin());
}

void EventLog::record(const ProcessState& after, double intake) {
  jump_times.push_back(after.t);
  intakes.push_back(intake);
  thetas.push_back(after.theta);
  levels.push_back(after.x);
}

SimulatedPath simulate_path(const ProcessState& init, const Model& model, double horizon,
                            RandomStream& rng) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  validate_state(init);
  SimulatedPath out;
  out.log.initial = init;
  out.log.horizon = horizon;
  ProcessState s = init;
  double wait = first_event_delay(model, s.age, rng);
  while (s.t + wait <= horizon) {
    flow(s, wait);
    const double u = model.intake.sample(rng);
    jump(s, u, model.metabolic.sample(rng));
    out.log.record(s, u);
    wait = renewal_delay(model, rng);
  }
  flow(s, horizon - s.t);
  s.t = horizon;
  out.final_state = s;
  return out;
}

ProcessState state_at(const EventLog& log, double t) {
  const double t0 = log.initial.t;
  if (!(t >= t0 && t <= log.horizon)) {
    throw std::out_of_range("time " + std::to_string(t) + " outside the logged horizon");
  }
  const std::size_t n = log.count_until(t);
  ProcessState s;
  if (n == 0) {
    s = log.initial;
  } else {
    s.x = log.levels[n - 1];
    s.theta = log.thetas[n - 1];
    s.age = 0.0;
    s.t = log.jump_times[n - 1];
  }
  flow(s, t - s.t);
  s.t = t;
  return s;
}

double integrated_rate(const EventLog& log, double t) {
  double total = 0.0;
  double from = log.initial.t;
  double rate = log.initial.theta;
  for (std::size_t i = 0; i < log.jump_times.size() && log.jump_times[i] <= t; ++i) {
    total += rate * (log.jump_times[i] - from);
    from = log.jump_times[i];
    rate = log.thetas[i];
  }
  return total + rate * (t - from);
}

}  // namespace pdmp
