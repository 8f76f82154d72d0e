#include "pdmp/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pdmp/errors.hpp"

namespace pdmp {

namespace {

double hazard_or_inf(const HazardProfile& profile, double age) {
  return age >= profile.explosion_point() ? kNever : profile.hazard(age);
}

// Whether an event carried by the elder age is shared, given both ages at the
// event time. Draws a uniform only when the hazards differ.
bool event_is_common(const HazardProfile& profile, double elder_age, double younger_age,
                     RandomStream& rng) {
  const double z_old = hazard_or_inf(profile, elder_age);
  const double z_young = hazard_or_inf(profile, younger_age);
  if (!(z_young < z_old)) return true;
  return rng.uniform01() * z_old < z_young;
}

void land(ProcessState& s, double x_new, double theta_new) {
  s.x = x_new;
  s.theta = theta_new;
  s.age = 0.0;
}

struct EngineOptions {
  double horizon = 0.0;
  double tv_from = kNever;  // TV coupling at common jumps strictly after this time
  double probe = kNever;    // record |X - X~| at this time
  bool keep_logs = false;
};

struct EngineOutput {
  CoupledPath path;
  double gap_at_probe = kNever;
  bool first_jumped_after_probe = false;
};

double gap_at(const ProcessState& y, const ProcessState& yt, double time) {
  return std::abs(y.x * std::exp(-y.theta * (time - y.t)) -
                  yt.x * std::exp(-yt.theta * (time - yt.t)));
}

EngineOutput run_engine(const ProcessState& init, const ProcessState& init_tilde,
                        const Model& model, const EngineOptions& opt, RandomStream& rng) {
  validate_state(init);
  validate_state(init_tilde);
  if (init.t != init_tilde.t) throw InvalidSpecError("coupled states must share their start time");
  if (!(opt.horizon > init.t)) throw std::invalid_argument("horizon must exceed the start time");
  if (model.first_interarrival) {
    throw InvalidSpecError("coupled simulation does not support a first-interarrival override");
  }
  const HazardProfile& hz = model.hazard;

  EngineOutput out;
  CoupledPath& path = out.path;
  CouplingReport& rep = path.report;
  CoupledState st{init, init_tilde, init.age == init_tilde.age, false};
  st.fully_merged = st.ages_merged && init.x == init_tilde.x && init.theta == init_tilde.theta;
  if (st.ages_merged) rep.tau_A = init.t;
  if (st.fully_merged) rep.tau = init.t;
  if (opt.keep_logs) {
    path.first.initial = init;
    path.second.initial = init_tilde;
    path.first.horizon = path.second.horizon = opt.horizon;
  }
  bool probe_pending = opt.probe <= opt.horizon;

  for (;;) {
    const bool first_elder = st.y.age >= st.y_tilde.age;
    const double elder_age = first_elder ? st.y.age : st.y_tilde.age;
    const double wait = integrated_hazard_inverse(hz, elder_age, rng.exp1());
    const double t_event = st.y.t + wait;
    if (probe_pending && t_event > opt.probe) {
      out.gap_at_probe = gap_at(st.y, st.y_tilde, opt.probe);
      probe_pending = false;
    }
    if (t_event > opt.horizon) break;

    flow(st.y, wait);
    flow(st.y_tilde, wait);
    st.y.t = st.y_tilde.t = t_event;
    CoupledEvent ev{t_event, CoupledEventKind::Common, st.y.age, st.y_tilde.age, false};

    const bool common =
        st.ages_merged ||
        event_is_common(hz, first_elder ? st.y.age : st.y_tilde.age,
                        first_elder ? st.y_tilde.age : st.y.age, rng);
    if (common) {
      double x1 = 0.0, x2 = 0.0, u1 = 0.0, u2 = 0.0;
      if (!st.fully_merged && t_event > opt.tv_from) {
        const TvJumpOutcome o = tv_jump_coupling(st.y.x, st.y_tilde.x, model.intake, rng);
        x1 = o.x_plus, x2 = o.x_tilde_plus;
        u1 = x1 - st.y.x, u2 = x2 - st.y_tilde.x;
      } else {
        u1 = u2 = model.intake.sample(rng);
        x1 = st.y.x + u1, x2 = st.y_tilde.x + u2;
      }
      const double th = model.metabolic.sample(rng);
      land(st.y, x1, th);
      land(st.y_tilde, x2, th);
      if (!st.ages_merged) {
        st.ages_merged = true;
        rep.tau_A = t_event;
      }
      if (!st.fully_merged && x1 == x2) {
        st.fully_merged = true;
        rep.tau = t_event;
        ev.merged = true;
      }
      ++rep.common_events;
      if (opt.keep_logs) {
        path.first.record(st.y, u1);
        path.second.record(st.y_tilde, u2);
      }
      if (t_event > opt.probe) out.first_jumped_after_probe = true;
    } else {
      ProcessState& jumper = first_elder ? st.y : st.y_tilde;
      const double u = model.intake.sample(rng);
      const double th = model.metabolic.sample(rng);
      jump(jumper, u, th);
      ev.kind = first_elder ? CoupledEventKind::FirstOnly : CoupledEventKind::SecondOnly;
      ++rep.lone_events;
      if (opt.keep_logs) (first_elder ? path.first : path.second).record(jumper, u);
      if (first_elder && t_event > opt.probe) out.first_jumped_after_probe = true;
    }
    if (opt.keep_logs) path.events.push_back(ev);
  }

  const double rest = opt.horizon - st.y.t;
  flow(st.y, rest);
  flow(st.y_tilde, rest);
  st.y.t = st.y_tilde.t = opt.horizon;
  path.final_state = st;
  return out;
}

}  // namespace

AgeCouplingPath simulate_coupled_ages(double a0, double a0_tilde, const HazardProfile& profile,
                                      double horizon, RandomStream& rng) {
  if (!(a0 >= 0.0 && a0_tilde >= 0.0)) throw InvalidSpecError("ages must be >= 0");
  if (a0 >= profile.explosion_point() || a0_tilde >= profile.explosion_point()) {
    throw InvalidSpecError("ages must lie below the explosion point of the hazard");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  AgeCouplingPath out;
  CouplingReport& rep = out.report;
  double age = a0, age_tilde = a0_tilde, t = 0.0;
  while (age != age_tilde) {
    const bool first_elder = age > age_tilde;
    const double elder = first_elder ? age : age_tilde;
    const double wait = integrated_hazard_inverse(profile, elder, rng.exp1());
    if (t + wait > horizon) return out;
    t += wait;
    age += wait;
    age_tilde += wait;
    CoupledEvent ev{t, CoupledEventKind::Common, age, age_tilde, false};
    if (event_is_common(profile, first_elder ? age : age_tilde, first_elder ? age_tilde : age,
                        rng)) {
      age = age_tilde = 0.0;
      ++rep.common_events;
    } else {
      (first_elder ? age : age_tilde) = 0.0;
      ev.kind = first_elder ? CoupledEventKind::FirstOnly : CoupledEventKind::SecondOnly;
      ++rep.lone_events;
    }
    out.events.push_back(ev);
  }
  rep.tau_A = rep.tau = t;
  return out;
}

CoupledPath simulate_coupled_full(const ProcessState& init, const ProcessState& init_tilde,
                                  const Model& model, double horizon, RandomStream& rng) {
  EngineOptions opt;
  opt.horizon = horizon;
  opt.keep_logs = true;
  return run_engine(init, init_tilde, model, opt, rng).path;
}

TvJumpOutcome tv_jump_coupling(double x_minus, double x_tilde_minus,
                               const DistributionSpec& intake, RandomStream& rng) {
  if (!intake.has_density()) {
    throw NoDensityError("TV jump coupling needs an intake law with a density, got " +
                         intake.describe());
  }
  const double u = intake.sample(rng);
  const double z = x_minus + u;
  if (x_minus == x_tilde_minus) return {z, z, true};
  // Overlap part: accept z with probability min(1, f~(z)/f(z)).
  const double f1 = intake.density(u);
  const double f2 = intake.density(z - x_tilde_minus);
  if (rng.uniform01() * f1 < f2) return {z, z, true};
  // Residual part of the second law: proposal f~, acceptance (1 - f/f~)+.
  constexpr long kMaxTries = 100'000'000;
  for (long i = 0; i < kMaxTries; ++i) {
    const double ut = intake.sample(rng);
    const double zt = x_tilde_minus + ut;
    const double g2 = intake.density(ut);
    const double g1 = intake.density(zt - x_minus);
    if (rng.uniform01() * g2 >= g1) return {z, zt, false};
  }
  throw std::runtime_error("TV jump coupling: residual sampler did not terminate");
}

void CouplingPhaseParams::validate() const {
  if (!(alpha > 0.0 && alpha < beta && beta < 1.0)) {
    throw InvalidSpecError("coupling phases need 0 < alpha < beta < 1");
  }
  if (!(epsilon_tv > 0.0 && epsilon_tv < 1.0)) {
    throw InvalidSpecError("coupling phases need 0 < epsilon_tv < 1");
  }
}

CouplingReport run_three_phase(const ProcessState& init, const ProcessState& init_tilde,
                               const CouplingPhaseParams& params, const Model& model, double t,
                               RandomStream& rng) {
  params.validate();
  if (!(t > 0.0)) throw std::invalid_argument("three-phase horizon must be > 0");
  const double t0 = init.t;
  EngineOptions opt;
  opt.horizon = t0 + t;
  opt.tv_from = opt.probe = t0 + params.beta * t;
  EngineOutput run = run_engine(init, init_tilde, model, opt, rng);
  CouplingReport rep = run.path.report;
  PhaseOutcomes ph;
  ph.ages_by_alpha = rep.tau_A - t0 <= params.alpha * t;
  ph.close_at_beta = run.gap_at_probe < params.epsilon_tv;
  ph.jump_in_window = run.first_jumped_after_probe;
  ph.merged = rep.tau <= opt.horizon;
  rep.phases = ph;
  return rep;
}

CouplingReport age_coalescence_algorithm(AgeCase kase, const AgeCouplingParams& tuning,
                                         const HazardProfile& profile, double a0, double a0_tilde,
                                         double horizon, RandomStream& rng) {
  const AgeBoundParams bound = age_bound_params(kase, profile, tuning);
  CouplingReport rep = simulate_coupled_ages(a0, a0_tilde, profile, horizon, rng).report;
  rep.bound_variable = sample_age_bound(bound, rng);
  return rep;
}

}  // namespace pdmp
