#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "pdmp/age_bounds.hpp"
#include "pdmp/distributions.hpp"
#include "pdmp/hazard.hpp"
#include "pdmp/process.hpp"
#include "pdmp/random.hpp"

namespace pdmp {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// The pair (Y, Y~) together with its absorbing flags.
struct CoupledState {
  ProcessState y;
  ProcessState y_tilde;
  bool ages_merged = false;
  bool fully_merged = false;
};

/// Success flags of the three-phase construction.
struct PhaseOutcomes {
  bool ages_by_alpha = false;  // tau_A <= alpha t
  bool close_at_beta = false;  // |X - X~| < epsilon at beta t
  bool jump_in_window = false; // a common jump occurs in (beta t, t]
  bool merged = false;         // tau <= t
};

struct CouplingReport {
  double tau_A = kNever;  // age coalescence time; kNever if not within horizon
  double tau = kNever;    // full coalescence time; kNever if not within horizon
  std::optional<PhaseOutcomes> phases;
  std::size_t common_events = 0;
  std::size_t lone_events = 0;
  /// Draw of the age-coalescence bounding variable, when one was simulated.
  std::optional<double> bound_variable;
};

enum class CoupledEventKind { Common, FirstOnly, SecondOnly };

struct CoupledEvent {
  double t = 0.0;
  CoupledEventKind kind = CoupledEventKind::Common;
  double age_before = 0.0;        // first process, just before the event
  double age_tilde_before = 0.0;  // second process
  bool merged = false;            // full coalescence happened at this event
};

struct AgeCouplingPath {
  CouplingReport report;
  std::vector<CoupledEvent> events;
};

/// Coupled ages started at (a0, a0_tilde), run until both ages coincide or
/// the horizon is reached. The elder age carries the next event; it is common
/// with probability zeta(younger)/zeta(elder) at the event time.
AgeCouplingPath simulate_coupled_ages(double a0, double a0_tilde, const HazardProfile& profile,
                                      double horizon, RandomStream& rng);

struct CoupledPath {
  EventLog first;
  EventLog second;
  std::vector<CoupledEvent> events;
  CouplingReport report;
  CoupledState final_state;
};

/// Coupled full processes on [0, horizon]: common jumps share the same intake
/// and the same metabolic rate. The first-interarrival override of the model
/// is not supported here.
CoupledPath simulate_coupled_full(const ProcessState& init, const ProcessState& init_tilde,
                                  const Model& model, double horizon, RandomStream& rng);

struct TvJumpOutcome {
  double x_plus = 0.0;
  double x_tilde_plus = 0.0;
  bool merged = false;
};

/// Maximal coupling of x_minus + U and x_tilde_minus + U~ with U, U~ ~ F.
/// The two landing points coincide with probability 1 - eta(|x_minus -
/// x_tilde_minus|). Throws NoDensityError when F has no density.
TvJumpOutcome tv_jump_coupling(double x_minus, double x_tilde_minus, const DistributionSpec& intake,
                               RandomStream& rng);

struct CouplingPhaseParams {
  double alpha = 0.0;
  double beta = 0.0;
  double epsilon_tv = 0.0;
  std::optional<AgeCouplingParams> age;

  /// Throws InvalidSpecError unless 0 < alpha < beta < 1 and 0 < epsilon_tv < 1.
  void validate() const;
};

/// Three-phase coupling over [0, t]: the full-process coupling until beta t,
/// then the jump TV coupling at every common jump. Flags record the outcome of
/// each phase against alpha t, beta t and epsilon_tv.
CouplingReport run_three_phase(const ProcessState& init, const ProcessState& init_tilde,
                               const CouplingPhaseParams& params, const Model& model, double t,
                               RandomStream& rng);

/// Coupled-age dynamics from (a0, a0_tilde) for the given bound regime,
/// together with an independent draw of the bounding variable. Throws
/// HypothesisError when the profile does not fit `kase`.
CouplingReport age_coalescence_algorithm(AgeCase kase, const AgeCouplingParams& tuning,
                                         const HazardProfile& profile, double a0, double a0_tilde,
                                         double horizon, RandomStream& rng);

}  // namespace pdmp
