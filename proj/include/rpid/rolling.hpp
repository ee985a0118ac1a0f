#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpid/controller.hpp"
#include "rpid/criteria.hpp"
#include "rpid/optimizer.hpp"
#include "rpid/plant.hpp"
#include "rpid/sysid.hpp"

namespace rpid {

enum class RunMode {
  canonical,      // one offline optimization, fixed gains thereafter
  rolling_exact,  // periodic re-optimization against the true plant
  rolling_sysid,  // periodic re-identification + re-optimization on the surrogate
};

enum class Termination { gain_fixed_point, s_max, divergence };

struct Scenario {
  std::string name;
  PlantModel plant;
  double y_r = 0.0;
  int n_horizon = 1;  // predictive horizon N
  int m_sample = 1;   // plant steps per rolling period M
  PidGains k0;
  Bounds bounds;
  Criterion criterion = Criterion::ise;
  RunMode mode = RunMode::rolling_exact;
  int s_max = 20;
  double term_k_tol = 1e-6;
  double term_e_tol = 1e-4;
  bool reset_memory_on_update = false;
  /// Predictive rollouts normally start from a snapshot of the live
  /// controller memory so prediction and execution coincide at the
  /// incumbent gains; this switches them to zero memory instead.
  bool predict_fresh_memory = false;
  PidLaw law = PidLaw::place;
  double divergence_cap = 1e12;
  OptSettings opt;
};

/// Throws std::invalid_argument naming the offending field.
void validate_scenario(const Scenario& scenario);

/// Row of the per-period results table: state and output are taken at the
/// absolute step k = m_sample * s. j_value is the objective attained by the
/// optimization that produced this period's gains (NaN when the gains were
/// applied without one, i.e. the first rolling_sysid period). The fitted
/// model, when present, was identified from this period's sample window.
struct RollingRecord {
  int s = 0;
  PidGains gains;
  StateVector x_at;
  double y_at = 0.0;
  double j_value = 0.0;
  std::optional<LinearModel> model;
  bool fit_rank_deficient = false;
};

struct RunResult {
  std::vector<RollingRecord> records;
  Trajectory trajectory;  // concatenated closed-loop run, no state resets
  Termination terminated_by = Termination::s_max;
  /// Gains of each period actually started, including a period cut short
  /// by divergence; indexes the trajectory via sample_index / m_sample.
  std::vector<PidGains> applied_gains;
};

/// Rolling objective: cost of an n_horizon-step rollout of `model` from
/// `start` with candidate gains, window-position weights per the rolling
/// form. A diverged rollout costs kDivergencePenalty.
Objective make_predictive_objective(const Scenario& scenario, const PlantModel& model,
                                    const PlantState& start, const PidMemory& memory);

/// Canonical objective: cost over the errors e(1..N) of a rollout from the
/// plant's initial state with zero controller memory.
Objective make_canonical_objective(const Scenario& scenario);

/// True when the gains have stopped moving (infinity norm <= term_k_tol)
/// and the current tracking error is within term_e_tol.
bool check_termination(const PidGains& prev, const PidGains& curr, double e_now,
                       const Scenario& scenario);

/// Offline tuning baseline: optimize once against the canonical cost, then
/// run s_max*m_sample steps under the fixed gains. One record (s = 1);
/// terminated_by is s_max unless the simulation diverges.
RunResult run_canonical(const Scenario& scenario);

/// Rolling loop with the exact plant as the predictive model. Gains K(1)
/// come from an initial optimization started at k0.
RunResult run_rolling_exact(const Scenario& scenario);

/// Rolling loop with a per-period least-squares surrogate as the predictive
/// model. k0 is applied directly as K(1); the first optimization happens
/// after the first identification window is available.
RunResult run_rolling_sysid(const Scenario& scenario);

/// Dispatch on scenario.mode.
RunResult run_scenario(const Scenario& scenario);

std::string_view mode_name(RunMode mode);
std::optional<RunMode> mode_from_name(std::string_view name);
std::string_view termination_name(Termination t);

}  // namespace rpid
