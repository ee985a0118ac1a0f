#include "rpid/rolling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rpid {

void validate_scenario(const Scenario& sc) {
  if (sc.n_horizon < 1) throw std::invalid_argument("n_horizon must be >= 1");
  if (sc.m_sample < 1) throw std::invalid_argument("m_sample must be >= 1");
  if (sc.mode == RunMode::rolling_sysid && sc.m_sample < 4) {
    throw std::invalid_argument("m_sample must be >= 4 in rolling_sysid mode");
  }
  if (sc.mode == RunMode::rolling_sysid && sc.plant.state_dim != 2) {
    throw std::invalid_argument("rolling_sysid requires a 2-state plant");
  }
  if (sc.s_max < 1) throw std::invalid_argument("s_max must be >= 1");
  if (!sc.bounds.valid()) throw std::invalid_argument("bounds: lo > hi");
  if (!sc.bounds.contains(sc.k0)) throw std::invalid_argument("k0 outside bounds");
  if (!(sc.term_k_tol >= 0)) throw std::invalid_argument("term_k_tol must be >= 0");
  if (!(sc.term_e_tol >= 0)) throw std::invalid_argument("term_e_tol must be >= 0");
  if (!(sc.divergence_cap > 0)) throw std::invalid_argument("divergence_cap must be > 0");
  if (!sc.plant.transition || !sc.plant.output) {
    throw std::invalid_argument("plant maps are not set");
  }
  if (static_cast<int>(sc.plant.x0.size()) != sc.plant.state_dim) {
    throw std::invalid_argument("x0 length does not match state_dim");
  }
}

namespace {

RolloutOptions rollout_options(const Scenario& sc) {
  return {sc.law, sc.divergence_cap};
}

OptSettings optimizer_settings(const Scenario& sc) {
  OptSettings s = sc.opt;
  s.method = (sc.criterion == Criterion::iae || sc.criterion == Criterion::itae)
                 ? OptMethod::nelder_mead
                 : OptMethod::projected_newton;
  return s;
}

double output_at(const Scenario& sc, const PlantState& state, double u_prev) {
  return sc.plant.output(state.k, state.x, u_prev, sc.plant.params);
}

void append(Trajectory& dst, const Trajectory& src) {
  dst.samples.insert(dst.samples.end(), src.samples.begin(), src.samples.end());
}

/// The m_sample most recent transitions ending at the current state.
SampleWindow tail_window(const Trajectory& trajectory, const PlantState& current,
                         int m_sample) {
  const std::size_t n = trajectory.samples.size();
  const auto m = static_cast<std::size_t>(m_sample);
  if (n < m) throw std::logic_error("tail_window: trajectory shorter than window");
  SampleWindow window;
  window.reserve(m);
  for (std::size_t i = n - m; i < n; ++i) {
    const TrajectorySample& s = trajectory.samples[i];
    const StateVector& next = (i + 1 < n) ? trajectory.samples[i + 1].x : current.x;
    window.push_back({{s.x[0], s.x[1]}, s.u, {next[0], next[1]}, s.y});
  }
  return window;
}

RunResult run_rolling(const Scenario& sc, bool use_sysid) {
  validate_scenario(sc);
  const OptSettings opt = optimizer_settings(sc);

  RunResult out;
  PidGains gains;
  double j_value;
  if (use_sysid) {
    // initial gains are applied directly, without a model or optimization
    gains = sc.bounds.clip(sc.k0);
    j_value = std::numeric_limits<double>::quiet_NaN();
  } else {
    const OptResult first = multistart(
        make_predictive_objective(sc, sc.plant, {sc.plant.x0, 0}, PidMemory{}),
        sc.k0, sc.bounds, opt);
    gains = first.k_star;
    j_value = first.j_star;
  }

  PlantState state{sc.plant.x0, 0};
  PidMemory memory;
  std::optional<PidGains> prev_gains;
  out.terminated_by = Termination::s_max;

  for (int s = 1; s <= sc.s_max; ++s) {
    out.applied_gains.push_back(gains);
    const RolloutResult period = rollout(sc.plant, gains, memory, state, sc.y_r,
                                         sc.m_sample, rollout_options(sc));
    append(out.trajectory, period.trajectory);
    if (period.diverged()) {
      out.terminated_by = Termination::divergence;
      return out;
    }
    state = period.final_state;
    memory = period.final_memory;

    RollingRecord record;
    record.s = s;
    record.gains = gains;
    record.x_at = state.x;
    record.y_at = output_at(sc, state, memory.u_prev);
    record.j_value = j_value;
    if (use_sysid) {
      const FitResult fit = fit_linear_model(tail_window(out.trajectory, state, sc.m_sample));
      record.model = fit.model;
      record.fit_rank_deficient = fit.rank_deficient;
    }
    out.records.push_back(std::move(record));

    const double e_now = error(sc.y_r, out.records.back().y_at);
    if (prev_gains && check_termination(*prev_gains, gains, e_now, sc)) {
      out.terminated_by = Termination::gain_fixed_point;
      return out;
    }
    if (s == sc.s_max) break;

    prev_gains = gains;
    if (sc.reset_memory_on_update) memory = PidMemory{};
    const PidMemory predict_memory = sc.predict_fresh_memory ? PidMemory{} : memory;

    PlantModel surrogate;
    const PlantModel* predictive_model = &sc.plant;
    if (use_sysid) {
      surrogate = make_surrogate_plant(*out.records.back().model, state.x);
      predictive_model = &surrogate;
    }
    const OptResult next = multistart(
        make_predictive_objective(sc, *predictive_model, state, predict_memory),
        gains, sc.bounds, opt);  // warm start at the incumbent
    gains = next.k_star;
    j_value = next.j_star;
  }
  return out;
}

}  // namespace

Objective make_predictive_objective(const Scenario& sc, const PlantModel& model,
                                    const PlantState& start, const PidMemory& memory) {
  const CostSpec spec{sc.criterion, sc.n_horizon, CostForm::rolling};
  const RolloutOptions options = rollout_options(sc);
  const double y_r = sc.y_r;
  return [model, start, memory, spec, options, y_r](const PidGains& k) {
    const RolloutResult r = rollout(model, k, memory, start, y_r, spec.horizon, options);
    if (r.diverged() || static_cast<int>(r.trajectory.size()) != spec.horizon) {
      return kDivergencePenalty;
    }
    return rolling_cost(r.trajectory.errors(0, static_cast<std::size_t>(spec.horizon)),
                        start.k, spec);
  };
}

Objective make_canonical_objective(const Scenario& sc) {
  const CostSpec spec{sc.criterion, sc.n_horizon, CostForm::canonical};
  const RolloutOptions options = rollout_options(sc);
  const PlantModel model = sc.plant;
  const double y_r = sc.y_r;
  return [model, spec, options, y_r](const PidGains& k) {
    // one extra sample so the window holds e(1..N)
    const RolloutResult r = rollout(model, k, PidMemory{}, {model.x0, 0}, y_r,
                                    spec.horizon + 1, options);
    if (r.diverged() || static_cast<int>(r.trajectory.size()) != spec.horizon + 1) {
      return kDivergencePenalty;
    }
    return canonical_cost(r.trajectory.errors(1, static_cast<std::size_t>(spec.horizon)),
                          spec);
  };
}

bool check_termination(const PidGains& prev, const PidGains& curr, double e_now,
                       const Scenario& sc) {
  return max_abs_diff(prev, curr) <= sc.term_k_tol && std::abs(e_now) <= sc.term_e_tol;
}

RunResult run_canonical(const Scenario& sc) {
  validate_scenario(sc);
  const OptResult tuned =
      multistart(make_canonical_objective(sc), sc.k0, sc.bounds, optimizer_settings(sc));

  const int steps = sc.s_max * sc.m_sample;
  const RolloutResult sim = rollout(sc.plant, tuned.k_star, PidMemory{},
                                    {sc.plant.x0, 0}, sc.y_r, steps, rollout_options(sc));

  RunResult out;
  out.applied_gains = {tuned.k_star};
  out.trajectory = sim.trajectory;
  if (sim.diverged()) {
    out.terminated_by = Termination::divergence;
    return out;
  }
  out.terminated_by = Termination::s_max;

  RollingRecord record;
  record.s = 1;
  record.gains = tuned.k_star;
  record.j_value = tuned.j_star;
  const auto m = static_cast<std::size_t>(sc.m_sample);
  if (out.trajectory.size() > m) {
    record.x_at = out.trajectory.samples[m].x;
    record.y_at = out.trajectory.samples[m].y;
  } else {
    record.x_at = sim.final_state.x;
    record.y_at = output_at(sc, sim.final_state, sim.final_memory.u_prev);
  }
  out.records.push_back(std::move(record));
  return out;
}

RunResult run_rolling_exact(const Scenario& sc) {
  if (sc.mode != RunMode::rolling_exact) {
    throw std::invalid_argument("run_rolling_exact: scenario mode mismatch");
  }
  return run_rolling(sc, /*use_sysid=*/false);
}

RunResult run_rolling_sysid(const Scenario& sc) {
  if (sc.mode != RunMode::rolling_sysid) {
    throw std::invalid_argument("run_rolling_sysid: scenario mode mismatch");
  }
  return run_rolling(sc, /*use_sysid=*/true);
}

RunResult run_scenario(const Scenario& sc) {
  switch (sc.mode) {
    case RunMode::canonical:      return run_canonical(sc);
    case RunMode::rolling_exact:  return run_rolling_exact(sc);
    case RunMode::rolling_sysid:  return run_rolling_sysid(sc);
  }
  throw std::invalid_argument("unknown run mode");
}

std::string_view mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::canonical:      return "canonical";
    case RunMode::rolling_exact:  return "rolling_exact";
    case RunMode::rolling_sysid:  return "rolling_sysid";
  }
  return "canonical";
}

std::optional<RunMode> mode_from_name(std::string_view name) {
  if (name == "canonical")      return RunMode::canonical;
  if (name == "rolling_exact")  return RunMode::rolling_exact;
  if (name == "rolling_sysid")  return RunMode::rolling_sysid;
  return std::nullopt;
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::gain_fixed_point: return "gain_fixed_point";
    case Termination::s_max:            return "s_max";
    case Termination::divergence:       return "divergence";
  }
  return "s_max";
}

}  // namespace rpid
