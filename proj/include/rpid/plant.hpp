#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "rpid/controller.hpp"

namespace rpid {

using StateVector = std::vector<double>;

/// State vector together with its discrete time index.
struct PlantState {
  StateVector x;
  int k = 0;
};

/// Discrete-time nonlinear plant
///   x(k+1) = transition(k, x(k), u(k), params)
///   y(k)   = output(k, x(k), u, params)
/// Both maps must be deterministic pure functions of their arguments. The
/// time index is passed through even when a concrete plant ignores it.
struct PlantModel {
  int state_dim = 0;
  std::vector<double> params;
  StateVector x0;
  std::function<StateVector(int k, const StateVector& x, double u,
                            const std::vector<double>& params)> transition;
  std::function<double(int k, const StateVector& x, double u,
                       const std::vector<double>& params)> output;
};

/// One step of the two-state example plant:
///   x1' = theta1*x1*x2,  x2' = theta2*x1^2 + u
std::array<double, 2> example_plant_step(const std::array<double, 2>& x, double u,
                                         const std::array<double, 4>& theta);

/// Output map of the example plant: y = theta3*x2 - theta4*x1^2.
double example_plant_output(const std::array<double, 2>& x,
                            const std::array<double, 4>& theta);

/// The example plant wrapped as a PlantModel (n = 2, params = theta).
PlantModel make_example_plant(const std::array<double, 4>& theta,
                              StateVector x0 = {1.0, 1.0});

struct TrajectorySample {
  int k = 0;
  StateVector x;
  double u = 0.0;
  double y = 0.0;
  double e = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  /// Errors of samples [first, first+count), e.g. a cost window.
  std::vector<double> errors(std::size_t first, std::size_t count) const;
};

struct RolloutOptions {
  PidLaw law = PidLaw::place;
  /// Any |state|, |u| or |y| beyond this aborts the rollout as divergent.
  double magnitude_cap = 1e12;
};

struct RolloutResult {
  Trajectory trajectory;
  PlantState final_state;   // state/time to resume from
  PidMemory final_memory;
  /// Step index at which a non-finite or over-cap value appeared.
  std::optional<int> diverged_at;

  bool diverged() const { return diverged_at.has_value(); }
};

/// Closed-loop simulation of plant + PID for `steps` steps starting from
/// `start`. Each step measures y(k), forms e(k) = y_r - y(k), computes u(k)
/// from the selected law, then advances the state. The returned state and
/// memory allow a later call to continue seamlessly.
RolloutResult rollout(const PlantModel& plant, const PidGains& gains,
                      const PidMemory& memory, const PlantState& start,
                      double y_r, int steps, const RolloutOptions& options = {});

}  // namespace rpid
