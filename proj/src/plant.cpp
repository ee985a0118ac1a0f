#include "rpid/plant.hpp"

#include <cmath>
#include <stdexcept>

namespace rpid {

std::array<double, 2> example_plant_step(const std::array<double, 2>& x, double u,
                                         const std::array<double, 4>& theta) {
  return {theta[0] * x[0] * x[1], theta[1] * x[0] * x[0] + u};
}

double example_plant_output(const std::array<double, 2>& x,
                            const std::array<double, 4>& theta) {
  return theta[2] * x[1] - theta[3] * x[0] * x[0];
}

PlantModel make_example_plant(const std::array<double, 4>& theta, StateVector x0) {
  if (x0.size() != 2) {
    throw std::invalid_argument("example plant needs a 2-dimensional initial state");
  }
  PlantModel plant;
  plant.state_dim = 2;
  plant.params.assign(theta.begin(), theta.end());
  plant.x0 = std::move(x0);
  plant.transition = [](int, const StateVector& x, double u,
                        const std::vector<double>& p) -> StateVector {
    const auto next = example_plant_step({x[0], x[1]}, u, {p[0], p[1], p[2], p[3]});
    return {next[0], next[1]};
  };
  plant.output = [](int, const StateVector& x, double,
                    const std::vector<double>& p) -> double {
    return example_plant_output({x[0], x[1]}, {p[0], p[1], p[2], p[3]});
  };
  return plant;
}

std::vector<double> Trajectory::errors(std::size_t first, std::size_t count) const {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = first; i < first + count && i < samples.size(); ++i) {
    out.push_back(samples[i].e);
  }
  return out;
}

namespace {

bool bad(double v, double cap) { return !std::isfinite(v) || std::abs(v) > cap; }

bool bad_state(const StateVector& x, double cap) {
  for (double v : x) {
    if (bad(v, cap)) return true;
  }
  return false;
}

}  // namespace

RolloutResult rollout(const PlantModel& plant, const PidGains& gains,
                      const PidMemory& memory, const PlantState& start,
                      double y_r, int steps, const RolloutOptions& options) {
  if (steps < 1) throw std::invalid_argument("rollout: steps must be >= 1");
  if (static_cast<int>(start.x.size()) != plant.state_dim) {
    throw std::invalid_argument("rollout: state dimension mismatch");
  }

  RolloutResult result;
  result.trajectory.samples.reserve(static_cast<std::size_t>(steps));

  StateVector x = start.x;
  int k = start.k;
  PidMemory mem = memory;
  const double cap = options.magnitude_cap;

  if (bad_state(x, cap)) {
    result.final_state = {std::move(x), k};
    result.final_memory = mem;
    result.diverged_at = k;
    return result;
  }

  for (int i = 0; i < steps; ++i) {
    // Plants with direct feedthrough see the most recent control.
    const double y = plant.output(k, x, mem.u_prev, plant.params);
    if (bad(y, cap)) {
      result.diverged_at = k;
      break;
    }
    const double e = error(y_r, y);
    const PidOutput ctrl = pid_apply(options.law, gains, mem, e);
    if (bad(ctrl.u, cap)) {
      result.diverged_at = k;
      break;
    }
    result.trajectory.samples.push_back({k, x, ctrl.u, y, e});
    mem = ctrl.memory;

    StateVector x_next = plant.transition(k, x, ctrl.u, plant.params);
    x = std::move(x_next);
    ++k;
    if (bad_state(x, cap)) {
      result.diverged_at = k;
      break;
    }
  }

  result.final_state = {std::move(x), k};
  result.final_memory = mem;
  return result;
}

}  // namespace rpid
