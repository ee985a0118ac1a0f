#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "rpid/controller.hpp"

namespace rpid {

/// Box bounds on the gain vector.
struct Bounds {
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{10.0, 10.0, 10.0};

  bool valid() const;
  bool contains(const PidGains& k, double slack = 0.0) const;
  PidGains clip(const PidGains& k) const;
};

enum class OptMethod {
  projected_newton,  // projected BFGS with Armijo backtracking (smooth costs)
  nelder_mead,       // box-clipped simplex search (iae/itae)
};

struct OptSettings {
  double gtol = 1e-6;        // projected-gradient infinity-norm tolerance
  int max_iters = 200;
  int max_evals = 5000;
  double fd_step = 1e-6;     // relative finite-difference step
  int n_starts = 1;
  std::uint64_t seed = 0;
  OptMethod method = OptMethod::projected_newton;
};

struct OptResult {
  PidGains k_star;
  double j_star = 0.0;
  int iterations = 0;
  bool converged = false;
  int evals = 0;
  /// Objective values of accepted iterates, starting at the initial point.
  std::vector<double> j_history;
};

using Objective = std::function<double(const PidGains&)>;

/// Central-difference gradient with per-component step h*max(1, |k_i|),
/// falling back to a one-sided difference when a bound is active.
std::array<double, 3> finite_diff_gradient(const Objective& objective,
                                           const PidGains& k, double h,
                                           const Bounds& bounds);

/// Local bound-constrained minimization from k_init. Every evaluated point
/// lies inside the bounds and the accepted objective values are
/// non-increasing; the result never exceeds the objective at k_init.
OptResult optimize_gains(const Objective& objective, const PidGains& k_init,
                         const Bounds& bounds, const OptSettings& settings = {});

/// Best of optimize_gains over k_init plus (n_starts - 1) seeded uniform
/// points in the box. Deterministic for a fixed seed; ties go to the
/// earliest start. The returned evals counts all starts.
OptResult multistart(const Objective& objective, const PidGains& k_init,
                     const Bounds& bounds, const OptSettings& settings = {});

}  // namespace rpid
