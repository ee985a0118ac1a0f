#pragma once

#include <array>
#include <vector>

#include "rpid/plant.hpp"

namespace rpid {

/// Identified linear surrogate
///   x^(k+1) = A x^(k) + B u(k),  y^(k) = C x^(k)
/// with the structural constraint B = [0; b1]; the first entry is never
/// estimated.
struct LinearModel {
  std::array<std::array<double, 2>, 2> a{{{0.0, 0.0}, {0.0, 0.0}}};
  double b1 = 0.0;
  std::array<double, 2> c{0.0, 0.0};

  /// Serialization order [a11, a12, a21, a22, b1, c1, c2].
  std::array<double, 7> flat() const;
};

/// One measured transition: state, applied control, successor state, and
/// the output observed at the same step.
struct WindowSample {
  std::array<double, 2> x{};
  double u = 0.0;
  std::array<double, 2> x_next{};
  double y = 0.0;
};

using SampleWindow = std::vector<WindowSample>;

struct FitResult {
  LinearModel model;
  bool rank_deficient = false;  // minimum-norm solution was used somewhere
  double residual = 0.0;        // summed squared residual over the window
};

/// Least-squares fit of the surrogate over the window, minimizing
///   sum ||x_next - A x - B u||^2 + |y - C x|^2.
/// The objective separates into three row regressions ((a11,a12),
/// (a21,a22,b1), (c1,c2)), each solved by a rank-revealing orthogonal
/// factorization. Needs at least 4 samples.
FitResult fit_linear_model(const SampleWindow& window);

std::array<double, 2> linear_step(const LinearModel& model,
                                  const std::array<double, 2>& x_hat, double u);

double linear_output(const LinearModel& model, const std::array<double, 2>& x_hat);

/// The surrogate wrapped as a PlantModel (params = flat()) so the standard
/// rollout drives it.
PlantModel make_surrogate_plant(const LinearModel& model, StateVector x0);

}  // namespace rpid
