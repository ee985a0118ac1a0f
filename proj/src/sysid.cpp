#include "rpid/sysid.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace rpid {

std::array<double, 7> LinearModel::flat() const {
  return {a[0][0], a[0][1], a[1][0], a[1][1], b1, c[0], c[1]};
}

namespace {

struct RowFit {
  Eigen::VectorXd coeffs;
  bool rank_deficient = false;
  double residual = 0.0;
};

// Rank-revealing least squares; rank-deficient systems get the
// minimum-norm solution.
RowFit solve_row(const Eigen::MatrixXd& regressors, const Eigen::VectorXd& target) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(regressors);
  RowFit fit;
  fit.coeffs = cod.solve(target);
  fit.rank_deficient = cod.rank() < regressors.cols();
  fit.residual = (regressors * fit.coeffs - target).squaredNorm();
  return fit;
}

}  // namespace

FitResult fit_linear_model(const SampleWindow& window) {
  const auto m = static_cast<Eigen::Index>(window.size());
  if (m < 4) {
    throw std::invalid_argument("fit_linear_model: need at least 4 samples, got " +
                                std::to_string(window.size()));
  }

  Eigen::MatrixXd states(m, 2), states_u(m, 3);
  Eigen::VectorXd x1_next(m), x2_next(m), outputs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const WindowSample& s = window[static_cast<std::size_t>(i)];
    for (double v : {s.x[0], s.x[1], s.u, s.x_next[0], s.x_next[1], s.y}) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("fit_linear_model: non-finite sample data");
      }
    }
    states(i, 0) = s.x[0];
    states(i, 1) = s.x[1];
    states_u(i, 0) = s.x[0];
    states_u(i, 1) = s.x[1];
    states_u(i, 2) = s.u;
    x1_next(i) = s.x_next[0];
    x2_next(i) = s.x_next[1];
    outputs(i) = s.y;
  }

  const RowFit row_a1 = solve_row(states, x1_next);
  const RowFit row_a2 = solve_row(states_u, x2_next);
  const RowFit row_c = solve_row(states, outputs);

  FitResult result;
  result.model.a[0][0] = row_a1.coeffs(0);
  result.model.a[0][1] = row_a1.coeffs(1);
  result.model.a[1][0] = row_a2.coeffs(0);
  result.model.a[1][1] = row_a2.coeffs(1);
  result.model.b1 = row_a2.coeffs(2);
  result.model.c[0] = row_c.coeffs(0);
  result.model.c[1] = row_c.coeffs(1);
  result.rank_deficient =
      row_a1.rank_deficient || row_a2.rank_deficient || row_c.rank_deficient;
  result.residual = row_a1.residual + row_a2.residual + row_c.residual;
  return result;
}

std::array<double, 2> linear_step(const LinearModel& model,
                                  const std::array<double, 2>& x_hat, double u) {
  return {model.a[0][0] * x_hat[0] + model.a[0][1] * x_hat[1],
          model.a[1][0] * x_hat[0] + model.a[1][1] * x_hat[1] + model.b1 * u};
}

double linear_output(const LinearModel& model, const std::array<double, 2>& x_hat) {
  return model.c[0] * x_hat[0] + model.c[1] * x_hat[1];
}

PlantModel make_surrogate_plant(const LinearModel& model, StateVector x0) {
  if (x0.size() != 2) {
    throw std::invalid_argument("surrogate plant needs a 2-dimensional state");
  }
  PlantModel plant;
  plant.state_dim = 2;
  const auto flat = model.flat();
  plant.params.assign(flat.begin(), flat.end());
  plant.x0 = std::move(x0);
  plant.transition = [](int, const StateVector& x, double u,
                        const std::vector<double>& p) -> StateVector {
    return {p[0] * x[0] + p[1] * x[1], p[2] * x[0] + p[3] * x[1] + p[4] * u};
  };
  plant.output = [](int, const StateVector& x, double,
                    const std::vector<double>& p) -> double {
    return p[5] * x[0] + p[6] * x[1];
  };
  return plant;
}

}  // namespace rpid
