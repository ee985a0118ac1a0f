#include "rpid/optimizer.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rpid {

bool Bounds::valid() const {
  for (int i = 0; i < 3; ++i) {
    if (!(lo[i] <= hi[i])) return false;
  }
  return true;
}

bool Bounds::contains(const PidGains& k, double slack) const {
  for (std::size_t i = 0; i < 3; ++i) {
    if (k[i] < lo[i] - slack || k[i] > hi[i] + slack) return false;
  }
  return true;
}

PidGains Bounds::clip(const PidGains& k) const {
  PidGains out = k;
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = std::clamp(out[i], lo[i], hi[i]);
  }
  return out;
}

namespace {

struct BudgetExhausted {};

// Objective wrapper enforcing the evaluation budget.
struct Evaluator {
  const Objective& f;
  int max_evals;
  int count = 0;

  double operator()(const PidGains& k) {
    if (count >= max_evals) throw BudgetExhausted{};
    ++count;
    const double v = f(k);
    if (!std::isfinite(v)) {
      throw std::invalid_argument("optimize_gains: objective returned a non-finite value");
    }
    return v;
  }
};

template <typename F>
std::array<double, 3> fd_gradient(F&& f, const PidGains& k, double h,
                                  const Bounds& bounds) {
  std::array<double, 3> g{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < 3; ++i) {
    const double step = h * std::max(1.0, std::abs(k[i]));
    PidGains up = k, down = k;
    up[i] = std::min(k[i] + step, bounds.hi[i]);
    down[i] = std::max(k[i] - step, bounds.lo[i]);
    const double span = up[i] - down[i];
    if (span <= 0.0) continue;  // degenerate box dimension
    g[i] = (f(up) - f(down)) / span;
  }
  return g;
}

double inf_norm(const std::array<double, 3>& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

double projected_gradient_norm(const PidGains& x, const std::array<double, 3>& g,
                               const Bounds& bounds) {
  PidGains moved = x;
  for (std::size_t i = 0; i < 3; ++i) moved[i] -= g[i];
  moved = bounds.clip(moved);
  return max_abs_diff(x, moved);
}

constexpr double kStepCollapse = 1e-12;
constexpr double kArmijo = 1e-4;

OptResult projected_bfgs(const Objective& objective, const PidGains& k_init,
                         const Bounds& bounds, const OptSettings& s) {
  Evaluator eval{objective, std::max(1, s.max_evals)};

  OptResult result;
  PidGains x = bounds.clip(k_init);
  double fx = 0.0;
  int iter = 0;
  bool converged = false;

  // Dimensions pinned at a bound with the gradient pushing outward take a
  // plain gradient direction; the quasi-Newton model only drives the free
  // subspace (two-metric projection). The model restarts whenever the
  // active set changes, since curvature gathered on one face does not
  // transfer to another.
  auto active_set = [&bounds](const PidGains& p, const std::array<double, 3>& grad) {
    std::array<bool, 3> act{};
    for (std::size_t i = 0; i < 3; ++i) {
      act[i] = (p[i] <= bounds.lo[i] && grad[i] > 0.0) ||
               (p[i] >= bounds.hi[i] && grad[i] < 0.0);
    }
    return act;
  };
  constexpr std::array<std::array<double, 3>, 3> kIdentity{
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  try {
    fx = eval(x);
    result.j_history.push_back(fx);

    std::array<std::array<double, 3>, 3> H = kIdentity;
    std::array<double, 3> g = fd_gradient(eval, x, s.fd_step, bounds);
    std::array<bool, 3> active = active_set(x, g);

    while (iter < s.max_iters) {
      assert(bounds.contains(x, 1e-15));
      if (projected_gradient_norm(x, g, bounds) <= s.gtol) {
        converged = true;
        break;
      }
      ++iter;

      std::array<double, 3> d{};
      for (int r = 0; r < 3; ++r) {
        if (active[r]) {
          d[r] = -g[r];
          continue;
        }
        for (int c = 0; c < 3; ++c) {
          if (!active[c]) d[r] -= H[r][c] * g[c];
        }
      }
      const std::array<double, 3> steepest{-g[0], -g[1], -g[2]};
      if (d[0] * g[0] + d[1] * g[1] + d[2] * g[2] >
          -1e-12 * inf_norm(d) * inf_norm(g)) {
        d = steepest;  // quasi-Newton direction unusable
      }

      // Armijo backtracking along the projected path; a nonnegative
      // linearized change (a fully clipped move) never counts as decrease.
      PidGains x_new = x;
      double f_new = fx;
      auto line_search = [&](const std::array<double, 3>& dir) {
        for (double t = 1.0; t >= kStepCollapse; t *= 0.5) {
          PidGains cand = x;
          for (std::size_t i = 0; i < 3; ++i) cand[i] += t * dir[i];
          cand = bounds.clip(cand);
          if (max_abs_diff(cand, x) == 0.0) continue;
          double gs = 0.0;
          for (std::size_t i = 0; i < 3; ++i) gs += g[i] * (cand[i] - x[i]);
          if (gs >= 0.0) continue;
          const double fc = eval(cand);
          if (fc <= fx + kArmijo * gs) {
            x_new = cand;
            f_new = fc;
            return true;
          }
        }
        return false;
      };
      bool accepted = line_search(d);
      if (!accepted && d != steepest) {
        H = kIdentity;
        accepted = line_search(steepest);
      }
      if (!accepted || max_abs_diff(x_new, x) <= kStepCollapse) {
        converged = true;  // step size collapsed
        break;
      }

      const PidGains x_old = x;
      const std::array<double, 3> g_old = g;
      x = x_new;
      fx = f_new;
      result.j_history.push_back(fx);

      g = fd_gradient(eval, x, s.fd_step, bounds);
      const std::array<bool, 3> next_active = active_set(x, g);

      if (next_active != active) {
        H = kIdentity;
      } else {
        std::array<double, 3> sv{}, yv{};
        for (std::size_t i = 0; i < 3; ++i) {
          sv[i] = x[i] - x_old[i];
          yv[i] = g[i] - g_old[i];
        }
        const double sy = sv[0] * yv[0] + sv[1] * yv[1] + sv[2] * yv[2];
        if (sy > 1e-12) {  // skip update when curvature is lost
          const double rho = 1.0 / sy;
          std::array<std::array<double, 3>, 3> A{};  // I - rho * s * y^T
          for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
              A[r][c] = (r == c ? 1.0 : 0.0) - rho * sv[r] * yv[c];
            }
          }
          std::array<std::array<double, 3>, 3> AH{}, next{};
          for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
              AH[r][c] = A[r][0] * H[0][c] + A[r][1] * H[1][c] + A[r][2] * H[2][c];
            }
          }
          for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
              next[r][c] = AH[r][0] * A[c][0] + AH[r][1] * A[c][1] +
                           AH[r][2] * A[c][2] + rho * sv[r] * sv[c];
            }
          }
          H = next;
        }
      }
      active = next_active;
    }
  } catch (const BudgetExhausted&) {
    converged = false;  // caps return the best point found so far
  }

  result.k_star = x;
  result.j_star = fx;
  result.iterations = iter;
  result.converged = converged;
  result.evals = eval.count;
  return result;
}

struct Vertex {
  PidGains x;
  double f = 0.0;
};

double simplex_diameter(const std::array<Vertex, 4>& v) {
  double d = 0.0;
  for (int i = 1; i < 4; ++i) d = std::max(d, max_abs_diff(v[0].x, v[i].x));
  return d;
}

constexpr double kSimplexTol = 1e-8;

// Box-clipped Nelder-Mead with shrinking restarts around the incumbent,
// for the non-smooth iae/itae objectives.
OptResult nelder_mead(const Objective& objective, const PidGains& k_init,
                      const Bounds& bounds, const OptSettings& s) {
  Evaluator eval{objective, std::max(1, s.max_evals)};

  OptResult result;
  PidGains best_x = bounds.clip(k_init);
  double best_f = 0.0;
  int iter = 0;
  bool converged = false;

  try {
    best_f = eval(best_x);
    result.j_history.push_back(best_f);

    double scale = 0.1;
    for (int restart = 0; restart < 12 && iter < s.max_iters; ++restart) {
      std::array<Vertex, 4> v;
      v[0] = {best_x, best_f};
      for (std::size_t i = 1; i < 4; ++i) {
        PidGains p = best_x;
        const std::size_t dim = i - 1;
        const double span = bounds.hi[dim] - bounds.lo[dim];
        double step = scale * (span > 0.0 ? span : 1.0);
        if (p[dim] + step > bounds.hi[dim]) step = -step;
        p[dim] = std::clamp(p[dim] + step, bounds.lo[dim], bounds.hi[dim]);
        v[i] = {p, eval(p)};
      }

      auto track_best = [&] {
        std::stable_sort(v.begin(), v.end(),
                         [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        if (v[0].f < best_f) {
          best_f = v[0].f;
          best_x = v[0].x;
          result.j_history.push_back(best_f);
        }
      };

      track_best();
      double diam = simplex_diameter(v);
      while (diam > kSimplexTol && iter < s.max_iters) {
        ++iter;

        PidGains centroid{0.0, 0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
          for (std::size_t d = 0; d < 3; ++d) centroid[d] += v[i].x[d] / 3.0;
        }
        auto along = [&](double coef) {
          PidGains p;
          for (std::size_t d = 0; d < 3; ++d) {
            p[d] = centroid[d] + coef * (centroid[d] - v[3].x[d]);
          }
          return bounds.clip(p);
        };

        const PidGains xr = along(1.0);
        const double fr = eval(xr);
        if (fr < v[0].f) {
          const PidGains xe = along(2.0);
          const double fe = eval(xe);
          v[3] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr < v[2].f) {
          v[3] = {xr, fr};
        } else {
          const PidGains xc = along(fr < v[3].f ? 0.5 : -0.5);
          const double fc = eval(xc);
          if (fc < std::min(fr, v[3].f)) {
            v[3] = {xc, fc};
          } else {
            for (int i = 1; i < 4; ++i) {  // shrink toward the best vertex
              PidGains p;
              for (std::size_t d = 0; d < 3; ++d) {
                p[d] = v[0].x[d] + 0.5 * (v[i].x[d] - v[0].x[d]);
              }
              v[i] = {p, eval(p)};
            }
          }
        }
        track_best();
        diam = simplex_diameter(v);
      }

      converged = diam <= kSimplexTol;
      if (converged && restart > 0) break;  // a re-inflated simplex confirmed it
      scale *= 0.2;
    }
  } catch (const BudgetExhausted&) {
    converged = false;
  }

  result.k_star = best_x;
  result.j_star = best_f;
  result.iterations = iter;
  result.converged = converged;
  result.evals = eval.count;
  return result;
}

}  // namespace

std::array<double, 3> finite_diff_gradient(const Objective& objective,
                                           const PidGains& k, double h,
                                           const Bounds& bounds) {
  return fd_gradient(objective, k, h, bounds);
}

OptResult optimize_gains(const Objective& objective, const PidGains& k_init,
                         const Bounds& bounds, const OptSettings& settings) {
  if (!bounds.valid()) throw std::invalid_argument("optimize_gains: lo > hi");
  switch (settings.method) {
    case OptMethod::nelder_mead:
      return nelder_mead(objective, k_init, bounds, settings);
    case OptMethod::projected_newton:
    default:
      return projected_bfgs(objective, k_init, bounds, settings);
  }
}

OptResult multistart(const Objective& objective, const PidGains& k_init,
                     const Bounds& bounds, const OptSettings& settings) {
  const int n = std::max(1, settings.n_starts);
  std::mt19937_64 rng(settings.seed);
  // top 53 bits -> uniform double in [0, 1); avoids the
  // implementation-defined std::uniform_real_distribution
  auto uniform01 = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  OptResult best;
  int total_evals = 0;
  for (int i = 0; i < n; ++i) {
    PidGains start = k_init;
    if (i > 0) {
      for (std::size_t d = 0; d < 3; ++d) {
        start[d] = bounds.lo[d] + (bounds.hi[d] - bounds.lo[d]) * uniform01();
      }
    }
    OptResult r = optimize_gains(objective, start, bounds, settings);
    total_evals += r.evals;
    if (i == 0 || r.j_star < best.j_star) {
      best = std::move(r);
    }
  }
  best.evals = total_evals;
  return best;
}

}  // namespace rpid
