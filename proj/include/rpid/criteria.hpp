#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace rpid {

/// Integral performance indices. Config names are lowercase: ise, itse, iae, itae.
enum class Criterion { ise, itse, iae, itae };

enum class CostForm { canonical, rolling };

struct CostSpec {
  Criterion criterion = Criterion::ise;
  int horizon = 1;  // N
  CostForm form = CostForm::canonical;
};

/// Canonical index over errors e(1..N):
///   ise  = sum e(k)^2        itse = sum k*e(k)^2
///   iae  = sum |e(k)|        itae = sum k*|e(k)|
/// `errors` holds e(1)..e(N) in order; its length must equal spec.horizon.
double canonical_cost(std::span<const double> errors, const CostSpec& spec);

/// Rolling index over a window e(k..k+N-1) with position weights (j-k+1).
/// Independent of window_start for a fixed error window.
double rolling_cost(std::span<const double> errors, int window_start, const CostSpec& spec);

std::string_view criterion_name(Criterion c);
std::optional<Criterion> criterion_from_name(std::string_view name);

/// Finite stand-in cost for a diverged rollout, keeping optimizer
/// comparisons well-defined.
inline constexpr double kDivergencePenalty = 1e18;

}  // namespace rpid
