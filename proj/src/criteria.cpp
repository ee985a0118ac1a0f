#include "rpid/criteria.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace rpid {

namespace {

double weighted_sum(std::span<const double> errors, Criterion c) {
  double total = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double e = errors[i];
    const double w = static_cast<double>(i + 1);
    switch (c) {
      case Criterion::ise:  total += e * e; break;
      case Criterion::itse: total += w * e * e; break;
      case Criterion::iae:  total += std::abs(e); break;
      case Criterion::itae: total += w * std::abs(e); break;
    }
  }
  return total;
}

void require_length(std::span<const double> errors, const CostSpec& spec) {
  if (static_cast<int>(errors.size()) != spec.horizon) {
    throw std::invalid_argument("cost: error window length " +
                                std::to_string(errors.size()) +
                                " does not match horizon " +
                                std::to_string(spec.horizon));
  }
}

}  // namespace

double canonical_cost(std::span<const double> errors, const CostSpec& spec) {
  require_length(errors, spec);
  return weighted_sum(errors, spec.criterion);
}

double rolling_cost(std::span<const double> errors, int /*window_start*/, const CostSpec& spec) {
  require_length(errors, spec);
  // weights depend only on position within the window
  return weighted_sum(errors, spec.criterion);
}

std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::ise:  return "ise";
    case Criterion::itse: return "itse";
    case Criterion::iae:  return "iae";
    case Criterion::itae: return "itae";
  }
  return "ise";
}

std::optional<Criterion> criterion_from_name(std::string_view name) {
  if (name == "ise")  return Criterion::ise;
  if (name == "itse") return Criterion::itse;
  if (name == "iae")  return Criterion::iae;
  if (name == "itae") return Criterion::itae;
  return std::nullopt;
}

}  // namespace rpid
