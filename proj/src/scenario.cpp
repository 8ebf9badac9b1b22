#include "solar/scenario.hpp"

#include <cmath>

#include "solar/errors.hpp"

namespace solar {

void Scenario::validate() const {
  if (periods.empty()) {
    throw InvalidArgument("scenario needs at least one operation period");
  }
  if (!(pi0 > 0.0) || !std::isfinite(pi0)) {
    throw InvalidArgument("pi0 must be positive and finite");
  }
  if (!(t_tilde > 0.0) || !std::isfinite(t_tilde)) {
    throw InvalidArgument("t_tilde must be positive and finite");
  }
  if (!(c_bar > 0.0)) {
    throw InvalidArgument("c_bar must be positive");
  }
  for (const auto& p : periods) {
    if (!(p.load > 0.0) || !std::isfinite(p.load)) {
      throw InvalidArgument("period '" + p.name + "': load must be positive");
    }
    if (!(p.utility_price > 0.0) || !std::isfinite(p.utility_price)) {
      throw InvalidArgument("period '" + p.name + "': utility price must be positive");
    }
    if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) {
      throw InvalidArgument("period '" + p.name + "': weight must be non-negative");
    }
  }
  if (!(total_weight() > 0.0)) {
    throw InvalidArgument("period weights must not all be zero");
  }
}

double Scenario::total_weight() const {
  double total = 0.0;
  for (const auto& p : periods) {
    total += p.weight;
  }
  return total;
}

double Scenario::period_share(std::size_t t) const {
  return t_tilde * periods.at(t).weight / total_weight();
}

Scenario Scenario::with_epsilon(double epsilon) const {
  Scenario out = *this;
  out.premium = premium.with_epsilon(epsilon);
  return out;
}

Scenario Scenario::with_pi0(double value) const {
  Scenario out = *this;
  out.pi0 = value;
  return out;
}

}  // namespace solar
