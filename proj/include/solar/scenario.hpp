#pragma once

#include <string>
#include <vector>

#include "solar/generation.hpp"
#include "solar/premium.hpp"

namespace solar {

/// One representative operation period.
struct PeriodProfile {
  std::string name;
  double load = 1.0;           // L_t, energy per period (GWh)
  double utility_price = 1.0;  // pi_u_t, $/kWh
  GenerationDistribution generation;
  double weight = 1.0;  // number of real periods this one stands for
};

/// A full problem instance. Periods carry weights; the planning window holds
/// T = sum of weights periods and each one contributes t_tilde * weight / T of
/// the lifetime revenue.
struct Scenario {
  std::vector<PeriodProfile> periods;
  PremiumDistribution premium;
  double pi0 = 1.0;      // capital and installation cost, $/kW
  double t_tilde = 1.0;  // lifetime scaling of one planning window
  double c_bar = 1.0;    // individual panel size (kW); inert in the non-atomic limit
  std::vector<std::string> provenance;

  /// Throws InvalidArgument when an invariant is broken.
  void validate() const;

  double total_weight() const;
  /// t_tilde * weight_t / T, the lifetime multiplier of one period's expectation.
  double period_share(std::size_t t) const;
  double epsilon() const noexcept { return premium.epsilon(); }

  Scenario with_epsilon(double epsilon) const;
  Scenario with_pi0(double pi0) const;
};

}  // namespace solar
