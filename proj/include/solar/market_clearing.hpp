#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "solar/scenario.hpp"

namespace solar {

/// Market mechanisms plus the welfare benchmark, which shares the result type.
enum class Mechanism { srt, prt, cb, opt };

std::string_view to_string(Mechanism m) noexcept;
/// Throws InvalidArgument for unknown names.
Mechanism parse_mechanism(std::string_view name);

enum class Regime { abundant, limited };
std::string_view to_string(Regime r) noexcept;

/// Competitive equilibrium of a real-time market for one realization of G.
struct ClearingOutcome {
  Mechanism mechanism = Mechanism::srt;
  Regime regime = Regime::limited;
  double price = 0.0;            // $/kWh
  double seller_quantity = 0.0;  // energy sold by the (unit mass of) sellers
  /// Lowest premium that is served under prt limited supply; buyers at or
  /// above it take their whole load from solar. Empty in other cases.
  std::optional<double> buyer_threshold;
  double served_fraction = 0.0;  // share of the load met by solar
};

/// Ex-ante clearing of the contract-based capacity market.
struct CbClearing {
  double price = 0.0;            // rental price per kW for the planning window
  double seller_quantity = 0.0;  // every seller rents out its full capacity
  double demand_residual = 0.0;  // aggregate demand at the price minus capacity
  int iterations = 0;
};

/// Cap on individual contract demand; the sup-based inverse is unbounded on
/// flat stretches of the valuation curve.
inline constexpr double kDemandCap = 1e6;

/// Table-I outcome for period `period` at capacity c and realization g.
/// Supply equal to the load counts as limited.
ClearingOutcome clear_rt(const Scenario& s, std::size_t period, Mechanism m, double c, double g);

/// Expected lifetime seller revenue under srt or prt at aggregate capacity c.
double revenue_rt(const Scenario& s, Mechanism m, double c);
/// Revenue per unit of capacity. At c = 0 this is the c -> 0+ limit.
double unit_revenue_rt(const Scenario& s, Mechanism m, double c);

/// Expected valuation of one unit of rented capacity over the planning
/// window, for a buyer with premium v, as a function of the rented amount d:
/// sum_t weight_t (pi_u_t + v) mu_t(d).
double contract_valuation(const Scenario& s, double v, double d);

/// Capacity a buyer with premium v rents at price pi (extended inverse of the
/// valuation curve; 0 above the choke price).
double individual_demand_cb(const Scenario& s, double v, double pi);
/// Integral of individual demand over the premium distribution.
double aggregate_demand_cb(const Scenario& s, double pi);
/// Highest price at which some buyer still rents capacity.
double choke_price_cb(const Scenario& s);

/// Rental price at which aggregate demand equals c. Throws NoEquilibrium when
/// c exceeds demand at price zero and ConvergenceError if the search stalls.
CbClearing clear_cb(const Scenario& s, double c);

/// Contract buyer payoff: v E min(qG, L) - pi q - pi_u E (L - qG)+, summed
/// over weighted periods.
double buyer_payoff_cb(const Scenario& s, double v, double q, double pi);

struct VerifyOptions {
  std::size_t samples = 1000;
  std::size_t deviation_grid = 201;
  std::size_t premium_grid = 51;
  std::uint64_t seed = 7;
  double tolerance = 1e-6;
  /// Relative shift applied to the equilibrium price before checking; a
  /// non-zero value must be detected as a broken equilibrium.
  double price_perturbation = 0.0;
};

struct VerificationReport {
  Mechanism mechanism = Mechanism::prt;
  double capacity = 0.0;
  std::size_t samples = 0;
  std::size_t limited_samples = 0;
  std::size_t abundant_samples = 0;
  double max_buyer_gain = 0.0;
  double max_seller_gain = 0.0;
  double max_clearing_residual = 0.0;
  double max_violation = 0.0;
  std::optional<double> cb_price;
  bool passed = false;
};

/// Monte-Carlo check of the equilibrium conditions: no buyer type on a
/// premium grid and no seller gains by deviating on a quantity grid, and the
/// market clears. Contract markets clear ex ante, so no realizations are drawn
/// for them.
VerificationReport verify_ce(const Scenario& s, Mechanism m, double c,
                             const VerifyOptions& options = {});

}  // namespace solar
