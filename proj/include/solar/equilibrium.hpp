#pragma once

#include "solar/market_clearing.hpp"
#include "solar/scenario.hpp"

namespace solar {

struct SolverOptions {
  double rel_tol = 1e-9;  // on capacities
  int max_iterations = 400;
  /// Points of the diagnostic grid used to flag non-monotone revenue curves.
  int monotone_grid = 24;
};

struct EquilibriumResult {
  Mechanism mechanism = Mechanism::srt;
  double capacity = 0.0;
  /// Lifetime profit minus cost at the solution. When the mechanism is not
  /// viable this is the profit gap of the first infinitesimal unit.
  double residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  bool viable = true;
  bool converged = true;
  /// False when the per-unit revenue rose somewhere on the diagnostic grid,
  /// in which case the root may not be unique.
  bool monotone = true;
};

/// Optimal way to split a realization among buyers.
struct AllocationRule {
  double threshold_premium = 0.0;  // lowest premium that is served
  double max_avg_premium = 0.0;    // v*(c, g): premium mass of the served buyers
};

struct Viability {
  bool viable = false;
  /// Lifetime revenue of the first unit minus pi0; negative when not viable.
  double margin = 0.0;
};

/// Long-term capacity at which the marginal investor breaks even.
/// Throws ConvergenceError when no bracket is found below 1e9.
EquilibriumResult solve_ne(const Scenario& s, Mechanism m, const SolverOptions& options = {});

/// Welfare-maximizing capacity. Shares the prt solver, so the two coincide.
EquilibriumResult solve_social_optimum(const Scenario& s, const SolverOptions& options = {});

AllocationRule optimal_allocation(const Scenario& s, std::size_t period, double c, double g);

/// Expected consumer plus investor surplus over the lifetime, net of
/// installation cost.
double welfare(const Scenario& s, double c);

/// Whether installing is attractive at all under the single-product market:
/// pi0 <= sum_t share_t pi_u_t E[G_t].
Viability check_viability(const Scenario& s);

/// Expected lifetime revenue of aggregate capacity c under mechanism m (opt
/// uses the prt revenue).
double expected_revenue(const Scenario& s, Mechanism m, double c);

/// expected_revenue(c) - pi0 c.
double zero_profit_residual(const Scenario& s, Mechanism m, double c);

}  // namespace solar
