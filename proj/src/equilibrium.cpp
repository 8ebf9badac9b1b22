#include "solar/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <spdlog/spdlog.h>

#include "solar/errors.hpp"
#include "solar/numerics.hpp"

namespace solar {

namespace {

constexpr double kCapacityCap = 1e9;

// Capacity unit at which the typical period first saturates.
double capacity_scale(const Scenario& s) {
  double scale = std::numeric_limits<double>::infinity();
  for (const auto& p : s.periods) {
    const double m = p.generation.mean();
    if (p.weight > 0.0 && m > 0.0) {
      scale = std::min(scale, p.load / m);
    }
  }
  return std::isfinite(scale) ? scale : 1.0;
}

// Per-unit revenue is non-increasing in c for the real-time markets; flag it
// if the numbers say otherwise.
bool looks_monotone(const Scenario& s, Mechanism m, double root, double scale, int points) {
  if (points < 2) {
    return true;
  }
  const double top = root > 0.0 ? 2.0 * root : scale;
  double previous = unit_revenue_rt(s, m, 0.0);
  for (int k = 1; k <= points; ++k) {
    const double c = top * k / points;
    const double r = unit_revenue_rt(s, m, c);
    if (r > previous + 1e-10 * std::max(1.0, std::abs(previous))) {
      return false;
    }
    previous = r;
  }
  return true;
}

// Shared characterizing-equation solver for the real-time markets and the
// welfare optimum: sup { c : revenue per unit >= pi0 }.
EquilibriumResult solve_real_time(const Scenario& s, Mechanism revenue_kind, Mechanism label,
                                  const SolverOptions& o) {
  s.validate();
  EquilibriumResult out;
  out.mechanism = label;

  const double first_unit = unit_revenue_rt(s, revenue_kind, 0.0);
  if (first_unit < s.pi0) {
    out.viable = false;
    out.capacity = 0.0;
    out.residual = first_unit - s.pi0;
    return out;
  }

  const auto holds = [&](double c) { return unit_revenue_rt(s, revenue_kind, c) - s.pi0 >= 0.0; };
  const double scale = capacity_scale(s);
  const double lo = 1e-9 * scale;
  if (!holds(lo)) {
    out.capacity = 0.0;
    out.bracket_hi = lo;
    out.residual = 0.0;
    return out;
  }
  double hi = scale;
  double last_true = lo;
  while (holds(hi)) {
    last_true = hi;
    if (hi >= kCapacityCap) {
      std::ostringstream msg;
      msg << to_string(label) << ": revenue per unit still covers pi0 = " << s.pi0
          << " at capacity " << hi << "; no bracket below " << kCapacityCap;
      throw ConvergenceError(msg.str());
    }
    hi = std::min(2.0 * hi, kCapacityCap);
  }

  const auto r = numerics::bisect_sup(holds, last_true, hi, o.rel_tol, 0.0, o.max_iterations);
  out.bracket_lo = r.lo;
  out.bracket_hi = r.hi;
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.capacity = r.root;
  out.residual = zero_profit_residual(s, revenue_kind, r.root);
  if (!r.converged) {
    std::ostringstream msg;
    msg << to_string(label) << ": bisection stopped after " << r.iterations << " iterations in ["
        << r.lo << ", " << r.hi << "]";
    throw ConvergenceError(msg.str());
  }
  out.monotone = looks_monotone(s, revenue_kind, r.root, scale, o.monotone_grid);
  if (!out.monotone) {
    spdlog::warn("{}: per-unit revenue is not monotone on the diagnostic grid; the root may not be unique",
                 to_string(label));
  }
  return out;
}

EquilibriumResult solve_contract(const Scenario& s) {
  s.validate();
  EquilibriumResult out;
  out.mechanism = Mechanism::cb;
  const double window_price = s.pi0 * s.total_weight() / s.t_tilde;
  out.capacity = aggregate_demand_cb(s, window_price);
  out.bracket_lo = out.capacity;
  out.bracket_hi = out.capacity;
  if (out.capacity == 0.0) {
    out.viable = false;
    out.residual = s.t_tilde / s.total_weight() * choke_price_cb(s) - s.pi0;
    return out;
  }
  // demand was read off at the window price, so that price clears c
  out.residual = out.capacity * (s.t_tilde / s.total_weight() * window_price - s.pi0);
  return out;
}

}  // namespace

EquilibriumResult solve_ne(const Scenario& s, Mechanism m, const SolverOptions& options) {
  switch (m) {
    case Mechanism::srt:
    case Mechanism::prt:
      return solve_real_time(s, m, m, options);
    case Mechanism::cb:
      return solve_contract(s);
    case Mechanism::opt:
      return solve_social_optimum(s, options);
  }
  throw InvalidArgument("unknown mechanism");
}

EquilibriumResult solve_social_optimum(const Scenario& s, const SolverOptions& options) {
  return solve_real_time(s, Mechanism::prt, Mechanism::opt, options);
}

AllocationRule optimal_allocation(const Scenario& s, std::size_t period, double c, double g) {
  if (period >= s.periods.size()) {
    throw InvalidArgument("period index " + std::to_string(period) + " out of range");
  }
  if (!(c >= 0.0) || !(g >= 0.0)) {
    throw InvalidArgument("capacity and generation must be non-negative");
  }
  const double served = std::min(c * g / s.periods[period].load, 1.0);
  AllocationRule out;
  if (served >= 1.0) {
    out.threshold_premium = 0.0;
    out.max_avg_premium = s.premium.mean();
    return out;
  }
  out.threshold_premium = s.premium.complementary_quantile(served);
  out.max_avg_premium = s.premium.top_mean(served);
  return out;
}

double welfare(const Scenario& s, double c) {
  numerics::require_finite(c, "capacity");
  if (c < 0.0) {
    throw InvalidArgument("capacity must be non-negative");
  }
  const double full_premium = s.premium.mean();
  double total = 0.0;
  for (std::size_t t = 0; t < s.periods.size(); ++t) {
    const auto& p = s.periods[t];
    const double share = s.period_share(t);
    if (share == 0.0) {
      continue;
    }
    const double x = c > 0.0 ? p.load / c : std::numeric_limits<double>::infinity();
    // limited supply: top buyers served, the rest from the utility
    double per_period = p.generation.expect_below(
        [&](double g) {
          const double served = std::min(c * g / p.load, 1.0);
          return s.premium.top_mean(served) * p.load - p.utility_price * (p.load - c * g);
        },
        x);
    if (std::isfinite(x)) {
      per_period += (1.0 - p.generation.cdf(x)) * full_premium * p.load;
    }
    total += share * per_period;
  }
  return total - s.pi0 * c;
}

Viability check_viability(const Scenario& s) {
  Viability out;
  out.margin = unit_revenue_rt(s, Mechanism::srt, 0.0) - s.pi0;
  out.viable = out.margin >= 0.0;
  return out;
}

double expected_revenue(const Scenario& s, Mechanism m, double c) {
  switch (m) {
    case Mechanism::srt:
    case Mechanism::prt:
      return revenue_rt(s, m, c);
    case Mechanism::opt:
      return revenue_rt(s, Mechanism::prt, c);
    case Mechanism::cb: {
      if (c == 0.0) {
        return 0.0;
      }
      if (c > aggregate_demand_cb(s, 0.0)) {
        return 0.0;  // excess supply drives the rental price to zero
      }
      return s.t_tilde / s.total_weight() * c * clear_cb(s, c).price;
    }
  }
  throw InvalidArgument("unknown mechanism");
}

double zero_profit_residual(const Scenario& s, Mechanism m, double c) {
  return expected_revenue(s, m, c) - s.pi0 * c;
}

}  // namespace solar
