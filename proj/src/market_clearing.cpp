#include "solar/market_clearing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "solar/errors.hpp"
#include "solar/numerics.hpp"

namespace solar {

namespace {

void check_capacity(double c) {
  numerics::require_finite(c, "capacity");
  if (c < 0.0) {
    throw InvalidArgument("capacity must be non-negative");
  }
}

double upper_limit(double c, double load) {
  return c > 0.0 ? load / c : std::numeric_limits<double>::infinity();
}

// E[min(qG, L)] and E[(L - qG)+] for one period.
double expected_served(const PeriodProfile& p, double q) {
  if (q == 0.0) {
    return 0.0;
  }
  const double x = p.load / q;
  return q * p.generation.partial_mean(x) + p.load * (1.0 - p.generation.cdf(x));
}

double expected_shortfall(const PeriodProfile& p, double q) {
  if (q == 0.0) {
    return p.load;
  }
  const double x = p.load / q;
  return std::max(p.load * p.generation.cdf(x) - q * p.generation.partial_mean(x), 0.0);
}

}  // namespace

std::string_view to_string(Mechanism m) noexcept {
  switch (m) {
    case Mechanism::srt:
      return "srt";
    case Mechanism::prt:
      return "prt";
    case Mechanism::cb:
      return "cb";
    case Mechanism::opt:
      return "opt";
  }
  return "?";
}

Mechanism parse_mechanism(std::string_view name) {
  for (Mechanism m : {Mechanism::srt, Mechanism::prt, Mechanism::cb, Mechanism::opt}) {
    if (name == to_string(m)) {
      return m;
    }
  }
  throw InvalidArgument("unknown mechanism '" + std::string(name) + "' (expected srt, prt, cb or opt)");
}

std::string_view to_string(Regime r) noexcept {
  return r == Regime::abundant ? "abundant" : "limited";
}

ClearingOutcome clear_rt(const Scenario& s, std::size_t period, Mechanism m, double c, double g) {
  if (period >= s.periods.size()) {
    throw InvalidArgument("period index " + std::to_string(period) + " out of range");
  }
  if (m != Mechanism::srt && m != Mechanism::prt) {
    throw InvalidArgument("clear_rt handles the real-time mechanisms only");
  }
  check_capacity(c);
  numerics::require_finite(g, "generation");
  if (g < 0.0) {
    throw InvalidArgument("generation must be non-negative");
  }
  const auto& p = s.periods[period];
  const double supply = c * g;

  ClearingOutcome out;
  out.mechanism = m;
  if (supply > p.load) {
    out.regime = Regime::abundant;
    out.price = 0.0;
    out.seller_quantity = p.load;
    out.served_fraction = 1.0;
    return out;
  }
  out.regime = Regime::limited;
  out.seller_quantity = supply;
  out.served_fraction = supply / p.load;
  if (m == Mechanism::srt) {
    out.price = p.utility_price;
  } else {
    const double threshold = s.premium.complementary_quantile(out.served_fraction);
    out.buyer_threshold = threshold;
    out.price = p.utility_price + threshold;
  }
  return out;
}

double unit_revenue_rt(const Scenario& s, Mechanism m, double c) {
  check_capacity(c);
  if (m == Mechanism::cb) {
    throw InvalidArgument("unit_revenue_rt is not defined for the contract market");
  }
  const bool with_premium = m != Mechanism::srt && !s.premium.degenerate();
  double total = 0.0;
  for (std::size_t t = 0; t < s.periods.size(); ++t) {
    const auto& p = s.periods[t];
    const double share = s.period_share(t);
    if (share == 0.0) {
      continue;
    }
    double per_unit = p.utility_price * truncated_mean(p.generation, c, p.load);
    if (with_premium) {
      const double x = upper_limit(c, p.load);
      per_unit += p.generation.expect_below(
          [&](double g) {
            const double served = std::min(c * g / p.load, 1.0);
            return s.premium.complementary_quantile(served) * g;
          },
          x);
    }
    total += share * per_unit;
  }
  return total;
}

double revenue_rt(const Scenario& s, Mechanism m, double c) {
  if (c == 0.0) {
    check_capacity(c);
    return 0.0;
  }
  return c * unit_revenue_rt(s, m, c);
}

double contract_valuation(const Scenario& s, double v, double d) {
  double total = 0.0;
  for (const auto& p : s.periods) {
    if (p.weight == 0.0) {
      continue;
    }
    total += p.weight * (p.utility_price + v) * truncated_mean(p.generation, d, p.load);
  }
  return total;
}

double choke_price_cb(const Scenario& s) {
  return contract_valuation(s, s.premium.complementary_quantile(0.0), 0.0);
}

double individual_demand_cb(const Scenario& s, double v, double pi) {
  numerics::require_finite(v, "premium");
  numerics::require_finite(pi, "price");
  if (v < 0.0 || pi < 0.0) {
    throw InvalidArgument("contract demand needs premium >= 0 and price >= 0");
  }
  if (pi > contract_valuation(s, v, 0.0)) {
    return 0.0;
  }
  const auto holds = [&](double d) { return contract_valuation(s, v, d) >= pi; };
  double hi = 1.0;
  while (holds(hi)) {
    if (hi >= kDemandCap) {
      return kDemandCap;
    }
    hi = std::min(2.0 * hi, kDemandCap);
  }
  const double lo = hi > 1.0 ? 0.5 * hi : 0.0;
  return numerics::bisect_sup(holds, lo, hi, 1e-14, 0.0, 400).root;
}

double aggregate_demand_cb(const Scenario& s, double pi) {
  numerics::require_finite(pi, "price");
  if (pi < 0.0) {
    throw InvalidArgument("price must be non-negative");
  }
  // valuation at d = 0 is base + v * slope; types below the cut demand nothing
  const double base = contract_valuation(s, 0.0, 0.0);
  double slope = 0.0;
  for (const auto& p : s.periods) {
    slope += p.weight * p.generation.mean();
  }
  if (s.premium.degenerate()) {
    return individual_demand_cb(s, 0.0, pi);
  }
  double served_mass = 1.0;
  if (pi > base) {
    if (!(slope > 0.0)) {
      return 0.0;
    }
    served_mass = s.premium.survival_inclusive((pi - base) / slope);
  }
  if (served_mass <= 0.0) {
    return 0.0;
  }
  return numerics::integrate(
      [&](double p) {
        return individual_demand_cb(s, s.premium.complementary_quantile(p), pi);
      },
      0.0, served_mass, 1e-10);
}

CbClearing clear_cb(const Scenario& s, double c) {
  numerics::require_finite(c, "capacity");
  if (!(c > 0.0)) {
    throw InvalidArgument("contract clearing needs capacity > 0");
  }
  const double zero_price_demand = aggregate_demand_cb(s, 0.0);
  if (c > zero_price_demand) {
    std::ostringstream msg;
    msg << "capacity " << c << " exceeds contract demand at zero price (" << zero_price_demand
        << ")";
    throw NoEquilibrium(msg.str());
  }
  const double hi = choke_price_cb(s) + 1.0;
  const auto holds = [&](double pi) { return aggregate_demand_cb(s, pi) >= c; };
  const auto r = numerics::bisect_sup(holds, 0.0, hi, 1e-13, 1e-15 * hi, 200);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "contract price search did not converge after " << r.iterations
        << " iterations; bracket [" << r.lo << ", " << r.hi << "]";
    throw ConvergenceError(msg.str());
  }
  CbClearing out;
  out.price = r.root;
  out.seller_quantity = c;
  out.demand_residual = aggregate_demand_cb(s, r.root) - c;
  out.iterations = r.iterations;
  return out;
}

double buyer_payoff_cb(const Scenario& s, double v, double q, double pi) {
  numerics::require_finite(q, "quantity");
  if (q < 0.0) {
    throw InvalidArgument("rented capacity must be non-negative");
  }
  double total = 0.0;
  for (const auto& p : s.periods) {
    if (p.weight == 0.0) {
      continue;
    }
    total += p.weight * (v * expected_served(p, q) - p.utility_price * expected_shortfall(p, q));
  }
  return total - pi * q;
}

}  // namespace solar
