#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "solar/errors.hpp"
#include "solar/market_clearing.hpp"

namespace solar {

namespace {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

double gap(const Interval& a, const Interval& b) {
  return std::max({0.0, a.lo - b.hi, b.lo - a.hi});
}

class UnitStream {
 public:
  explicit UnitStream(std::uint64_t seed) : engine_(seed) {}
  // 53-bit uniform in [0, 1); independent of the standard library's
  // distribution implementations so runs are reproducible across toolchains.
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::size_t pick_period(const Scenario& s, double u) {
  double target = u * s.total_weight();
  for (std::size_t t = 0; t < s.periods.size(); ++t) {
    target -= s.periods[t].weight;
    if (target < 0.0 && s.periods[t].weight > 0.0) {
      return t;
    }
  }
  for (std::size_t t = s.periods.size(); t-- > 0;) {
    if (s.periods[t].weight > 0.0) {
      return t;
    }
  }
  return 0;
}

std::vector<double> premium_types(const Scenario& s, std::size_t count) {
  std::vector<double> types(std::max<std::size_t>(count, 2));
  for (std::size_t k = 0; k < types.size(); ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(types.size() - 1);
    types[k] = s.premium.complementary_quantile(p);
  }
  return types;
}

// Best payoff over an evenly spaced grid on [0, hi].
template <class Payoff>
double grid_max(Payoff&& payoff, double hi, std::size_t points) {
  double best = payoff(0.0);
  for (std::size_t j = 1; j < points; ++j) {
    const double q = hi * static_cast<double>(j) / static_cast<double>(points - 1);
    best = std::max(best, payoff(q));
  }
  return best;
}

void verify_real_time(const Scenario& s, Mechanism m, double c, const VerifyOptions& o,
                      VerificationReport& report) {
  UnitStream stream(o.seed);
  const auto types = premium_types(s, o.premium_grid);
  const bool differentiated = m == Mechanism::prt;

  for (std::size_t n = 0; n < o.samples; ++n) {
    const std::size_t t = pick_period(s, stream.next());
    const auto& period = s.periods[t];
    const double g = period.generation.quantile(stream.next());
    const ClearingOutcome ce = clear_rt(s, t, m, c, g);
    const double price = ce.price * (1.0 + o.price_perturbation);
    const double load = period.load;
    const double pi_u = period.utility_price;
    const double supply_cap = c * g;
    const bool limited = ce.regime == Regime::limited;
    (limited ? report.limited_samples : report.abundant_samples) += 1;

    // sellers: payoff price * q on [0, cG]
    const double seller_best = grid_max([&](double q) { return price * q; }, supply_cap, o.deviation_grid);
    report.max_seller_gain = std::max(report.max_seller_gain, seller_best - price * ce.seller_quantity);

    // buyers: premium only counts when solar is a distinct product
    for (double v : types) {
      const double value = differentiated ? v : 0.0;
      const auto payoff = [&](double q) { return (value - price) * q - pi_u * (load - q); };
      double assigned = load;
      if (limited) {
        if (differentiated) {
          assigned = v >= *ce.buyer_threshold ? load : 0.0;
        } else {
          assigned = ce.seller_quantity;
        }
      }
      const double best = grid_max(payoff, load, o.deviation_grid);
      report.max_buyer_gain = std::max(report.max_buyer_gain, best - payoff(assigned));
    }

    // clearing: supply and demand correspondences at the posted price must meet
    const Interval supply = price > 0.0 ? Interval{supply_cap, supply_cap} : Interval{0.0, supply_cap};
    Interval demand;
    if (differentiated) {
      const double cut = price - pi_u;
      demand = {load * s.premium.survival(cut), load * s.premium.survival_inclusive(cut)};
    } else if (price < pi_u) {
      demand = {load, load};
    } else if (price == pi_u) {
      demand = {0.0, load};
    }
    report.max_clearing_residual = std::max(report.max_clearing_residual, gap(supply, demand));
  }
  report.samples = o.samples;
}

void verify_contract(const Scenario& s, double c, const VerifyOptions& o,
                     VerificationReport& report) {
  const CbClearing ce = clear_cb(s, c);
  const double price = ce.price * (1.0 + o.price_perturbation);
  report.cb_price = price;

  // sellers rent out everything they own while the price is non-negative
  const double seller_best = grid_max([&](double q) { return price * q; }, c, o.deviation_grid);
  report.max_seller_gain = std::max(0.0, seller_best - price * c);

  const auto types = premium_types(s, o.premium_grid);
  std::vector<double> assigned(types.size());
  double q_hi = c;
  for (std::size_t k = 0; k < types.size(); ++k) {
    assigned[k] = individual_demand_cb(s, types[k], ce.price);
    q_hi = std::max(q_hi, assigned[k]);
  }
  q_hi = std::min(2.0 * q_hi, kDemandCap);
  for (std::size_t k = 0; k < types.size(); ++k) {
    const auto payoff = [&](double q) { return buyer_payoff_cb(s, types[k], q, price); };
    const double best = grid_max(payoff, q_hi, o.deviation_grid);
    report.max_buyer_gain = std::max(report.max_buyer_gain, best - payoff(assigned[k]));
  }
  report.max_clearing_residual = std::abs(aggregate_demand_cb(s, price) - c);
  report.samples = 0;
}

}  // namespace

VerificationReport verify_ce(const Scenario& s, Mechanism m, double c, const VerifyOptions& o) {
  s.validate();
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("capacity must be non-negative and finite");
  }
  if (o.samples < 1 && m != Mechanism::cb) {
    throw InvalidArgument("verification needs at least one sample");
  }
  if (o.deviation_grid < 2) {
    throw InvalidArgument("deviation grid needs at least two points");
  }
  VerificationReport report;
  report.mechanism = m;
  report.capacity = c;
  switch (m) {
    case Mechanism::srt:
    case Mechanism::prt:
      verify_real_time(s, m, c, o, report);
      break;
    case Mechanism::cb:
      verify_contract(s, c, o, report);
      break;
    case Mechanism::opt:
      throw InvalidArgument("the welfare benchmark is not a market and has no equilibrium to verify");
  }
  report.max_violation =
      std::max({report.max_buyer_gain, report.max_seller_gain, report.max_clearing_residual});
  report.passed = report.max_violation <= o.tolerance;
  return report;
}

}  // namespace solar
