#include "solar/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

#include "solar/errors.hpp"
#include "solar/numerics.hpp"

namespace solar {

namespace {

constexpr int kLambdaGrid = 2000;

struct SlopeParts {
  double c0 = 0.0;
  double k = 0.0;           // sum_t w_t E[v~(c0 G/L) G 1{c0 G <= L}]
  double derivative = 0.0;  // sum_t w_t pi_u_t mu_t'(c0)
  double truncated = 0.0;   // sum_t w_t mu_t(c0)
  double scale = 0.0;       // sum_t w_t pi_u_t mu_t(c0) / c0
};

// Below this fraction of its natural scale the derivative is bisection noise.
constexpr double kSingularRatio = 1e-6;

SlopeParts slope_parts(const Scenario& s) {
  SlopeParts out;
  out.c0 = zero_premium_capacity(s);
  if (!(out.c0 > 0.0)) {
    throw InvalidArgument("the expansion needs a viable zero-premium scenario (c0 > 0)");
  }
  for (const auto& p : s.periods) {
    if (p.weight == 0.0) {
      continue;
    }
    const double x = p.load / out.c0;
    out.derivative += p.weight * p.utility_price * truncated_mean_slope(p.generation, out.c0, p.load);
    const double mu = truncated_mean(p.generation, out.c0, p.load);
    out.truncated += p.weight * mu;
    out.scale += p.weight * p.utility_price * mu / out.c0;
    out.k += p.weight * p.generation.expect_below(
                            [&](double g) {
                              const double served = std::min(out.c0 * g / p.load, 1.0);
                              return s.premium.base_complementary_quantile(served) * g;
                            },
                            x);
  }
  if (std::abs(out.derivative) <= kSingularRatio * out.scale) {
    std::ostringstream msg;
    msg << "generation density vanishes at L/c0 in every period (c0 = " << out.c0
        << "); the first-order expansion is singular";
    throw SingularDerivative(msg.str());
  }
  return out;
}

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

double zero_premium_capacity(const Scenario& s) {
  return solve_ne(s.with_epsilon(0.0), Mechanism::srt).capacity;
}

double prt_slope_at_zero(const Scenario& s) {
  if (s.premium.v_bar() == 0.0) {
    return 0.0;
  }
  const SlopeParts parts = slope_parts(s);
  return -parts.k / parts.derivative;
}

double cb_slope_at_zero(const Scenario& s) {
  if (s.premium.v_bar() == 0.0) {
    return 0.0;
  }
  const SlopeParts parts = slope_parts(s);
  return -s.premium.base_mean() * parts.truncated / parts.derivative;
}

double lambda_ratio(const PremiumDistribution& premium) {
  if (premium.v_bar() == 0.0) {
    throw InvalidArgument("lambda is undefined for a premium that is identically zero");
  }
  const auto slope = [&](double p) { return -premium.base_complementary_quantile_slope(p); };
  if (premium.kind() == PremiumDistribution::Kind::empirical) {
    // trapezoid on the same grid the slope is differenced on
    double num = 0.0;
    double den = 0.0;
    for (int j = 0; j <= kLambdaGrid; ++j) {
      const double p = static_cast<double>(j) / kLambdaGrid;
      const double w = (j == 0 || j == kLambdaGrid) ? 0.5 : 1.0;
      const double d = slope(p);
      num += w * d * p * p;
      den += w * d * p;
    }
    return num / den;
  }
  const double num = numerics::integrate([&](double p) { return slope(p) * p * p; }, 0.0, 1.0);
  const double den = numerics::integrate([&](double p) { return slope(p) * p; }, 0.0, 1.0);
  return num / den;
}

double beta_constant(const Scenario& s) {
  const double lambda = lambda_ratio(s.premium);
  const SlopeParts parts = slope_parts(s);
  return (1.0 - lambda) * parts.k / (-(1.0 + lambda) * parts.derivative);
}

ExpansionCoefficients expansion_coefficients(const Scenario& s) {
  ExpansionCoefficients out;
  out.c0 = zero_premium_capacity(s);
  if (s.premium.v_bar() == 0.0) {
    return out;
  }
  const SlopeParts parts = slope_parts(s);
  out.prt_slope = -parts.k / parts.derivative;
  out.cb_slope = -s.premium.base_mean() * parts.truncated / parts.derivative;
  const double lambda = lambda_ratio(s.premium);
  out.lambda = lambda;
  out.beta = (1.0 - lambda) * parts.k / (-(1.0 + lambda) * parts.derivative);
  return out;
}

FlatnessReport flatness_fit(const Scenario& s, double c_srt) {
  if (!(c_srt > 0.0)) {
    throw InvalidArgument("flatness fit needs a positive srt capacity");
  }
  FlatnessReport report;
  for (std::size_t t = 0; t < s.periods.size(); ++t) {
    const auto& p = s.periods[t];
    PeriodFlatness row;
    row.name = p.name;
    row.index = t;
    row.upper = p.load / c_srt;
    if (!p.generation.has_density()) {
      row.excluded = true;
      spdlog::warn("period '{}' has point-mass generation; left out of the flatness fit", p.name);
      report.periods.push_back(row);
      continue;
    }
    std::vector<double> points;
    for (int j = 1; j <= kLambdaGrid; ++j) {
      points.push_back(row.upper * j / kLambdaGrid);
    }
    if (p.generation.kind() == GenerationDistribution::Kind::tabulated) {
      for (double g : p.generation.grid()) {
        if (g > 0.0 && g <= row.upper) {
          points.push_back(g);
        }
      }
    }
    double lo = p.generation.density(points.front());
    double hi = lo;
    for (double g : points) {
      const double f = p.generation.density(g);
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
    row.r0 = 0.5 * (hi + lo);
    row.delta = hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
    report.max_delta = std::max(report.max_delta, row.delta);
    report.periods.push_back(row);
  }
  return report;
}

OrderingReport ordering_report(const Scenario& s, const std::vector<double>& epsilon_grid) {
  OrderingReport report;
  std::vector<double> grid = epsilon_grid;
  for (double e : grid) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw InvalidArgument("epsilon grid values must be finite and non-negative");
    }
  }
  std::sort(grid.begin(), grid.end());

  const double c_srt = solve_ne(s, Mechanism::srt).capacity;
  if (c_srt > 0.0) {
    report.flatness = flatness_fit(s, c_srt);
  } else {
    report.notes.push_back("srt capacity is zero; flatness fit skipped");
  }
  const bool flat = c_srt > 0.0 && report.flatness.max_delta <= kFlatnessThreshold;
  if (!flat) {
    report.notes.push_back("density not flat near zero; prt <= cb is informational");
  }

  try {
    report.coefficients = expansion_coefficients(s);
  } catch (const std::exception& e) {
    report.notes.push_back(std::string("expansion unavailable: ") + e.what());
  }

  for (double eps : grid) {
    const Scenario se = s.with_epsilon(eps);
    OrderingRow row;
    row.epsilon = eps;
    row.c_srt = solve_ne(se, Mechanism::srt).capacity;
    row.c_prt = solve_ne(se, Mechanism::prt).capacity;
    row.c_cb = solve_ne(se, Mechanism::cb).capacity;
    row.c_opt = solve_social_optimum(se).capacity;
    const double tol = 1e-7 * std::max({1.0, row.c_srt, row.c_prt});
    row.srt_le_prt = row.c_srt <= row.c_prt + tol;
    row.prt_eq_opt = row.c_prt == row.c_opt;
    row.prt_le_cb = row.c_prt <= row.c_cb + tol;
    row.prt_le_cb_informational = !flat || eps > 1.0;
    if (eps == 0.0) {
      row.all_equal = close_rel(row.c_srt, row.c_prt, 1e-6) && close_rel(row.c_srt, row.c_cb, 1e-6) &&
                      close_rel(row.c_srt, row.c_opt, 1e-6);
    }
    row.gap = row.c_cb - row.c_prt;
    if (report.coefficients) {
      row.first_order_gap = (report.coefficients->cb_slope - report.coefficients->prt_slope) * eps;
    }
    report.rows.push_back(row);
  }

  // K from the two smallest positive grid points, with a factor of two slack
  if (report.coefficients) {
    std::vector<const OrderingRow*> positive;
    for (const auto& row : report.rows) {
      if (row.epsilon > 0.0) {
        positive.push_back(&row);
      }
    }
    if (positive.size() >= 2) {
      double k = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        const auto* row = positive[j];
        k = std::max(k, std::abs(row->gap - row->first_order_gap) / (row->epsilon * row->epsilon));
      }
      k *= 2.0;
      report.k_estimate = k;
      for (auto& row : report.rows) {
        const double bound = k * row.epsilon * row.epsilon + 1e-7;
        row.first_order_ok = std::abs(row.gap - row.first_order_gap) <= bound;
      }
    } else {
      report.notes.push_back("fewer than two positive epsilon values; no first-order check");
    }
  }

  for (const auto& row : report.rows) {
    if (!row.srt_le_prt || !row.prt_eq_opt || (row.all_equal && !*row.all_equal)) {
      report.passed = false;
    }
    if (!row.prt_le_cb && !row.prt_le_cb_informational) {
      report.passed = false;
    }
  }
  return report;
}

}  // namespace solar
