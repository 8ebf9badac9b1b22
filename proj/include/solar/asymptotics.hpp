#pragma once

#include <optional>
#include <string>
#include <vector>

#include "solar/equilibrium.hpp"
#include "solar/scenario.hpp"

namespace solar {

/// First-order behaviour of the equilibrium capacities as the premium scale
/// epsilon goes to zero: c_m(eps) = c0 + slope_m eps + O(eps^2).
struct ExpansionCoefficients {
  double c0 = 0.0;
  double prt_slope = 0.0;
  double cb_slope = 0.0;
  std::optional<double> lambda;  // only for non-degenerate premiums
  std::optional<double> beta;
};

struct PeriodFlatness {
  std::string name;
  std::size_t index = 0;
  bool excluded = false;  // point-mass periods have no density to fit
  double upper = 0.0;     // L / c_srt
  double r0 = 0.0;
  double delta = 0.0;
};

struct FlatnessReport {
  std::vector<PeriodFlatness> periods;
  double max_delta = 0.0;
};

/// Zero-premium capacity shared by every mechanism.
double zero_premium_capacity(const Scenario& s);

/// Throws SingularDerivative when f_G(L/c0) vanishes in every period.
double prt_slope_at_zero(const Scenario& s);
double cb_slope_at_zero(const Scenario& s);

/// int -v~'(p) p^2 dp / int -v~'(p) p dp over [0, 1]. Throws InvalidArgument
/// for a degenerate premium.
double lambda_ratio(const PremiumDistribution& premium);

/// (1 - lambda) k / (-(1 + lambda) D), with k and D the numerator and
/// denominator of the prt slope.
double beta_constant(const Scenario& s);

ExpansionCoefficients expansion_coefficients(const Scenario& s);

/// Density level and relative spread on (0, L/c_srt] for every period.
FlatnessReport flatness_fit(const Scenario& s, double c_srt);

struct OrderingRow {
  double epsilon = 0.0;
  double c_srt = 0.0;
  double c_prt = 0.0;
  double c_cb = 0.0;
  double c_opt = 0.0;
  bool srt_le_prt = false;
  bool prt_eq_opt = false;
  bool prt_le_cb = false;
  /// prt <= cb is only established for flat densities and small epsilon.
  bool prt_le_cb_informational = true;
  std::optional<bool> all_equal;  // epsilon == 0 rows only
  double gap = 0.0;                // c_cb - c_prt
  double first_order_gap = 0.0;    // (cb_slope - prt_slope) eps
  std::optional<bool> first_order_ok;
};

struct OrderingReport {
  std::vector<OrderingRow> rows;
  std::optional<ExpansionCoefficients> coefficients;
  std::optional<double> k_estimate;
  FlatnessReport flatness;
  std::vector<std::string> notes;
  /// Hard checks only: srt <= prt = opt everywhere and equality at zero.
  bool passed = true;
};

inline constexpr double kFlatnessThreshold = 0.1;

OrderingReport ordering_report(const Scenario& s, const std::vector<double>& epsilon_grid);

}  // namespace solar
