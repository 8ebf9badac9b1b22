#pragma once

#include <string>
#include <variant>
#include <vector>

namespace solar {

/// Distribution of buyers' solar premiums V = epsilon * V~, in $/kWh.
///
/// The unscaled premium V~ is supported on [0, v_bar]. Every accessor without
/// the `base_` prefix returns the epsilon-scaled quantity; the `base_` ones
/// describe V~ itself, which is what the small-premium expansion works with.
class PremiumDistribution {
 public:
  enum class Kind { uniform, truncated_exponential, empirical };

  /// Degenerate distribution: every buyer has zero premium.
  PremiumDistribution();

  static PremiumDistribution uniform(double v_bar, double epsilon = 1.0);
  /// Density proportional to exp(-rate v) on [0, v_bar]; negative rates give
  /// increasing densities and rate 0 is the uniform limit.
  static PremiumDistribution truncated_exponential(double rate, double v_bar,
                                                   double epsilon = 1.0);
  /// Truncated exponential on [0, v_bar] whose mean is `mean`.
  static PremiumDistribution truncated_exponential_with_mean(double mean, double v_bar,
                                                             double epsilon = 1.0);
  /// Piecewise-linear quantile table through (0, 0) and (k/n, x_(k)) for the
  /// sorted sample x_(1..n); v_bar is the sample maximum.
  static PremiumDistribution empirical(std::vector<double> samples, double epsilon = 1.0);

  Kind kind() const noexcept { return static_cast<Kind>(model_.index()); }
  double epsilon() const noexcept { return epsilon_; }
  PremiumDistribution with_epsilon(double epsilon) const;

  /// Upper end of the unscaled support.
  double v_bar() const noexcept;
  /// Rate of the truncated exponential (0 for other kinds).
  double rate() const noexcept;
  bool degenerate() const noexcept { return epsilon_ * v_bar() == 0.0; }

  /// epsilon * F~bar^{-1}(p): the premium level exceeded by a fraction p of
  /// buyers. Non-increasing, equal to epsilon*v_bar at 0 and 0 at 1.
  double complementary_quantile(double p) const;
  double base_complementary_quantile(double p) const;
  /// d/dp of F~bar^{-1}(p). Empirical tables use central differences on a
  /// 2001-point grid in p.
  double base_complementary_quantile_slope(double p) const;

  /// Scaled quantile F_V^{-1}(q).
  double quantile(double q) const;
  double cdf(double v) const;
  /// P(V > v) and P(V >= v). They differ only where V has an atom, which
  /// happens for the degenerate distribution at 0.
  double survival(double v) const;
  double survival_inclusive(double v) const;

  double mean() const { return epsilon_ * base_mean(); }
  double base_mean() const;
  /// Integral of the complementary quantile over [0, s]: the average premium
  /// of the population when only the top fraction s of buyers is counted.
  double top_mean(double s) const;

  std::string describe() const;

 private:
  struct Uniform {
    double v_bar = 0.0;
  };
  struct TruncatedExponential {
    double rate = 0.0;
    double v_bar = 0.0;
  };
  struct Empirical {
    std::vector<double> nodes;         // nodes[0] = 0, then sorted samples
    std::vector<double> cum_integral;  // integral of F^{-1} over [0, k/n]
  };

  PremiumDistribution(std::variant<Uniform, TruncatedExponential, Empirical> model,
                      double epsilon);

  double base_quantile(double q) const;
  double base_cdf(double v) const;

  std::variant<Uniform, TruncatedExponential, Empirical> model_;
  double epsilon_ = 1.0;
};

/// Mean of a truncated exponential with the given rate on [0, v_bar].
double truncated_exponential_mean(double rate, double v_bar);

}  // namespace solar
