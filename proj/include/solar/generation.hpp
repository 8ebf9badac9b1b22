#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace solar {

/// Distribution of solar output per unit of installed capacity over one
/// operation period (kWh per kW). Immutable once built.
///
/// Three shapes are supported: a uniform density, a tabulated density that is
/// piecewise linear between grid nodes (what the KDE fit produces), and a
/// point mass, used for night periods where output is identically zero.
class GenerationDistribution {
 public:
  enum class Kind { uniform, tabulated, point_mass };

  /// Zero output with probability one.
  GenerationDistribution();

  static GenerationDistribution uniform(double lo, double hi);
  /// Grid must be strictly increasing and start at g >= 0; density values
  /// must be non-negative. With `normalize` the density is rescaled to unit
  /// mass, otherwise its mass has to be 1 within 1e-8.
  static GenerationDistribution tabulated(std::vector<double> grid, std::vector<double> density,
                                          bool normalize = false);
  static GenerationDistribution point_mass(double value);

  Kind kind() const noexcept;
  bool has_density() const noexcept { return kind() != Kind::point_mass; }

  double density(double g) const;
  /// P(G <= g).
  double cdf(double g) const;
  /// Inverse CDF, used for sampling realizations.
  double quantile(double u) const;
  double mean() const noexcept { return mean_; }
  double support_lo() const noexcept;
  double support_hi() const noexcept;
  /// Mass of the density (trapezoid rule on the grid for tabulated kinds,
  /// which is exact for piecewise-linear densities).
  double total_mass() const;

  /// E[G 1{G <= upper}].
  double partial_mean(double upper) const;
  /// E[h(G) 1{G <= upper}], by quadrature for continuous kinds.
  double expect_below(const std::function<double(double)>& h, double upper) const;

  const std::vector<double>& grid() const;
  const std::vector<double>& grid_density() const;

  std::string describe() const;

 private:
  struct Uniform {
    double lo = 0.0;
    double hi = 1.0;
  };
  struct Tabulated {
    std::vector<double> grid;
    std::vector<double> density;
    std::vector<double> cum_mass;    // mass on [grid[0], grid[k]]
    std::vector<double> cum_moment;  // first moment on [grid[0], grid[k]]
  };
  struct PointMass {
    double value = 0.0;
  };

  explicit GenerationDistribution(std::variant<Uniform, Tabulated, PointMass> model);

  std::size_t cell_of(double g) const;  // tabulated only

  std::variant<Uniform, Tabulated, PointMass> model_;
  double mean_ = 0.0;
};

/// Truncated mean E[G 1{d G <= L}]: expected output counted only while solar
/// alone does not cover the load. Equals E[G] at d = 0, non-increasing in d.
double truncated_mean(const GenerationDistribution& gen, double capacity, double load);

/// Analytic derivative of the truncated mean in d: -(L^2/d^3) f_G(L/d).
double truncated_mean_slope(const GenerationDistribution& gen, double capacity, double load);

/// Extended inverse of the truncated mean: 0 when z > E[G], otherwise the
/// largest d in [0, d_max] with truncated_mean(d) = z.
double truncated_mean_inverse(const GenerationDistribution& gen, double z, double load,
                              double d_max = 1e6);

}  // namespace solar
