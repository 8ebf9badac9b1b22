#include "solar/generation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "solar/errors.hpp"
#include "solar/numerics.hpp"

namespace solar {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

GenerationDistribution::GenerationDistribution() : GenerationDistribution(PointMass{0.0}) {}

GenerationDistribution::GenerationDistribution(std::variant<Uniform, Tabulated, PointMass> model)
    : model_(std::move(model)) {
  mean_ = std::visit(Overloaded{
                         [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
                         [](const Tabulated& t) { return t.cum_moment.back(); },
                         [](const PointMass& p) { return p.value; },
                     },
                     model_);
}

GenerationDistribution GenerationDistribution::uniform(double lo, double hi) {
  numerics::require_finite(lo, "uniform lower bound");
  numerics::require_finite(hi, "uniform upper bound");
  if (lo < 0.0 || !(hi > lo)) {
    throw InvalidArgument("uniform generation needs 0 <= lo < hi");
  }
  return GenerationDistribution(Uniform{lo, hi});
}

GenerationDistribution GenerationDistribution::point_mass(double value) {
  numerics::require_finite(value, "point mass location");
  if (value < 0.0) {
    throw InvalidArgument("generation cannot be negative");
  }
  return GenerationDistribution(PointMass{value});
}

GenerationDistribution GenerationDistribution::tabulated(std::vector<double> grid,
                                                         std::vector<double> density,
                                                         bool normalize) {
  if (grid.size() < 2 || grid.size() != density.size()) {
    throw InvalidArgument("tabulated density needs at least two (g, f) nodes of equal count");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    numerics::require_finite(grid[k], "grid node");
    numerics::require_finite(density[k], "density value");
    if (density[k] < 0.0) {
      throw InvalidArgument("tabulated density values must be non-negative");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw InvalidArgument("tabulated grid must be strictly increasing");
    }
  }
  if (grid.front() < 0.0) {
    throw InvalidArgument("tabulated grid must lie in g >= 0");
  }

  double mass = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    mass += 0.5 * (density[k] + density[k + 1]) * (grid[k + 1] - grid[k]);
  }
  if (!(mass > 0.0)) {
    throw InvalidArgument("tabulated density has zero mass");
  }
  if (normalize) {
    for (double& f : density) {
      f /= mass;
    }
  } else if (std::abs(mass - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "tabulated density integrates to " << mass << ", expected 1";
    throw InvalidArgument(msg.str());
  }

  Tabulated t;
  t.cum_mass.assign(grid.size(), 0.0);
  t.cum_moment.assign(grid.size(), 0.0);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double h = grid[k + 1] - grid[k];
    const double f0 = density[k];
    const double slope = (density[k + 1] - f0) / h;
    t.cum_mass[k + 1] = t.cum_mass[k] + 0.5 * (f0 + density[k + 1]) * h;
    t.cum_moment[k + 1] = t.cum_moment[k] + grid[k] * f0 * h +
                          (grid[k] * slope + f0) * h * h / 2.0 + slope * h * h * h / 3.0;
  }
  t.grid = std::move(grid);
  t.density = std::move(density);
  return GenerationDistribution(std::move(t));
}

GenerationDistribution::Kind GenerationDistribution::kind() const noexcept {
  return static_cast<Kind>(model_.index());
}

std::size_t GenerationDistribution::cell_of(double g) const {
  const auto& t = std::get<Tabulated>(model_);
  const auto it = std::upper_bound(t.grid.begin(), t.grid.end(), g);
  const auto k = static_cast<std::size_t>(std::distance(t.grid.begin(), it));
  return std::clamp<std::size_t>(k, 1, t.grid.size() - 1) - 1;
}

double GenerationDistribution::density(double g) const {
  return std::visit(Overloaded{
                        [g](const Uniform& u) { return (g >= u.lo && g <= u.hi) ? 1.0 / (u.hi - u.lo) : 0.0; },
                        [g, this](const Tabulated& t) {
                          if (g < t.grid.front() || g > t.grid.back()) {
                            return 0.0;
                          }
                          const std::size_t k = cell_of(g);
                          const double w = (g - t.grid[k]) / (t.grid[k + 1] - t.grid[k]);
                          return (1.0 - w) * t.density[k] + w * t.density[k + 1];
                        },
                        [](const PointMass&) { return 0.0; },
                    },
                    model_);
}

double GenerationDistribution::cdf(double g) const {
  return std::visit(Overloaded{
                        [g](const Uniform& u) { return std::clamp((g - u.lo) / (u.hi - u.lo), 0.0, 1.0); },
                        [g, this](const Tabulated& t) {
                          if (g < t.grid.front()) {
                            return 0.0;
                          }
                          if (g >= t.grid.back()) {
                            return t.cum_mass.back();
                          }
                          const std::size_t k = cell_of(g);
                          const double dt = g - t.grid[k];
                          const double slope =
                              (t.density[k + 1] - t.density[k]) / (t.grid[k + 1] - t.grid[k]);
                          return t.cum_mass[k] + t.density[k] * dt + 0.5 * slope * dt * dt;
                        },
                        [g](const PointMass& p) { return g >= p.value ? 1.0 : 0.0; },
                    },
                    model_);
}

double GenerationDistribution::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw InvalidArgument("quantile level must lie in [0, 1]");
  }
  return std::visit(Overloaded{
                        [u](const Uniform& uni) { return uni.lo + u * (uni.hi - uni.lo); },
                        [u](const Tabulated& t) {
                          const double target = u * t.cum_mass.back();
                          auto it = std::lower_bound(t.cum_mass.begin(), t.cum_mass.end(), target);
                          if (it == t.cum_mass.begin()) {
                            return t.grid.front();
                          }
                          if (it == t.cum_mass.end()) {
                            return t.grid.back();
                          }
                          const auto k = static_cast<std::size_t>(std::distance(t.cum_mass.begin(), it)) - 1;
                          const double r = target - t.cum_mass[k];
                          const double h = t.grid[k + 1] - t.grid[k];
                          const double f0 = t.density[k];
                          const double slope = (t.density[k + 1] - f0) / h;
                          // Solve f0 dt + slope dt^2 / 2 = r in a cancellation-free form.
                          const double disc = std::max(f0 * f0 + 2.0 * slope * r, 0.0);
                          const double denom = f0 + std::sqrt(disc);
                          const double dt = denom > 0.0 ? 2.0 * r / denom : 0.0;
                          return t.grid[k] + std::clamp(dt, 0.0, h);
                        },
                        [](const PointMass& p) { return p.value; },
                    },
                    model_);
}

double GenerationDistribution::support_lo() const noexcept {
  return std::visit(Overloaded{
                        [](const Uniform& u) { return u.lo; },
                        [](const Tabulated& t) { return t.grid.front(); },
                        [](const PointMass& p) { return p.value; },
                    },
                    model_);
}

double GenerationDistribution::support_hi() const noexcept {
  return std::visit(Overloaded{
                        [](const Uniform& u) { return u.hi; },
                        [](const Tabulated& t) { return t.grid.back(); },
                        [](const PointMass& p) { return p.value; },
                    },
                    model_);
}

double GenerationDistribution::total_mass() const {
  if (const auto* t = std::get_if<Tabulated>(&model_)) {
    return t->cum_mass.back();
  }
  return 1.0;
}

double GenerationDistribution::partial_mean(double upper) const {
  if (std::isnan(upper)) {
    throw InvalidArgument("truncation point must not be NaN");
  }
  return std::visit(Overloaded{
                        [upper, this](const Uniform& u) {
                          if (upper >= u.hi) {
                            return mean_;
                          }
                          if (upper <= u.lo) {
                            return 0.0;
                          }
                          return (upper * upper - u.lo * u.lo) / (2.0 * (u.hi - u.lo));
                        },
                        [upper, this](const Tabulated& t) {
                          if (upper >= t.grid.back()) {
                            return mean_;
                          }
                          if (upper <= t.grid.front()) {
                            return 0.0;
                          }
                          const std::size_t k = cell_of(upper);
                          const double dt = upper - t.grid[k];
                          const double f0 = t.density[k];
                          const double slope =
                              (t.density[k + 1] - f0) / (t.grid[k + 1] - t.grid[k]);
                          return t.cum_moment[k] + t.grid[k] * f0 * dt +
                                 (t.grid[k] * slope + f0) * dt * dt / 2.0 +
                                 slope * dt * dt * dt / 3.0;
                        },
                        [upper](const PointMass& p) { return p.value <= upper ? p.value : 0.0; },
                    },
                    model_);
}

double GenerationDistribution::expect_below(const std::function<double(double)>& h,
                                            double upper) const {
  if (std::isnan(upper)) {
    throw InvalidArgument("truncation point must not be NaN");
  }
  return std::visit(
      Overloaded{
          [&](const Uniform& u) {
            const double b = std::min(upper, u.hi);
            if (!(b > u.lo)) {
              return 0.0;
            }
            return numerics::integrate(h, u.lo, b) / (u.hi - u.lo);
          },
          [&](const Tabulated& t) {
            double total = 0.0;
            for (std::size_t k = 0; k + 1 < t.grid.size() && t.grid[k] < upper; ++k) {
              const double a = t.grid[k];
              const double b = std::min(t.grid[k + 1], upper);
              const double f0 = t.density[k];
              const double slope = (t.density[k + 1] - f0) / (t.grid[k + 1] - a);
              if (f0 == 0.0 && slope == 0.0) {
                continue;
              }
              total += numerics::integrate_fixed(
                  [&](double g) { return h(g) * (f0 + slope * (g - a)); }, a, b);
            }
            return total;
          },
          [&](const PointMass& p) { return p.value <= upper ? h(p.value) : 0.0; },
      },
      model_);
}

const std::vector<double>& GenerationDistribution::grid() const {
  if (const auto* t = std::get_if<Tabulated>(&model_)) {
    return t->grid;
  }
  throw InvalidArgument("grid() is only defined for tabulated densities");
}

const std::vector<double>& GenerationDistribution::grid_density() const {
  if (const auto* t = std::get_if<Tabulated>(&model_)) {
    return t->density;
  }
  throw InvalidArgument("grid_density() is only defined for tabulated densities");
}

std::string GenerationDistribution::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Uniform& u) { os << "uniform(" << u.lo << ", " << u.hi << ")"; },
                 [&](const Tabulated& t) {
                   os << "tabulated(" << t.grid.size() << " nodes on [" << t.grid.front() << ", "
                      << t.grid.back() << "], mean " << mean_ << ")";
                 },
                 [&](const PointMass& p) { os << "point_mass(" << p.value << ")"; },
             },
             model_);
  return os.str();
}

double truncated_mean(const GenerationDistribution& gen, double capacity, double load) {
  numerics::require_finite(capacity, "capacity");
  numerics::require_finite(load, "load");
  if (capacity < 0.0 || !(load > 0.0)) {
    throw InvalidArgument("truncated mean needs capacity >= 0 and load > 0");
  }
  if (capacity == 0.0) {
    return gen.mean();
  }
  return gen.partial_mean(load / capacity);
}

double truncated_mean_slope(const GenerationDistribution& gen, double capacity, double load) {
  numerics::require_finite(capacity, "capacity");
  if (!(capacity > 0.0) || !(load > 0.0)) {
    throw InvalidArgument("truncated mean slope needs capacity > 0 and load > 0");
  }
  const double x = load / capacity;
  return -(load * load) / (capacity * capacity * capacity) * gen.density(x);
}

double truncated_mean_inverse(const GenerationDistribution& gen, double z, double load,
                              double d_max) {
  numerics::require_finite(z, "truncated mean level");
  if (z < 0.0) {
    throw InvalidArgument("truncated mean level must be non-negative");
  }
  if (!(load > 0.0) || !(d_max > 0.0)) {
    throw InvalidArgument("truncated mean inverse needs load > 0 and d_max > 0");
  }
  if (z > gen.mean()) {
    return 0.0;
  }
  const auto holds = [&](double d) { return truncated_mean(gen, d, load) >= z; };
  if (holds(d_max)) {
    return d_max;
  }
  const auto r = numerics::bisect_sup(holds, 0.0, d_max, 1e-14, 0.0, 400);
  return r.root;
}

}  // namespace solar
