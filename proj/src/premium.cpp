#include "solar/premium.hpp"

#include <algorithm>
#include <cmath>
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

// Below this |rate * v_bar| the truncated exponential is treated as uniform.
constexpr double kFlatRate = 1e-9;
constexpr double kSmallRate = 0.05;
constexpr int kSlopeGrid = 2000;  // intervals of the empirical slope grid

// Mean of the truncated exponential on [0, 1] with rate x.
double unit_truncated_exponential_mean(double x) {
  if (std::abs(x) < 1e-4) {
    return 0.5 - x / 12.0 + x * x * x / 720.0;
  }
  return 1.0 / x - 1.0 / std::expm1(x);
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("probability must lie in [0, 1]");
  }
}

}  // namespace

double truncated_exponential_mean(double rate, double v_bar) {
  return v_bar * unit_truncated_exponential_mean(rate * v_bar);
}

PremiumDistribution::PremiumDistribution() : PremiumDistribution(Uniform{0.0}, 1.0) {}

PremiumDistribution::PremiumDistribution(
    std::variant<Uniform, TruncatedExponential, Empirical> model, double epsilon)
    : model_(std::move(model)), epsilon_(epsilon) {
  numerics::require_finite(epsilon, "epsilon");
  if (epsilon < 0.0) {
    throw InvalidArgument("epsilon must be non-negative");
  }
}

PremiumDistribution PremiumDistribution::uniform(double v_bar, double epsilon) {
  numerics::require_finite(v_bar, "v_bar");
  if (v_bar < 0.0) {
    throw InvalidArgument("v_bar must be non-negative");
  }
  return PremiumDistribution(Uniform{v_bar}, epsilon);
}

PremiumDistribution PremiumDistribution::truncated_exponential(double rate, double v_bar,
                                                               double epsilon) {
  numerics::require_finite(rate, "rate");
  numerics::require_finite(v_bar, "v_bar");
  if (!(v_bar > 0.0)) {
    throw InvalidArgument("truncated exponential needs v_bar > 0");
  }
  return PremiumDistribution(TruncatedExponential{rate, v_bar}, epsilon);
}

PremiumDistribution PremiumDistribution::truncated_exponential_with_mean(double mean, double v_bar,
                                                                         double epsilon) {
  numerics::require_finite(mean, "mean");
  if (!(v_bar > 0.0) || !(mean > 0.0) || !(mean < v_bar)) {
    throw InvalidArgument("truncated exponential mean must lie strictly inside (0, v_bar)");
  }
  const double target = mean / v_bar;
  // unit mean is decreasing in x, from 1 (x -> -inf) to 0 (x -> +inf)
  const double lo = -1.0 / (1.0 - target) - 10.0;
  const double hi = 1.0 / target + 10.0;
  const auto r = numerics::bisect_sup(
      [target](double x) { return unit_truncated_exponential_mean(x) >= target; }, lo, hi, 0.0,
      1e-15 * (hi - lo), 400);
  if (!r.converged) {
    throw ConvergenceError("could not solve for the truncated exponential rate");
  }
  return truncated_exponential(r.root / v_bar, v_bar, epsilon);
}

PremiumDistribution PremiumDistribution::empirical(std::vector<double> samples, double epsilon) {
  if (samples.empty()) {
    throw InvalidArgument("empirical premium distribution needs at least one sample");
  }
  for (double x : samples) {
    numerics::require_finite(x, "premium sample");
    if (x < 0.0) {
      throw InvalidArgument("premium samples must be non-negative");
    }
  }
  std::sort(samples.begin(), samples.end());
  Empirical e;
  e.nodes.reserve(samples.size() + 1);
  e.nodes.push_back(0.0);
  e.nodes.insert(e.nodes.end(), samples.begin(), samples.end());
  const double step = 1.0 / static_cast<double>(samples.size());
  e.cum_integral.assign(e.nodes.size(), 0.0);
  for (std::size_t k = 1; k < e.nodes.size(); ++k) {
    e.cum_integral[k] = e.cum_integral[k - 1] + 0.5 * (e.nodes[k - 1] + e.nodes[k]) * step;
  }
  return PremiumDistribution(std::move(e), epsilon);
}

PremiumDistribution PremiumDistribution::with_epsilon(double epsilon) const {
  return PremiumDistribution(model_, epsilon);
}

double PremiumDistribution::v_bar() const noexcept {
  return std::visit(Overloaded{
                        [](const Uniform& u) { return u.v_bar; },
                        [](const TruncatedExponential& t) { return t.v_bar; },
                        [](const Empirical& e) { return e.nodes.back(); },
                    },
                    model_);
}

double PremiumDistribution::rate() const noexcept {
  if (const auto* t = std::get_if<TruncatedExponential>(&model_)) {
    return t->rate;
  }
  return 0.0;
}

double PremiumDistribution::base_quantile(double q) const {
  return std::visit(
      Overloaded{
          [q](const Uniform& u) { return q * u.v_bar; },
          [q](const TruncatedExponential& t) {
            if (std::abs(t.rate * t.v_bar) < kFlatRate) {
              return q * t.v_bar;
            }
            const double a = -std::expm1(-t.rate * t.v_bar);
            return std::clamp(-std::log1p(-q * a) / t.rate, 0.0, t.v_bar);
          },
          [q](const Empirical& e) {
            const double n = static_cast<double>(e.nodes.size() - 1);
            const double pos = q * n;
            const auto k = std::min(static_cast<std::size_t>(pos), e.nodes.size() - 2);
            const double w = pos - static_cast<double>(k);
            return (1.0 - w) * e.nodes[k] + w * e.nodes[k + 1];
          },
      },
      model_);
}

double PremiumDistribution::base_cdf(double v) const {
  if (v < 0.0) {
    return 0.0;
  }
  return std::visit(
      Overloaded{
          [v](const Uniform& u) { return u.v_bar > 0.0 ? std::min(v / u.v_bar, 1.0) : 1.0; },
          [v](const TruncatedExponential& t) {
            if (v >= t.v_bar) {
              return 1.0;
            }
            if (std::abs(t.rate * t.v_bar) < kFlatRate) {
              return v / t.v_bar;
            }
            return std::clamp(std::expm1(-t.rate * v) / std::expm1(-t.rate * t.v_bar), 0.0, 1.0);
          },
          [v](const Empirical& e) {
            const auto it = std::upper_bound(e.nodes.begin(), e.nodes.end(), v);
            if (it == e.nodes.end()) {
              return 1.0;
            }
            const auto k = static_cast<std::size_t>(std::distance(e.nodes.begin(), it)) - 1;
            const double n = static_cast<double>(e.nodes.size() - 1);
            const double w = (v - e.nodes[k]) / (e.nodes[k + 1] - e.nodes[k]);
            return (static_cast<double>(k) + w) / n;
          },
      },
      model_);
}

double PremiumDistribution::base_complementary_quantile(double p) const {
  check_probability(p);
  if (p == 1.0) {
    return 0.0;
  }
  return base_quantile(1.0 - p);
}

double PremiumDistribution::complementary_quantile(double p) const {
  check_probability(p);
  return epsilon_ * base_complementary_quantile(p);
}

double PremiumDistribution::base_complementary_quantile_slope(double p) const {
  check_probability(p);
  return std::visit(
      Overloaded{
          [](const Uniform& u) { return -u.v_bar; },
          [p](const TruncatedExponential& t) {
            if (std::abs(t.rate * t.v_bar) < kFlatRate) {
              return -t.v_bar;
            }
            const double a = -std::expm1(-t.rate * t.v_bar);
            const double q = 1.0 - p;
            return -a / (t.rate * (1.0 - q * a));
          },
          [p, this](const Empirical&) {
            const double h = 1.0 / kSlopeGrid;
            const int j = static_cast<int>(std::lround(p * kSlopeGrid));
            const int lo = std::max(j - 1, 0);
            const int hi = std::min(j + 1, kSlopeGrid);
            const double v_lo = base_complementary_quantile(lo * h);
            const double v_hi = base_complementary_quantile(hi * h);
            return (v_hi - v_lo) / ((hi - lo) * h);
          },
      },
      model_);
}

double PremiumDistribution::quantile(double q) const {
  check_probability(q);
  return epsilon_ * base_quantile(q);
}

double PremiumDistribution::cdf(double v) const {
  if (epsilon_ == 0.0) {
    return v >= 0.0 ? 1.0 : 0.0;
  }
  return base_cdf(v / epsilon_);
}

double PremiumDistribution::survival(double v) const { return 1.0 - cdf(v); }

double PremiumDistribution::survival_inclusive(double v) const {
  if (v <= 0.0) {
    return 1.0;
  }
  if (degenerate()) {
    return 0.0;
  }
  const double x = v / epsilon_;
  if (const auto* e = std::get_if<Empirical>(&model_)) {
    // P(V~ < x); differs from the CDF on flat quantile segments (tied samples).
    const auto it = std::lower_bound(e->nodes.begin(), e->nodes.end(), x);
    if (it == e->nodes.end()) {
      return 0.0;
    }
    const auto k = static_cast<std::size_t>(std::distance(e->nodes.begin(), it));
    const double n = static_cast<double>(e->nodes.size() - 1);
    const double w = (x - e->nodes[k - 1]) / (e->nodes[k] - e->nodes[k - 1]);
    return 1.0 - (static_cast<double>(k - 1) + w) / n;
  }
  return 1.0 - base_cdf(x);
}

double PremiumDistribution::base_mean() const {
  return std::visit(Overloaded{
                        [](const Uniform& u) { return 0.5 * u.v_bar; },
                        [](const TruncatedExponential& t) {
                          return truncated_exponential_mean(t.rate, t.v_bar);
                        },
                        [](const Empirical& e) { return e.cum_integral.back(); },
                    },
                    model_);
}

double PremiumDistribution::top_mean(double s) const {
  check_probability(s);
  const double base = std::visit(
      Overloaded{
          [s](const Uniform& u) { return u.v_bar * (s - 0.5 * s * s); },
          [s, this](const TruncatedExponential& t) {
            const double x = t.rate * t.v_bar;
            if (std::abs(x) < kSmallRate) {
              // nearly linear quantile; the closed form cancels here
              return numerics::integrate_fixed([this](double q) { return base_quantile(q); },
                                               1.0 - s, 1.0);
            }
            const double v = base_quantile(1.0 - s);
            const double a = -std::expm1(-x);
            return s * v + s / t.rate - (t.v_bar - v) * std::exp(-x) / a;
          },
          [s](const Empirical& e) {
            // integral of the piecewise-linear quantile over [0, q]
            const auto integral_to = [&e](double q) {
              const double n = static_cast<double>(e.nodes.size() - 1);
              const double pos = q * n;
              const auto k = std::min(static_cast<std::size_t>(pos), e.nodes.size() - 2);
              const double w = pos - static_cast<double>(k);
              const double v_mid = (1.0 - w) * e.nodes[k] + w * e.nodes[k + 1];
              return e.cum_integral[k] + 0.5 * (e.nodes[k] + v_mid) * w / n;
            };
            return integral_to(1.0) - integral_to(1.0 - s);
          },
      },
      model_);
  return epsilon_ * base;
}

std::string PremiumDistribution::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Uniform& u) { os << "uniform(0, " << u.v_bar << ")"; },
                 [&](const TruncatedExponential& t) {
                   os << "truncated_exponential(rate " << t.rate << ", v_bar " << t.v_bar << ")";
                 },
                 [&](const Empirical& e) {
                   os << "empirical(" << e.nodes.size() - 1 << " samples, v_bar " << e.nodes.back()
                      << ")";
                 },
             },
             model_);
  os << " x epsilon " << epsilon_;
  return os.str();
}

}  // namespace solar
