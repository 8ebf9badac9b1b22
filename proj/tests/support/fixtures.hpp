#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "solar/equilibrium.hpp"
#include "solar/market_clearing.hpp"
#include "solar/scenario.hpp"

namespace solar::testing {

// G ~ U(0,1), L = 1, pi_u = 1, T~ = 1, pi0 = 0.125, V~ ~ U(0, 0.6).
inline Scenario desk(double epsilon = 1.0) {
  Scenario s;
  PeriodProfile p;
  p.name = "single";
  p.generation = GenerationDistribution::uniform(0.0, 1.0);
  s.periods = {p};
  s.premium = PremiumDistribution::uniform(0.6, epsilon);
  s.pi0 = 0.125;
  s.t_tilde = 1.0;
  return s;
}

// Closed forms for the desk scenario.
inline double desk_srt(double pi0 = 0.125) { return std::sqrt(1.0 / (2.0 * pi0)); }
inline double desk_prt(double eps, double pi0 = 0.125) {
  return std::sqrt((0.5 + 0.6 * eps / 6.0) / pi0);
}
// d*(pi) = int_0^1 sqrt((1 + a(1 - p)) / (2 pi)) dp with a = 0.6 eps
inline double desk_cb(double eps, double pi0 = 0.125) {
  const double a = 0.6 * eps;
  if (a == 0.0) {
    return desk_srt(pi0);
  }
  return (2.0 / 3.0) * (std::pow(1.0 + a, 1.5) - 1.0) / a / std::sqrt(2.0 * pi0);
}

// Composite Simpson rule, used as an oracle independent of the library's
// Gauss-Kronrod integrator.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) {
    ++n;
  }
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int k = 1; k < n; ++k) {
    sum += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

struct RandomScenarioOptions {
  bool uniform_only = false;  // every period uniform(0, hi): flat near zero
  bool zero_premium = false;
  int max_periods = 3;
};

// Random but always valid and viable scenario.
inline Scenario random_scenario(std::mt19937_64& rng, const RandomScenarioOptions& o = {}) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  Scenario s;
  const int periods = 1 + static_cast<int>(u(rng) * o.max_periods);
  double min_price = 1e9;
  for (int t = 0; t < periods; ++t) {
    PeriodProfile p;
    p.name = "p" + std::to_string(t);
    p.load = in(0.5, 2.0);
    p.utility_price = in(0.5, 1.5);
    p.weight = in(0.5, 3.0);
    min_price = std::min(min_price, p.utility_price);
    const double kind = o.uniform_only ? 0.0 : u(rng);
    if (kind < 0.5) {
      p.generation = GenerationDistribution::uniform(0.0, in(0.4, 1.5));
    } else if (kind < 0.8) {
      const double top = in(0.5, 1.5);
      std::vector<double> grid;
      std::vector<double> density;
      for (int k = 0; k <= 40; ++k) {
        grid.push_back(top * k / 40.0);
        density.push_back(in(0.2, 1.0) + std::sin(3.0 * k / 40.0));
      }
      p.generation = GenerationDistribution::tabulated(grid, density, true);
    } else {
      const double lo = in(0.0, 0.3);
      p.generation = GenerationDistribution::uniform(lo, lo + in(0.3, 1.2));
    }
    s.periods.push_back(p);
  }
  const double pk = u(rng);
  const double v_bar = in(0.1, 1.0);
  if (pk < 0.4) {
    s.premium = PremiumDistribution::uniform(v_bar);
  } else if (pk < 0.8) {
    s.premium = PremiumDistribution::truncated_exponential(in(-5.0, 5.0) / v_bar, v_bar);
  } else {
    std::vector<double> samples;
    std::exponential_distribution<double> e(1.0 / (0.3 * v_bar));
    for (int k = 0; k < 60; ++k) {
      samples.push_back(std::min(e(rng), v_bar));
    }
    samples.push_back(v_bar);
    s.premium = PremiumDistribution::empirical(samples);
  }
  // keep the scaled premium below the utility price
  const double eps = o.zero_premium ? 0.0 : in(0.05, 1.0) * std::min(1.0, min_price / v_bar);
  s.premium = s.premium.with_epsilon(eps);
  s.t_tilde = in(0.5, 3.0);
  s.pi0 = 1.0;
  s.pi0 = in(0.1, 0.9) * unit_revenue_rt(s, Mechanism::srt, 0.0);
  return s;
}

}  // namespace solar::testing

#include <filesystem>
#include <fstream>

namespace solar::testing {

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("solareq_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path data_dir() { return SOLAR_DATA_DIR; }

}  // namespace solar::testing
