#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "solar/generation.hpp"
#include "solar/premium.hpp"
#include "solar/scenario.hpp"

namespace solar {

struct IrradiationRecord {
  std::string timestamp;  // ISO-8601
  double ghi = 0.0;       // W/m^2
};

/// Reads `timestamp,ghi_w_per_m2` rows. An empty file yields no records and a
/// warning; every malformed row raises DataError carrying its line number.
std::vector<IrradiationRecord> load_irradiation_csv(const std::filesystem::path& path);

struct GenerationSamples {
  std::vector<double> day;  // effective irradiance, W/m^2
  double day_weight = 0.0;
  double night_weight = 0.0;
};

/// Scales irradiance by the panel efficiency and splits records at the night
/// threshold (inclusive) applied to the scaled value.
GenerationSamples prepare_generation_samples(const std::vector<IrradiationRecord>& records,
                                             double efficiency, double night_threshold);

struct KdeOptions {
  std::optional<double> bandwidth;  // Silverman's rule when empty
  std::size_t grid_points = 1001;
  double extent = 1.1;  // grid spans [0, extent * max sample]
};

double silverman_bandwidth(const std::vector<double>& samples);

/// Gaussian kernel density reflected at zero and tabulated on a uniform grid.
GenerationDistribution fit_generation_kde(const std::vector<double>& samples,
                                          const KdeOptions& options = {});

/// Survey answers in $/month converted to $/kWh: value * inflation / kWh.
std::vector<double> load_premium_survey(const std::filesystem::path& path, double monthly_kwh,
                                        double inflation_factor);

/// Maximum-likelihood truncated exponential with v_bar = largest sample.
PremiumDistribution fit_truncated_exponential(const std::vector<double>& samples,
                                              double epsilon = 1.0);

/// Builds a scenario from a JSON config; relative data paths resolve against
/// `base_dir`.
Scenario scenario_from_json(const nlohmann::json& config, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& config_path);

}  // namespace solar
