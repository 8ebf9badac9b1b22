#include "solar/data_pipeline.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "solar/errors.hpp"

namespace solar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    out.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

double parse_number(const std::string& text, const std::string& what, long line) {
  if (text.empty()) {
    throw DataError("missing " + what, line);
  }
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(value)) {
    throw DataError("cannot parse " + what + " '" + text + "'", line);
  }
  return value;
}

std::ifstream open_for_reading(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "'");
  }
  return in;
}

// Strips a UTF-8 byte order mark and a trailing carriage return.
std::string clean_line(std::string line, bool first) {
  if (first && line.rfind("\xEF\xBB\xBF", 0) == 0) {
    line.erase(0, 3);
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  return line;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= sorted.size()) {
    return sorted.back();
  }
  return sorted[k] + (pos - static_cast<double>(k)) * (sorted[k + 1] - sorted[k]);
}

void check_samples(const std::vector<double>& samples, const char* what) {
  if (samples.size() < 2) {
    throw InvalidArgument(std::string(what) + " needs at least two samples");
  }
  for (double x : samples) {
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidArgument(std::string(what) + " needs finite non-negative samples");
    }
  }
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) {
    throw InvalidArgument(std::string(what) + ": all samples are equal");
  }
}

// --- config helpers -------------------------------------------------------

const json& require(const json& node, const char* key, const std::string& where) {
  if (!node.is_object() || !node.contains(key)) {
    throw DataError(where + ": missing required key '" + key + "'");
  }
  return node.at(key);
}

double number_at(const json& node, const char* key, const std::string& where) {
  const json& v = require(node, key, where);
  if (!v.is_number()) {
    throw DataError(where + ": '" + key + "' must be a number");
  }
  return v.get<double>();
}

double number_or(const json& node, const char* key, double fallback, const std::string& where) {
  return node.contains(key) ? number_at(node, key, where) : fallback;
}

std::string string_at(const json& node, const char* key, const std::string& where) {
  const json& v = require(node, key, where);
  if (!v.is_string()) {
    throw DataError(where + ": '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::vector<double> numbers_at(const json& node, const char* key, const std::string& where) {
  const json& v = require(node, key, where);
  if (!v.is_array()) {
    throw DataError(where + ": '" + key + "' must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) {
      throw DataError(where + ": '" + key + "' must be an array of numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& file) {
  fs::path p(file);
  if (p.is_relative()) {
    p = base / p;
  }
  if (!fs::exists(p)) {
    throw DataError("data file not found: '" + p.string() + "'");
  }
  return p;
}

struct BuiltGeneration {
  GenerationDistribution model;
  std::optional<double> weight;  // record count when derived from data
  std::string provenance;
};

BuiltGeneration build_generation(const json& spec, const fs::path& base, const std::string& where) {
  const std::string kind = string_at(spec, "kind", where);
  BuiltGeneration out;
  std::ostringstream prov;
  if (kind == "uniform") {
    out.model = GenerationDistribution::uniform(number_or(spec, "lo", 0.0, where),
                                                number_at(spec, "hi", where));
  } else if (kind == "point_mass") {
    out.model = GenerationDistribution::point_mass(number_or(spec, "value", 0.0, where));
  } else if (kind == "tabulated") {
    out.model = GenerationDistribution::tabulated(numbers_at(spec, "grid", where),
                                                  numbers_at(spec, "density", where),
                                                  spec.value("normalize", false));
  } else if (kind == "irradiance") {
    const fs::path file = resolve(base, string_at(spec, "file", where));
    const std::string segment = spec.value("segment", std::string("day"));
    const double efficiency = number_or(spec, "efficiency", 0.2, where);
    const double threshold = number_or(spec, "night_threshold_w_per_m2", 0.1, where);
    const double conversion = number_or(spec, "kwh_per_kw_per_w_per_m2", 1e-3, where);
    const auto records = load_irradiation_csv(file);
    const auto samples = prepare_generation_samples(records, efficiency, threshold);
    prov << where << ": " << records.size() << " irradiance records from " << file.string()
         << ", efficiency " << efficiency << ", night threshold " << threshold << " W/m^2";
    if (segment == "night") {
      out.model = GenerationDistribution::point_mass(0.0);
      out.weight = samples.night_weight;
      prov << "; night segment, " << samples.night_weight << " records, point mass at 0";
    } else if (segment == "day") {
      std::vector<double> g(samples.day.size());
      std::transform(samples.day.begin(), samples.day.end(), g.begin(),
                     [&](double x) { return x * conversion; });
      KdeOptions kde;
      if (spec.contains("bandwidth")) {
        kde.bandwidth = number_at(spec, "bandwidth", where);
      }
      kde.grid_points = static_cast<std::size_t>(number_or(spec, "grid_points", 1001, where));
      const double h = kde.bandwidth ? *kde.bandwidth : silverman_bandwidth(g);
      out.model = fit_generation_kde(g, kde);
      out.weight = samples.day_weight;
      prov << "; day segment, " << samples.day.size() << " samples, conversion " << conversion
           << ", Gaussian KDE bandwidth " << h << " reflected at 0, fitted mean "
           << out.model.mean();
    } else {
      throw DataError(where + ": segment must be 'day' or 'night', got '" + segment + "'");
    }
  } else {
    throw DataError(where + ": unknown generation kind '" + kind +
                    "' (expected uniform, point_mass, tabulated or irradiance)");
  }
  if (out.provenance.empty()) {
    out.provenance = prov.str().empty() ? where + ": " + out.model.describe() : prov.str();
  }
  return out;
}

PremiumDistribution build_premium(const json& spec, const fs::path& base, double epsilon,
                                  std::string& provenance) {
  const std::string where = "premium";
  const std::string kind = string_at(spec, "kind", where);
  std::ostringstream prov;
  PremiumDistribution out;
  if (kind == "uniform") {
    out = PremiumDistribution::uniform(number_at(spec, "v_bar", where), epsilon);
  } else if (kind == "truncated_exponential") {
    const double v_bar = number_at(spec, "v_bar", where);
    if (spec.contains("rate") == spec.contains("mean")) {
      throw DataError(where + ": give exactly one of 'rate' and 'mean'");
    }
    out = spec.contains("rate")
              ? PremiumDistribution::truncated_exponential(number_at(spec, "rate", where), v_bar, epsilon)
              : PremiumDistribution::truncated_exponential_with_mean(number_at(spec, "mean", where),
                                                                     v_bar, epsilon);
  } else if (kind == "survey") {
    const fs::path file = resolve(base, string_at(spec, "file", where));
    const double kwh = number_or(spec, "monthly_kwh", 600.0, where);
    const double inflation = number_or(spec, "inflation_factor", 1.0, where);
    const std::string fit = spec.value("fit", std::string("truncated_exponential"));
    const auto samples = load_premium_survey(file, kwh, inflation);
    prov << "premium: " << samples.size() << " survey answers from " << file.string() << ", "
         << kwh << " kWh/month, inflation factor " << inflation << "; ";
    if (fit == "truncated_exponential") {
      out = fit_truncated_exponential(samples, epsilon);
      prov << "truncated exponential MLE";
    } else if (fit == "empirical") {
      out = PremiumDistribution::empirical(samples, epsilon);
      prov << "empirical quantiles";
    } else {
      throw DataError(where + ": fit must be 'truncated_exponential' or 'empirical'");
    }
  } else {
    throw DataError(where + ": unknown premium kind '" + kind +
                    "' (expected uniform, truncated_exponential or survey)");
  }
  prov << (kind == "survey" ? ", " : "premium: ") << out.describe();
  provenance = prov.str();
  return out;
}

}  // namespace

std::vector<IrradiationRecord> load_irradiation_csv(const fs::path& path) {
  auto in = open_for_reading(path);
  static const std::regex iso(
      R"(^\d{4}-\d{2}-\d{2}([T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?$)");
  std::vector<IrradiationRecord> out;
  std::string line;
  long number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    line = clean_line(line, number == 1);
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    if (!header_seen) {
      if (fields.size() < 2 || fields[0] != "timestamp" || fields[1] != "ghi_w_per_m2") {
        throw DataError(path.string() + ": expected header 'timestamp,ghi_w_per_m2'", number);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() < 2) {
      throw DataError(path.string() + ": row needs timestamp and ghi_w_per_m2", number);
    }
    if (!std::regex_match(fields[0], iso)) {
      throw DataError(path.string() + ": unparseable timestamp '" + fields[0] + "'", number);
    }
    const double ghi = parse_number(fields[1], "ghi_w_per_m2", number);
    if (ghi < 0.0) {
      throw DataError(path.string() + ": negative irradiance " + fields[1], number);
    }
    out.push_back({fields[0], ghi});
  }
  if (!header_seen) {
    spdlog::warn("irradiation file '{}' is empty", path.string());
  }
  return out;
}

GenerationSamples prepare_generation_samples(const std::vector<IrradiationRecord>& records,
                                             double efficiency, double night_threshold) {
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw InvalidArgument("efficiency must lie in (0, 1]");
  }
  if (!(night_threshold >= 0.0)) {
    throw InvalidArgument("night threshold must be non-negative");
  }
  GenerationSamples out;
  for (const auto& r : records) {
    const double effective = r.ghi * efficiency;
    if (effective <= night_threshold) {
      out.night_weight += 1.0;
    } else {
      out.day.push_back(effective);
      out.day_weight += 1.0;
    }
  }
  return out;
}

double silverman_bandwidth(const std::vector<double>& samples) {
  check_samples(samples, "bandwidth rule");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) {
    ss += (x - mean) * (x - mean);
  }
  const double sigma = std::sqrt(ss / (n - 1.0));
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sigma, iqr / 1.34) : sigma;
  return 0.9 * spread * std::pow(n, -0.2);
}

GenerationDistribution fit_generation_kde(const std::vector<double>& samples,
                                          const KdeOptions& options) {
  check_samples(samples, "KDE fit");
  const double h = options.bandwidth ? *options.bandwidth : silverman_bandwidth(samples);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InvalidArgument("KDE bandwidth must be positive");
  }
  if (options.grid_points < 3) {
    throw InvalidArgument("KDE grid needs at least three points");
  }
  const double top = options.extent * *std::max_element(samples.begin(), samples.end());
  const std::size_t m = options.grid_points;
  std::vector<double> grid(m);
  std::vector<double> density(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    grid[j] = top * static_cast<double>(j) / static_cast<double>(m - 1);
  }
  const double cutoff = 8.0 * h;
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 0; j < m; ++j) {
    const double g = grid[j];
    double sum = 0.0;
    // direct kernel plus its mirror image across zero
    auto first = std::lower_bound(sorted.begin(), sorted.end(), g - cutoff);
    auto last = std::upper_bound(sorted.begin(), sorted.end(), g + cutoff);
    for (auto it = first; it != last; ++it) {
      const double z = (g - *it) / h;
      sum += std::exp(-0.5 * z * z);
    }
    for (auto it = sorted.begin(); it != sorted.end() && *it <= cutoff - g; ++it) {
      const double z = (g + *it) / h;
      sum += std::exp(-0.5 * z * z);
    }
    density[j] = sum * kInvSqrt2Pi / (static_cast<double>(sorted.size()) * h);
  }
  return GenerationDistribution::tabulated(std::move(grid), std::move(density), true);
}

std::vector<double> load_premium_survey(const fs::path& path, double monthly_kwh,
                                        double inflation_factor) {
  if (!(monthly_kwh > 0.0) || !(inflation_factor > 0.0)) {
    throw InvalidArgument("monthly_kwh and inflation_factor must be positive");
  }
  auto in = open_for_reading(path);
  std::vector<double> out;
  std::string line;
  long number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    line = trim(clean_line(line, number == 1));
    if (line.empty()) {
      continue;
    }
    if (!header_seen) {
      if (split_fields(line).at(0) != "usd_per_month") {
        throw DataError(path.string() + ": expected header 'usd_per_month'", number);
      }
      header_seen = true;
      continue;
    }
    const double usd = parse_number(split_fields(line).at(0), "usd_per_month", number);
    if (usd < 0.0) {
      throw DataError(path.string() + ": negative survey answer " + line, number);
    }
    out.push_back(usd * inflation_factor / monthly_kwh);
  }
  if (out.empty()) {
    throw DataError(path.string() + ": survey file has no answers");
  }
  return out;
}

PremiumDistribution fit_truncated_exponential(const std::vector<double>& samples, double epsilon) {
  check_samples(samples, "truncated exponential fit");
  const double v_bar = *std::max_element(samples.begin(), samples.end());
  const double mean =
      std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  // the likelihood score vanishes exactly where the model mean matches the sample mean
  return PremiumDistribution::truncated_exponential_with_mean(mean, v_bar, epsilon);
}

Scenario scenario_from_json(const json& config, const fs::path& base_dir) {
  if (!config.is_object()) {
    throw DataError("scenario config must be a JSON object");
  }
  Scenario s;
  const json& periods = require(config, "periods", "config");
  if (!periods.is_array() || periods.empty()) {
    throw DataError("config: 'periods' must be a non-empty array");
  }
  for (std::size_t t = 0; t < periods.size(); ++t) {
    const json& node = periods[t];
    PeriodProfile p;
    p.name = node.value("name", "period" + std::to_string(t));
    const std::string where = "periods[" + std::to_string(t) + "] '" + p.name + "'";
    p.load = number_at(node, "load_gwh", where);
    p.utility_price = number_at(node, "utility_price_usd_per_kwh", where);
    auto built = build_generation(require(node, "generation", where), base_dir, where);
    p.generation = std::move(built.model);
    if (node.contains("weight")) {
      p.weight = number_at(node, "weight", where);
    } else if (built.weight) {
      p.weight = *built.weight;
    }
    s.provenance.push_back(built.provenance + ", weight " + std::to_string(p.weight));
    s.periods.push_back(std::move(p));
  }
  const double epsilon = number_or(config, "epsilon", 1.0, "config");
  std::string premium_provenance;
  s.premium = build_premium(require(config, "premium", "config"), base_dir, epsilon,
                            premium_provenance);
  s.provenance.push_back(premium_provenance + ", epsilon " + std::to_string(epsilon));
  s.pi0 = number_at(config, "pi0_usd_per_kw", "config");
  s.t_tilde = number_or(config, "t_tilde", 1.0, "config");
  s.c_bar = number_or(config, "c_bar_kw", 1.0, "config");
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const fs::path& config_path) {
  auto in = open_for_reading(config_path);
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("config '" + config_path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    Scenario s = scenario_from_json(config, config_path.parent_path());
    s.provenance.insert(s.provenance.begin(), "config: " + config_path.string());
    return s;
  } catch (const InvalidArgument& e) {
    throw DataError("config '" + config_path.string() + "': " + e.what());
  }
}

}  // namespace solar
