#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "solar/asymptotics.hpp"
#include "solar/market_clearing.hpp"
#include "solar/scenario.hpp"

namespace solar::cli {

enum class SweepParameter { epsilon, pi0 };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::epsilon;
  std::vector<double> values;
  std::vector<Mechanism> mechanisms{Mechanism::srt, Mechanism::prt, Mechanism::cb, Mechanism::opt};
};

struct SweepRow {
  double value = 0.0;
  Mechanism mechanism = Mechanism::srt;
  double capacity = 0.0;
  double residual = 0.0;
};

SweepParameter parse_sweep_parameter(const std::string& name);
/// Comma-separated numbers, e.g. "0,0.5,1".
std::vector<double> parse_values(const std::string& text);

/// All four capacities plus viability, flatness and expansion diagnostics.
/// Sets `ok` to false when a hard invariant fails.
nlohmann::json solve_summary(const Scenario& s, bool& ok);

/// Rows ordered by value, then mechanism. Values are solved concurrently.
std::vector<SweepRow> run_sweep(const Scenario& s, const SweepSpec& spec);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct Pi0SweepCheck {
  std::vector<SweepRow> rows;
  bool monotone = true;         // capacities non-increasing in pi0
  bool srt_exits_first = true;  // srt drops to zero no later than prt and cb
  bool flip_observed = false;   // prt > cb somewhere
};

struct ReportSummary {
  OrderingRow with_premium;  // epsilon = 1
  OrderingRow no_premium;    // epsilon = 0
  OrderingReport ordering;
  Pi0SweepCheck pi0;
  bool table_pattern = false;  // srt < prt = opt <= cb at 1, equal at 0
  bool passed = false;         // hard checks only
};

/// Writes table_ii.csv, ordering_report.csv, ordering_report.json,
/// pi0_sweep.csv and report.json into `out_dir`.
ReportSummary run_report(const Scenario& s, const std::filesystem::path& out_dir);

// Command entry points; each returns the process exit status and throws on
// input or solver errors.
int cmd_solve(const std::filesystem::path& config, const std::filesystem::path& out);
int cmd_sweep(const std::filesystem::path& config, const SweepSpec& spec,
              const std::filesystem::path& out);
int cmd_verify(const std::filesystem::path& config, Mechanism mechanism, std::size_t samples,
               std::uint64_t seed, const std::filesystem::path& out, double price_perturbation = 0.0);
int cmd_report(const std::filesystem::path& config, const std::filesystem::path& out_dir);

/// Reads SOLAREQ_LOG (trace, debug, info, warn, error, off) and routes log
/// output to stderr.
void configure_logging();

}  // namespace solar::cli
