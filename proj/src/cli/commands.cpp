#include "solar/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "solar/data_pipeline.hpp"
#include "solar/equilibrium.hpp"
#include "solar/errors.hpp"

namespace solar::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<Mechanism> kAll{Mechanism::srt, Mechanism::prt, Mechanism::cb, Mechanism::opt};
const std::vector<double> kReportGrid{0.0, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0};
constexpr int kPi0Points = 21;

std::string sig6(double x) { return fmt::format("{:.6g}", x); }

// "-" or an empty path writes to stdout
void write_text(const fs::path& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write '" + path.string() + "'");
  }
  out << text;
}

json result_json(const EquilibriumResult& r) {
  return {{"capacity", r.capacity},   {"residual", r.residual},
          {"bracket", {r.bracket_lo, r.bracket_hi}},
          {"iterations", r.iterations}, {"viable", r.viable},
          {"converged", r.converged},   {"monotone", r.monotone}};
}

json flatness_json(const FlatnessReport& f) {
  json periods = json::array();
  for (const auto& p : f.periods) {
    json row = {{"name", p.name}, {"index", p.index}, {"excluded", p.excluded}};
    if (!p.excluded) {
      row["upper"] = p.upper;
      row["r0"] = p.r0;
      row["delta"] = p.delta;
    }
    periods.push_back(row);
  }
  return {{"periods", periods}, {"max_delta", f.max_delta}};
}

json expansion_json(const ExpansionCoefficients& e) {
  json out = {{"c0", e.c0}, {"prt_slope", e.prt_slope}, {"cb_slope", e.cb_slope}};
  out["lambda"] = e.lambda ? json(*e.lambda) : json(nullptr);
  out["beta"] = e.beta ? json(*e.beta) : json(nullptr);
  return out;
}

json row_json(const OrderingRow& r) {
  json out = {{"epsilon", r.epsilon},
              {"srt", r.c_srt},
              {"prt", r.c_prt},
              {"cb", r.c_cb},
              {"opt", r.c_opt},
              {"srt_le_prt", r.srt_le_prt},
              {"prt_eq_opt", r.prt_eq_opt},
              {"prt_le_cb", r.prt_le_cb},
              {"prt_le_cb_informational", r.prt_le_cb_informational},
              {"gap", r.gap},
              {"first_order_gap", r.first_order_gap}};
  out["all_equal"] = r.all_equal ? json(*r.all_equal) : json(nullptr);
  out["first_order_ok"] = r.first_order_ok ? json(*r.first_order_ok) : json(nullptr);
  return out;
}

json ordering_json(const OrderingReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back(row_json(r));
  }
  json out = {{"rows", rows},
              {"flatness", flatness_json(rep.flatness)},
              {"notes", rep.notes},
              {"passed", rep.passed}};
  out["coefficients"] = rep.coefficients ? expansion_json(*rep.coefficients) : json(nullptr);
  out["k_estimate"] = rep.k_estimate ? json(*rep.k_estimate) : json(nullptr);
  return out;
}

std::string flag(const std::optional<bool>& b) { return b ? (*b ? "1" : "0") : ""; }

std::string ordering_csv(const OrderingReport& rep) {
  std::ostringstream os;
  os << "epsilon,srt,prt,cb,opt,srt_le_prt,prt_eq_opt,prt_le_cb,prt_le_cb_informational,"
        "all_equal,gap,first_order_gap,first_order_ok\n";
  for (const auto& r : rep.rows) {
    os << sig6(r.epsilon) << ',' << sig6(r.c_srt) << ',' << sig6(r.c_prt) << ',' << sig6(r.c_cb)
       << ',' << sig6(r.c_opt) << ',' << r.srt_le_prt << ',' << r.prt_eq_opt << ',' << r.prt_le_cb
       << ',' << r.prt_le_cb_informational << ',' << flag(r.all_equal) << ',' << sig6(r.gap) << ','
       << sig6(r.first_order_gap) << ',' << flag(r.first_order_ok) << '\n';
  }
  return os.str();
}

const OrderingRow& row_at(const OrderingReport& rep, double eps) {
  for (const auto& r : rep.rows) {
    if (r.epsilon == eps) {
      return r;
    }
  }
  throw InvalidArgument("ordering report has no row for epsilon " + sig6(eps));
}

Pi0SweepCheck pi0_sweep(const Scenario& s) {
  // from half the configured cost to past the point where every mechanism exits
  const double exit_cost = unit_revenue_rt(s, Mechanism::prt, 0.0);
  const double lo = 0.5 * std::min(s.pi0, exit_cost);
  const double hi = 1.2 * exit_cost;
  SweepSpec spec;
  spec.parameter = SweepParameter::pi0;
  for (int k = 0; k < kPi0Points; ++k) {
    spec.values.push_back(lo + (hi - lo) * k / (kPi0Points - 1));
  }
  spec.mechanisms = {Mechanism::srt, Mechanism::prt, Mechanism::cb};
  Pi0SweepCheck out;
  out.rows = run_sweep(s, spec);

  for (Mechanism m : spec.mechanisms) {
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& r : out.rows) {
      if (r.mechanism != m) {
        continue;
      }
      if (r.capacity > previous * (1.0 + 1e-9)) {
        out.monotone = false;
      }
      previous = r.capacity;
    }
  }
  const auto first_zero = [&](Mechanism m) {
    for (const auto& r : out.rows) {
      if (r.mechanism == m && r.capacity == 0.0) {
        return r.value;
      }
    }
    return std::numeric_limits<double>::infinity();
  };
  const double srt_exit = first_zero(Mechanism::srt);
  out.srt_exits_first = srt_exit <= first_zero(Mechanism::prt) && srt_exit <= first_zero(Mechanism::cb);
  for (std::size_t k = 0; k + 2 < out.rows.size(); k += 3) {
    if (out.rows[k + 1].capacity > out.rows[k + 2].capacity) {
      out.flip_observed = true;
    }
  }
  return out;
}

}  // namespace

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "epsilon") {
    return SweepParameter::epsilon;
  }
  if (name == "pi0") {
    return SweepParameter::pi0;
  }
  throw InvalidArgument("unknown sweep parameter '" + name + "' (expected epsilon or pi0)");
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !std::isfinite(v)) {
      throw InvalidArgument("cannot parse sweep value '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw InvalidArgument("sweep needs at least one value");
  }
  return out;
}

json solve_summary(const Scenario& s, bool& ok) {
  json out;
  out["provenance"] = s.provenance;
  out["epsilon"] = s.epsilon();
  out["pi0"] = s.pi0;
  out["t_tilde"] = s.t_tilde;
  out["premium"] = s.premium.describe();

  const Viability v = check_viability(s);
  out["viability"] = {{"viable", v.viable}, {"margin", v.margin}};

  json results;
  json capacities;
  std::vector<EquilibriumResult> solved;
  for (Mechanism m : kAll) {
    solved.push_back(solve_ne(s, m));
    results[std::string(to_string(m))] = result_json(solved.back());
    capacities[std::string(to_string(m))] = solved.back().capacity;
  }
  out["results"] = results;
  out["capacities"] = capacities;

  ok = std::all_of(solved.begin(), solved.end(), [](const auto& r) { return r.converged; });
  const double srt = solved[0].capacity;
  const double prt = solved[1].capacity;
  const double opt = solved[3].capacity;
  const bool ordered = srt <= prt + 1e-7 * std::max(1.0, prt) && prt == opt;
  out["checks"] = {{"srt_le_prt_eq_opt", ordered}};
  ok = ok && ordered;

  if (srt > 0.0) {
    out["flatness"] = flatness_json(flatness_fit(s, srt));
  } else {
    out["flatness"] = nullptr;
  }
  try {
    out["expansion"] = expansion_json(expansion_coefficients(s));
  } catch (const std::exception& e) {
    out["expansion"] = nullptr;
    out["expansion_error"] = e.what();
  }
  return out;
}

std::vector<SweepRow> run_sweep(const Scenario& s, const SweepSpec& spec) {
  if (spec.values.empty()) {
    throw InvalidArgument("sweep needs at least one value");
  }
  if (spec.mechanisms.empty()) {
    throw InvalidArgument("sweep needs at least one mechanism");
  }
  for (double v : spec.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("sweep values must be finite and non-negative");
    }
  }
  std::vector<double> values = spec.values;
  std::sort(values.begin(), values.end());
  std::vector<Mechanism> mechanisms = spec.mechanisms;
  std::sort(mechanisms.begin(), mechanisms.end());
  mechanisms.erase(std::unique(mechanisms.begin(), mechanisms.end()), mechanisms.end());

  std::vector<std::future<std::vector<SweepRow>>> jobs;
  for (double value : values) {
    jobs.push_back(std::async(std::launch::async, [&s, &mechanisms, &spec, value] {
      const Scenario point =
          spec.parameter == SweepParameter::epsilon ? s.with_epsilon(value) : s.with_pi0(value);
      std::vector<SweepRow> rows;
      for (Mechanism m : mechanisms) {
        const EquilibriumResult r = solve_ne(point, m);
        rows.push_back({value, m, r.capacity, r.residual});
      }
      return rows;
    }));
  }
  std::vector<SweepRow> out;
  for (auto& job : jobs) {
    auto rows = job.get();
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "value,mechanism,capacity,residual\n";
  for (const auto& r : rows) {
    os << sig6(r.value) << ',' << to_string(r.mechanism) << ',' << sig6(r.capacity) << ','
       << sig6(r.residual) << '\n';
  }
  return os.str();
}

ReportSummary run_report(const Scenario& s, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  ReportSummary out;
  out.ordering = ordering_report(s, kReportGrid);
  out.with_premium = row_at(out.ordering, 1.0);
  out.no_premium = row_at(out.ordering, 0.0);
  out.pi0 = pi0_sweep(s);

  const auto& a = out.with_premium;
  out.table_pattern = a.c_srt < a.c_prt && a.c_prt == a.c_opt && a.c_prt <= a.c_cb &&
                      out.no_premium.all_equal.value_or(false);

  std::ostringstream table;
  table << "epsilon,srt,prt,opt,cb\n";
  for (const OrderingRow* r : {&out.with_premium, &out.no_premium}) {
    table << sig6(r->epsilon) << ',' << sig6(r->c_srt) << ',' << sig6(r->c_prt) << ','
          << sig6(r->c_opt) << ',' << sig6(r->c_cb) << '\n';
  }
  write_text(out_dir / "table_ii.csv", table.str());
  write_text(out_dir / "ordering_report.csv", ordering_csv(out.ordering));
  write_text(out_dir / "ordering_report.json", ordering_json(out.ordering).dump(2) + "\n");
  write_text(out_dir / "pi0_sweep.csv", sweep_csv(out.pi0.rows));

  out.passed = out.ordering.passed && out.pi0.monotone && out.pi0.srt_exits_first;
  json summary = {{"table_pattern", out.table_pattern},
                  {"pi0_sweep",
                   {{"monotone", out.pi0.monotone},
                    {"srt_exits_first", out.pi0.srt_exits_first},
                    {"prt_cb_flip_observed", out.pi0.flip_observed}}},
                  {"ordering_passed", out.ordering.passed},
                  {"passed", out.passed},
                  {"provenance", s.provenance}};
  write_text(out_dir / "report.json", summary.dump(2) + "\n");
  if (!out.table_pattern) {
    spdlog::warn("table pattern srt < prt = opt <= cb at epsilon 1 not observed");
  }
  if (out.pi0.flip_observed) {
    spdlog::info("prt exceeds cb for some pi0 in the sweep");
  }
  return out;
}

int cmd_solve(const fs::path& config, const fs::path& out) {
  const Scenario s = load_scenario(config);
  bool ok = true;
  json summary = solve_summary(s, ok);
  write_text(out, summary.dump(2) + "\n");
  return ok ? 0 : 1;
}

int cmd_sweep(const fs::path& config, const SweepSpec& spec, const fs::path& out) {
  const Scenario s = load_scenario(config);
  write_text(out, sweep_csv(run_sweep(s, spec)));
  return 0;
}

int cmd_verify(const fs::path& config, Mechanism mechanism, std::size_t samples, std::uint64_t seed,
               const fs::path& out, double price_perturbation) {
  if (mechanism == Mechanism::opt) {
    throw InvalidArgument("verify takes srt, prt or cb");
  }
  const Scenario s = load_scenario(config);
  const EquilibriumResult eq = solve_ne(s, mechanism);
  VerifyOptions o;
  o.samples = samples;
  o.seed = seed;
  o.price_perturbation = price_perturbation;
  const VerificationReport r = verify_ce(s, mechanism, eq.capacity, o);
  json report = {{"mechanism", std::string(to_string(mechanism))},
                 {"capacity", r.capacity},
                 {"samples", r.samples},
                 {"seed", seed},
                 {"limited_samples", r.limited_samples},
                 {"abundant_samples", r.abundant_samples},
                 {"max_buyer_gain", r.max_buyer_gain},
                 {"max_seller_gain", r.max_seller_gain},
                 {"max_clearing_residual", r.max_clearing_residual},
                 {"max_violation", r.max_violation},
                 {"tolerance", o.tolerance},
                 {"price_perturbation", price_perturbation},
                 {"passed", r.passed}};
  report["cb_price"] = r.cb_price ? json(*r.cb_price) : json(nullptr);
  write_text(out, report.dump(2) + "\n");
  if (!r.passed) {
    spdlog::error("{}: equilibrium violated, max gain {:.3g} > {:.3g}", to_string(mechanism),
                  r.max_violation, o.tolerance);
  }
  return r.passed ? 0 : 1;
}

int cmd_report(const fs::path& config, const fs::path& out_dir) {
  const Scenario s = load_scenario(config);
  return run_report(s, out_dir).passed ? 0 : 1;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("solareq");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("SOLAREQ_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

}  // namespace solar::cli
