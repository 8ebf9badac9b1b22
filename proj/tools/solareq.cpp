#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "solar/cli/commands.hpp"
#include "solar/errors.hpp"

namespace cli = solar::cli;

int main(int argc, char** argv) {
  cli::configure_logging();
  CLI::App app{"solareq: solar capacity equilibria under three market mechanisms"};
  app.require_subcommand(1);

  std::string config;
  std::string out = "-";

  auto* solve = app.add_subcommand("solve", "solve all mechanisms and the welfare optimum");
  solve->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out, "output JSON; stdout when omitted");

  std::string param;
  std::string values;
  std::string mechanisms = "srt,prt,cb,opt";
  auto* sweep = app.add_subcommand("sweep", "sweep epsilon or pi0 and write a CSV");
  sweep->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", param, "epsilon or pi0")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("--mechanisms", mechanisms, "comma-separated subset of srt,prt,cb,opt");
  sweep->add_option("--out", out, "output CSV; stdout when omitted");

  std::string mechanism;
  std::size_t samples = 1000;
  std::uint64_t seed = 7;
  double perturb = 0.0;
  auto* verify = app.add_subcommand("verify", "Monte-Carlo check of the market equilibrium");
  verify->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  verify->add_option("--mechanism", mechanism, "srt, prt or cb")->required();
  verify->add_option("--samples", samples, "sampled realizations")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--perturb-price", perturb, "debug: relative shift applied to the price");
  verify->add_option("--out", out, "output JSON; stdout when omitted");

  std::string out_dir;
  auto* report = app.add_subcommand("report", "capacity table, ordering report and pi0 sweep");
  report->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  report->add_option("--out-dir", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*solve) {
      return cli::cmd_solve(config, out);
    }
    if (*sweep) {
      cli::SweepSpec spec;
      spec.parameter = cli::parse_sweep_parameter(param);
      spec.values = cli::parse_values(values);
      spec.mechanisms.clear();
      std::stringstream ss(mechanisms);
      std::string name;
      while (std::getline(ss, name, ',')) {
        spec.mechanisms.push_back(solar::parse_mechanism(name));
      }
      return cli::cmd_sweep(config, spec, out);
    }
    if (*verify) {
      return cli::cmd_verify(config, solar::parse_mechanism(mechanism), samples, seed, out, perturb);
    }
    if (*report) {
      return cli::cmd_report(config, out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "solareq: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
