// relaydual CLI: generate instances, verify uplink-downlink duality on one
// instance, and run rate-target sweeps to CSV.

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relaydual/downlink.hpp"
#include "relaydual/errors.hpp"
#include "relaydual/network.hpp"
#include "relaydual/sweep.hpp"
#include "relaydual/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitConfigError = 2;

std::vector<double> parse_targets(const std::string& text, int num_users) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size() || v < 0.0) {
      throw relaydual::ParseError("bad rate target '" + item + "'");
    }
    values.push_back(v);
  }
  if (values.size() == 1) values.assign(num_users, values.front());
  if (static_cast<int>(values.size()) != num_users) {
    throw relaydual::ParseError("expected 1 or K rate targets, got " +
                                std::to_string(values.size()));
  }
  return values;
}

int run_gen(int m, int k, uint64_t seed, const std::string& out) {
  const auto instance = relaydual::generate_rayleigh(m, k, seed);
  relaydual::save_instance(instance, out);
  std::cout << "wrote " << m << "x" << k << " instance (seed " << seed << ") to " << out
            << "\n";
  return kExitOk;
}

int run_verify(const std::string& instance_path, const std::string& targets_text,
               const std::string& case_text) {
  const auto instance = relaydual::load_instance(instance_path);
  const auto case_id = relaydual::strategy_case_from_string(case_text);
  relaydual::RateTargets targets{parse_targets(targets_text, instance.num_users)};
  const auto config = relaydual::StrategyConfig::natural(case_id, instance.num_users,
                                                         instance.num_relays);
  const auto report = relaydual::verify_duality(instance, targets, config);
  std::cout << report.to_json() << "\n";
  if (!report.uplink_feasible && !report.downlink_feasible) return kExitInfeasible;
  return report.pass ? kExitOk : kExitInfeasible;
}

int run_sweep_cmd(const std::string& config_path) {
  const auto config = relaydual::load_sweep_config(config_path);
  const auto rows = relaydual::run_sweep(config);
  relaydual::emit_csv(rows, config.output_path);

  int feasible = 0;
  for (const auto& row : rows) feasible += row.feasible ? 1 : 0;
  std::cout << "wrote " << rows.size() << " rows (" << feasible << " feasible) to "
            << config.output_path << "\n";
  return feasible == 0 ? kExitInfeasible : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uplink-downlink duality solver for compressing-relay networks"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a Rayleigh-fading instance file");
  int gen_m = 3;
  int gen_k = 3;
  uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--M", gen_m, "number of relays")->required();
  gen->add_option("--K", gen_k, "number of users")->required();
  gen->add_option("--seed", gen_seed, "RNG seed")->required();
  gen->add_option("--out", gen_out, "output instance path")->required();

  auto* verify = app.add_subcommand("verify", "verify duality on one instance");
  std::string verify_instance;
  std::string verify_targets;
  std::string verify_case;
  verify->add_option("instance", verify_instance, "instance file")->required();
  verify->add_option("targets", verify_targets, "rate target, or K comma-separated targets")
      ->required();
  verify->add_option("case", verify_case, "strategy case: I, II, III or IV")->required();

  auto* sweep = app.add_subcommand("sweep", "run a rate-target sweep from a config file");
  std::string sweep_config;
  sweep->add_option("config", sweep_config, "sweep config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints usage/help text
    return e.get_name() == "CallForHelp" ? kExitOk : kExitConfigError;
  }

  try {
    if (gen->parsed()) return run_gen(gen_m, gen_k, gen_seed, gen_out);
    if (verify->parsed()) return run_verify(verify_instance, verify_targets, verify_case);
    if (sweep->parsed()) return run_sweep_cmd(sweep_config);
  } catch (const relaydual::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const relaydual::DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
