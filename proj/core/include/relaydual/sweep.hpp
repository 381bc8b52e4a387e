#pragma once

// Rate-target sweeps over the four strategy cases with CSV emission.

#include <optional>
#include <string>
#include <vector>

#include "relaydual/network.hpp"
#include "relaydual/verify.hpp"

namespace relaydual {

struct SweepConfig {
  // Instance source: a file path wins over (seed, dims) when both are given.
  std::optional<std::string> instance_path;
  uint64_t seed = 7;
  int num_relays = 3;
  int num_users = 3;
  std::optional<double> sigma2;               // overrides the generated default
  std::optional<std::vector<double>> caps;    // ditto (scalar broadcast allowed in the file)

  // Symmetric per-user targets, strictly increasing. The defaults reproduce
  // the reference experiment: 3x3 Rayleigh network, caps of 3 bits, targets
  // 0.25..2.0, all four strategy cases.
  std::vector<double> rate_grid{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  std::vector<StrategyCase> cases{StrategyCase::I, StrategyCase::II, StrategyCase::III,
                                  StrategyCase::IV};
  // Uplink orders applied to every case; natural (identity) when absent.
  std::optional<std::vector<int>> decode_order;
  std::optional<std::vector<int>> decompress_order;
  std::string output_path = "sweep.csv";
  VerifyTolerances tolerances;
  SolverSettings solver;
  MvBarrierSettings barrier;

  void check() const;  // throws ParseError on an invalid configuration
  NetworkInstance make_instance() const;
};

SweepConfig load_sweep_config(const std::string& path);

struct SweepRow {
  StrategyCase case_id = StrategyCase::I;
  double rate_target = 0.0;
  bool feasible = false;
  double ul_power = 0.0;
  double dl_power = 0.0;
  double rel_gap = 0.0;
  double beta_resid = 0.0;
  double q_resid = 0.0;
  double wall_seconds = 0.0;
};

// One row per (case, rate target), sorted by (case, rate target); the solves
// are deterministic, so identical configs produce byte-identical CSVs.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

// Header: case,rate_target,ul_power,dl_power,rel_gap,beta_resid,q_resid,status
// 12 significant digits, '\n' newlines; infeasible rows leave the numeric
// columns empty and set status to "infeasible".
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::string csv_text(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_csv(const std::string& path);

}  // namespace relaydual
