#pragma once

// Downlink sum-power minimization at fixed transmit beamformers: an exact
// tight linear solve for the independent-compression cases, a log-barrier
// Newton solver for the multivariate cases, dual-variable recovery, and the
// uplink-into-downlink duality pipeline.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relaydual/network.hpp"
#include "relaydual/rates.hpp"
#include "relaydual/uplink.hpp"

namespace relaydual {

enum class SolveStatus { Optimal, Infeasible, MaxIter };

const char* to_string(SolveStatus s);

struct DualVariables {
  std::vector<double> rate_duals;       // beta_k, per user
  std::vector<double> fronthaul_duals;  // lambda_m (Cases I-II) / Lambda_m^{(m,m)} (III-IV)
};

struct DownlinkSolution {
  DownlinkPoint point;
  std::vector<double> achieved_rates;
  std::vector<double> achieved_fronthauls;
  double sum_power = 0.0;
  std::optional<DualVariables> duals;
  // Cases III-IV only: full dual block per compression position (the dual of
  // that position's LMI); each should be numerically rank one at the optimum.
  std::vector<HermitianMatrix> fronthaul_dual_blocks;
  SolveStatus status = SolveStatus::Infeasible;
  std::string diagnostic;
};

struct MvBarrierSettings {
  double t_init = 1.0;
  double t_mult = 10.0;
  double newton_tol = 1e-10;
  double ls_alpha = 0.25;
  double ls_beta = 0.5;
  double gap_rel_tol = 1e-8;
  int max_newton_per_stage = 250;
  int max_stages = 60;
};

// Cases I-II. Solves the (K + M) tight system of rate and fronthaul
// equalities; a negative component means the targets are infeasible at these
// beamformers. Duals come from the transposed system and are scaled to
// land directly in uplink power / quantization-noise units.
DownlinkSolution solve_in_tight_linear(const NetworkInstance& instance, const RateTargets& targets,
                                       const CMatrix& beams, const StrategyConfig& config);

// Cases III-IV. Path-following barrier over the linear rate constraints, the
// per-relay compression LMIs, p >= 0 and Q PSD. The compression order is the
// reversal of config's decompression order.
DownlinkSolution solve_mv_barrier(const NetworkInstance& instance, const RateTargets& targets,
                                  const CMatrix& beams, const StrategyConfig& config,
                                  const MvBarrierSettings& settings = {});

// Full pipeline: solve the uplink with adaptive MMSE receivers, transfer the
// beamformers (V = W) and the reversed orders to the downlink, then solve the
// downlink at those fixed beamformers.
std::pair<UplinkSolution, DownlinkSolution> solve_downlink_via_duality(
    const NetworkInstance& instance, const RateTargets& targets, const StrategyConfig& config,
    const SolverSettings& settings = {}, const MvBarrierSettings& barrier_settings = {});

DualVariables extract_duals(const DownlinkSolution& solution);  // throws DualsUnavailable

}  // namespace relaydual
