#pragma once

// Global uplink sum-power minimization via fixed-point power control, with
// closed-form quantization noises and (optionally stage-reduced) MMSE
// receive beamformers.

#include <optional>
#include <string>
#include <vector>

#include "relaydual/network.hpp"
#include "relaydual/rates.hpp"

namespace relaydual {

struct SolverSettings {
  int max_iters = 100000;
  double rel_tol = 1e-10;
  double divergence_power_cap = 1e12;
  // Starting power for every user. Zero is the canonical minimal start; any
  // nonnegative start converges to the same fixed point when one exists.
  double initial_power = 0.0;
};

struct UplinkSolution {
  UplinkPoint point;
  std::vector<double> achieved_rates;
  std::vector<double> achieved_fronthauls;
  double sum_power = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
};

// Tight independent-compression noise: q_m = (sum_k p_k |h_mk|^2 + sigma^2) / (2^{C_m} - 1).
std::vector<double> q_independent(const NetworkInstance& instance, const std::vector<double>& p);

// Tight Wyner-Ziv noises, filled in decompression order: each q uses the
// already-fixed earlier noises through the covariance Schur complement, and
// by construction makes every Wyner-Ziv fronthaul rate exactly C_m.
std::vector<double> q_wyner_ziv(const NetworkInstance& instance, const std::vector<double>& p,
                                const std::vector<int>& rho);

// Unit-norm MMSE receivers: w_k ~ (sum_{j != k} p_j h_j h_j^H + diag(q) + sigma^2 I)^{-1} h_k.
CMatrix mmse_beamformers(const NetworkInstance& instance, const std::vector<double>& p,
                         const std::vector<double>& q);

// One application of the power-control interference map I(p): the minimal
// power for each user to meet its target when everyone else transmits p,
// with the quantization noises eliminated through their tight closed forms
// and the receiver chosen as the (stage-reduced, for SIC) MMSE beamformer.
std::vector<double> interference_map(const NetworkInstance& instance, const std::vector<double>& p,
                                     const RateTargets& targets, const StrategyConfig& config);

// Picard iteration p <- I(p) from p = initial_power. Reports converged=false
// (declared infeasible) when powers pass the divergence cap or the iteration
// budget runs out. When fixed_beamformers is given they are used instead of
// MMSE receivers and must use every relay (throws DegenerateRelay otherwise).
UplinkSolution fixed_point_solve(const NetworkInstance& instance, const RateTargets& targets,
                                 const StrategyConfig& config, const SolverSettings& settings = {},
                                 const std::optional<CMatrix>& fixed_beamformers = std::nullopt);

}  // namespace relaydual
