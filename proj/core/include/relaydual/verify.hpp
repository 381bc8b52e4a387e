#pragma once

// Executable duality checks: paired uplink/downlink optima, dual-variable
// correspondences, constraint tightness, interference-function properties,
// and the Wyner-Ziv chain-rule identity.

#include <string>
#include <vector>

#include "relaydual/downlink.hpp"
#include "relaydual/network.hpp"
#include "relaydual/rates.hpp"
#include "relaydual/uplink.hpp"

namespace relaydual {

struct VerifyTolerances {
  double gap_lp = 1e-8;       // relative sum-power gap, Cases I-II
  double gap_sdp = 1e-4;      // relative sum-power gap, Cases III-IV
  double dual_match = 1e-3;   // beta vs p and lambda vs q, relative infinity norm
  double tightness = 1e-6;    // rate / fronthaul residuals at the optimum
};

struct DualityReport {
  StrategyCase case_id = StrategyCase::I;
  bool uplink_feasible = false;
  bool downlink_feasible = false;
  // Targets within 1% of the feasibility boundary: the numeric checks are
  // reported but do not decide pass/fail (duality is only exact for
  // strictly feasible targets).
  bool near_boundary = false;

  double uplink_sum_power = 0.0;
  double downlink_sum_power = 0.0;
  double relative_gap = 0.0;

  double beta_residual = 0.0;  // ||beta - p_ul||_inf / ||p_ul||_inf
  double q_residual = 0.0;     // ||lambda - q_ul||_inf / ||q_ul||_inf

  double uplink_rate_residual = 0.0;
  double uplink_fronthaul_residual = 0.0;
  double downlink_rate_residual = 0.0;
  double downlink_fronthaul_residual = 0.0;

  bool gap_pass = false;
  bool duals_pass = false;
  bool tightness_pass = false;
  bool feasibility_consistent = false;  // both sides agree on (in)feasibility
  bool pass = false;

  VerifyTolerances tolerances;
  std::string to_json() const;  // same key/value format as instance files
};

DualityReport verify_duality(const NetworkInstance& instance, const RateTargets& targets,
                             const StrategyConfig& config, const VerifyTolerances& tol = {},
                             const SolverSettings& settings = {},
                             const MvBarrierSettings& barrier_settings = {});

struct TightnessResiduals {
  std::vector<double> rate;       // |achieved rate - target| per user
  std::vector<double> fronthaul;  // |achieved fronthaul - cap| per relay
  double max_rate() const;
  double max_fronthaul() const;
};

TightnessResiduals check_tightness(const UplinkSolution& sol, const RateTargets& targets,
                                   const std::vector<double>& caps);
TightnessResiduals check_tightness(const DownlinkSolution& sol, const RateTargets& targets,
                                   const std::vector<double>& caps);

struct PropertyViolation {
  std::string property;  // "positivity", "sub-scalability" or "monotonicity"
  std::vector<double> powers;
  double alpha = 0.0;
  int user = 0;
};

struct InterferencePropertyReport {
  int trials = 0;
  std::vector<PropertyViolation> violations;
  double worst_positivity_margin = 0.0;      // min I_k(p) observed
  double worst_subscale_margin = 0.0;        // min (alpha I(p) - I(alpha p)) observed
  double worst_monotonicity_margin = 0.0;    // min (I(p_hi) - I(p_lo)) observed
  bool pass() const { return violations.empty(); }
};

// Random p >= 0 and alpha in {1.5, 2, 10}: asserts I(p) > 0 elementwise,
// strict sub-scalability I(alpha p) < alpha I(p), and elementwise
// monotonicity. Deterministic for a given seed.
InterferencePropertyReport check_interference_properties(const NetworkInstance& instance,
                                                         const RateTargets& targets,
                                                         const StrategyConfig& config, int trials,
                                                         uint64_t seed = 1);

// | sum_m C_m^WZ - log2(det Gamma / prod_m q_m) |.
double check_wz_chain_rule(const NetworkInstance& instance, const UplinkPoint& point,
                           const std::vector<int>& rho);

}  // namespace relaydual
