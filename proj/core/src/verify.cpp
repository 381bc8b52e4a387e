#include "relaydual/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "relaydual/errors.hpp"

namespace relaydual {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double rel_inf_residual(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double scale = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / std::max(scale, 1e-300);
}

}  // namespace

double TightnessResiduals::max_rate() const {
  return rate.empty() ? 0.0 : *std::max_element(rate.begin(), rate.end());
}

double TightnessResiduals::max_fronthaul() const {
  return fronthaul.empty() ? 0.0 : *std::max_element(fronthaul.begin(), fronthaul.end());
}

TightnessResiduals check_tightness(const UplinkSolution& sol, const RateTargets& targets,
                                   const std::vector<double>& caps) {
  TightnessResiduals r;
  for (size_t k = 0; k < targets.rates.size(); ++k) {
    r.rate.push_back(std::abs(sol.achieved_rates[k] - targets.rates[k]));
  }
  for (size_t m = 0; m < caps.size(); ++m) {
    r.fronthaul.push_back(std::abs(sol.achieved_fronthauls[m] - caps[m]));
  }
  return r;
}

TightnessResiduals check_tightness(const DownlinkSolution& sol, const RateTargets& targets,
                                   const std::vector<double>& caps) {
  TightnessResiduals r;
  for (size_t k = 0; k < targets.rates.size(); ++k) {
    r.rate.push_back(std::abs(sol.achieved_rates[k] - targets.rates[k]));
  }
  for (size_t m = 0; m < caps.size(); ++m) {
    r.fronthaul.push_back(std::abs(sol.achieved_fronthauls[m] - caps[m]));
  }
  return r;
}

std::string DualityReport::to_json() const {
  nlohmann::json j;
  j["case"] = to_string(case_id);
  j["uplink_feasible"] = uplink_feasible;
  j["downlink_feasible"] = downlink_feasible;
  j["near_boundary"] = near_boundary;
  j["uplink_sum_power"] = uplink_sum_power;
  j["downlink_sum_power"] = downlink_sum_power;
  j["relative_gap"] = relative_gap;
  j["beta_residual"] = beta_residual;
  j["q_residual"] = q_residual;
  j["uplink_rate_residual"] = uplink_rate_residual;
  j["uplink_fronthaul_residual"] = uplink_fronthaul_residual;
  j["downlink_rate_residual"] = downlink_rate_residual;
  j["downlink_fronthaul_residual"] = downlink_fronthaul_residual;
  j["gap_pass"] = gap_pass;
  j["duals_pass"] = duals_pass;
  j["tightness_pass"] = tightness_pass;
  j["feasibility_consistent"] = feasibility_consistent;
  j["pass"] = pass;
  j["tolerances"] = {{"gap_lp", tolerances.gap_lp},
                     {"gap_sdp", tolerances.gap_sdp},
                     {"dual_match", tolerances.dual_match},
                     {"tightness", tolerances.tightness}};
  return j.dump(2);
}

DualityReport verify_duality(const NetworkInstance& instance, const RateTargets& targets,
                             const StrategyConfig& config, const VerifyTolerances& tol,
                             const SolverSettings& settings,
                             const MvBarrierSettings& barrier_settings) {
  DualityReport report;
  report.case_id = config.case_id;
  report.tolerances = tol;

  auto [ul, dl] = solve_downlink_via_duality(instance, targets, config, settings,
                                             barrier_settings);
  report.uplink_feasible = ul.converged;
  report.downlink_feasible = dl.status == SolveStatus::Optimal;
  report.feasibility_consistent = report.uplink_feasible == report.downlink_feasible;

  if (!report.uplink_feasible || !report.downlink_feasible) {
    // Two-sided infeasibility is exactly what the feasibility-region
    // equivalence predicts, so it counts as a pass for that check.
    report.pass = report.feasibility_consistent;
    return report;
  }

  // Boundary probe: if inflating every target by 1% already breaks
  // feasibility, this point sits in the excluded near-boundary band.
  RateTargets inflated = targets;
  for (double& r : inflated.rates) r *= 1.01;
  report.near_boundary = !fixed_point_solve(instance, inflated, config, settings).converged;

  report.uplink_sum_power = ul.sum_power;
  report.downlink_sum_power = dl.sum_power;
  report.relative_gap =
      std::abs(ul.sum_power - dl.sum_power) / std::max(std::abs(ul.sum_power), 1e-300);

  const DualVariables duals = extract_duals(dl);
  report.beta_residual = rel_inf_residual(duals.rate_duals, ul.point.user_powers);
  report.q_residual = rel_inf_residual(duals.fronthaul_duals, ul.point.quant_noise);

  const auto ul_res = check_tightness(ul, targets, instance.fronthaul_caps);
  const auto dl_res = check_tightness(dl, targets, instance.fronthaul_caps);
  report.uplink_rate_residual = ul_res.max_rate();
  report.uplink_fronthaul_residual = ul_res.max_fronthaul();
  report.downlink_rate_residual = dl_res.max_rate();
  report.downlink_fronthaul_residual = dl_res.max_fronthaul();

  const double gap_tol = uses_wyner_ziv(config.case_id) ? tol.gap_sdp : tol.gap_lp;
  report.gap_pass = report.relative_gap <= gap_tol;
  report.duals_pass =
      report.beta_residual <= tol.dual_match && report.q_residual <= tol.dual_match;
  report.tightness_pass =
      std::max({report.uplink_rate_residual, report.uplink_fronthaul_residual,
                report.downlink_rate_residual, report.downlink_fronthaul_residual}) <=
      tol.tightness;
  const bool numeric_pass = report.gap_pass && report.duals_pass && report.tightness_pass;
  report.pass = report.feasibility_consistent && (report.near_boundary || numeric_pass);
  return report;
}

InterferencePropertyReport check_interference_properties(const NetworkInstance& instance,
                                                         const RateTargets& targets,
                                                         const StrategyConfig& config, int trials,
                                                         uint64_t seed) {
  InterferencePropertyReport report;
  report.trials = trials;
  report.worst_positivity_margin = std::numeric_limits<double>::infinity();
  report.worst_subscale_margin = std::numeric_limits<double>::infinity();
  report.worst_monotonicity_margin = std::numeric_limits<double>::infinity();

  CounterRng rng(seed);
  const double alphas[] = {1.5, 2.0, 10.0};
  const int k_count = instance.num_users;

  for (int trial = 0; trial < trials; ++trial) {
    // Mixed power scales, including exact zeros, to probe the whole cone.
    std::vector<double> p(k_count);
    for (int k = 0; k < k_count; ++k) {
      const double u = rng.next_unit();
      p[k] = (u < 0.15) ? 0.0 : std::pow(10.0, 3.0 * rng.next_unit() - 1.0);
    }
    const auto base = interference_map(instance, p, targets, config);

    for (int k = 0; k < k_count; ++k) {
      report.worst_positivity_margin = std::min(report.worst_positivity_margin, base[k]);
      if (!(base[k] > 0.0)) {
        report.violations.push_back({"positivity", p, 0.0, k});
      }
    }

    for (double alpha : alphas) {
      std::vector<double> scaled(k_count);
      for (int k = 0; k < k_count; ++k) scaled[k] = alpha * p[k];
      const auto mapped = interference_map(instance, scaled, targets, config);
      for (int k = 0; k < k_count; ++k) {
        const double margin = alpha * base[k] - mapped[k];
        report.worst_subscale_margin = std::min(report.worst_subscale_margin, margin);
        if (!(margin > 0.0)) {
          report.violations.push_back({"sub-scalability", p, alpha, k});
        }
      }
    }

    std::vector<double> bumped(p);
    for (int k = 0; k < k_count; ++k) bumped[k] += 2.0 * rng.next_unit();
    const auto mapped_hi = interference_map(instance, bumped, targets, config);
    for (int k = 0; k < k_count; ++k) {
      const double margin = mapped_hi[k] - base[k];
      report.worst_monotonicity_margin = std::min(report.worst_monotonicity_margin, margin);
      if (margin < 0.0) {
        report.violations.push_back({"monotonicity", p, 0.0, k});
      }
    }
  }
  return report;
}

double check_wz_chain_rule(const NetworkInstance& instance, const UplinkPoint& point,
                           const std::vector<int>& rho) {
  const auto rates =
      uplink_fronthaul_rates(instance, point, UplinkCompression::WynerZiv, rho);
  double total = 0.0;
  for (double r : rates) total += r;

  const HermitianMatrix gamma = gamma_covariance(instance, point, rho);
  double log_q = 0.0;
  for (double q : point.quant_noise) log_q += std::log(q);
  const double expected = (CholeskyFactor(gamma).log_det() - log_q) / kLn2;
  return std::abs(total - expected);
}

}  // namespace relaydual
