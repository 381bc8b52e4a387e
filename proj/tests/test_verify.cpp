#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relaydual/network.hpp"
#include "relaydual/verify.hpp"

using namespace relaydual;

namespace {

NetworkInstance scalar_instance() {
  NetworkInstance inst;
  inst.num_relays = 1;
  inst.num_users = 1;
  inst.channel = CMatrix(1, 1);
  inst.channel(0, 0) = 1.0;
  inst.noise_power = 1.0;
  inst.fronthaul_caps = {2.0};
  return inst;
}

}  // namespace

TEST_CASE("verify_duality on the analytic instance") {
  const auto inst = scalar_instance();
  const auto cfg = StrategyConfig::natural(StrategyCase::I, 1, 1);
  const auto report = verify_duality(inst, RateTargets{{1.0}}, cfg);
  CHECK(report.pass);
  CHECK(report.relative_gap <= 1e-10);
  CHECK(report.beta_residual <= 1e-8);
  CHECK(report.q_residual <= 1e-8);
  CHECK(report.uplink_sum_power == doctest::Approx(2.0));
  CHECK(report.downlink_sum_power == doctest::Approx(2.0));

  const auto json = report.to_json();
  CHECK(json.find("\"case\": \"I\"") != std::string::npos);
  CHECK(json.find("relative_gap") != std::string::npos);
}

TEST_CASE("verify_duality passes for all four cases on the seed-7 instance") {
  const auto inst = generate_rayleigh(3, 3, 7);
  for (auto c : {StrategyCase::I, StrategyCase::II, StrategyCase::III, StrategyCase::IV}) {
    const auto cfg = StrategyConfig::natural(c, 3, 3);
    const auto report = verify_duality(inst, RateTargets::symmetric(3, 0.5), cfg);
    CHECK(report.pass);
    CHECK(report.uplink_feasible);
    CHECK(report.downlink_feasible);
  }
}

TEST_CASE("verify_duality records consistent two-sided infeasibility as a pass") {
  const auto inst = scalar_instance();
  const auto cfg = StrategyConfig::natural(StrategyCase::I, 1, 1);
  const auto report = verify_duality(inst, RateTargets{{4.0}}, cfg);
  CHECK_FALSE(report.uplink_feasible);
  CHECK_FALSE(report.downlink_feasible);
  CHECK(report.feasibility_consistent);
  CHECK(report.pass);
}

TEST_CASE("check_tightness on the analytic pair") {
  const auto inst = scalar_instance();
  const auto cfg = StrategyConfig::natural(StrategyCase::I, 1, 1);
  const auto [ul, dl] = solve_downlink_via_duality(inst, RateTargets{{1.0}}, cfg);

  const auto ul_res = check_tightness(ul, RateTargets{{1.0}}, inst.fronthaul_caps);
  CHECK(ul_res.max_rate() <= 1e-10);
  CHECK(ul_res.max_fronthaul() <= 1e-10);

  const auto dl_res = check_tightness(dl, RateTargets{{1.0}}, inst.fronthaul_caps);
  CHECK(dl_res.max_rate() <= 1e-10);
  CHECK(dl_res.max_fronthaul() <= 1e-10);
}

TEST_CASE("check_tightness treats the zero-target limit as vacuous") {
  const auto inst = scalar_instance();
  const auto cfg = StrategyConfig::natural(StrategyCase::I, 1, 1);
  const auto [ul, dl] = solve_downlink_via_duality(inst, RateTargets{{0.0}}, cfg);
  const auto dl_res = check_tightness(dl, RateTargets{{0.0}}, inst.fronthaul_caps);
  CHECK(dl_res.max_rate() <= 1e-12);
  CHECK(dl_res.max_fronthaul() <= 1e-12);
}

TEST_CASE("tightness on a converged Case III solve") {
  const auto inst = generate_rayleigh(3, 3, 19);
  const auto cfg = StrategyConfig::natural(StrategyCase::III, 3, 3);
  const auto targets = RateTargets::symmetric(3, 0.9);
  const auto [ul, dl] = solve_downlink_via_duality(inst, targets, cfg);
  REQUIRE(ul.converged);
  REQUIRE(dl.status == SolveStatus::Optimal);
  const auto ul_res = check_tightness(ul, targets, inst.fronthaul_caps);
  const auto dl_res = check_tightness(dl, targets, inst.fronthaul_caps);
  CHECK(ul_res.max_rate() <= 1e-6);
  CHECK(ul_res.max_fronthaul() <= 1e-6);
  CHECK(dl_res.max_rate() <= 1e-6);
  CHECK(dl_res.max_fronthaul() <= 1e-6);
}

TEST_CASE("interference property report finds no violations") {
  const auto inst = generate_rayleigh(3, 3, 1);
  for (auto c : {StrategyCase::I, StrategyCase::III}) {
    const auto cfg = StrategyConfig::natural(c, 3, 3);
    const auto report =
        check_interference_properties(inst, RateTargets::symmetric(3, 0.8), cfg, 100);
    CHECK(report.pass());
    CHECK(report.trials == 100);
    CHECK(report.worst_positivity_margin > 0.0);
    CHECK(report.worst_subscale_margin > 0.0);
    CHECK(report.worst_monotonicity_margin >= 0.0);
  }
}

TEST_CASE("wz chain rule residuals") {
  // M=1: exact up to rounding.
  const auto inst1 = scalar_instance();
  UplinkPoint pt1;
  pt1.user_powers = {1.1};
  pt1.quant_noise = {0.7};
  pt1.rx_beams = CMatrix(1, 1);
  pt1.rx_beams(0, 0) = 1.0;
  CHECK(check_wz_chain_rule(inst1, pt1, {0}) <= 1e-12);

  // The worked M=2 point: total log2(12).
  NetworkInstance inst2;
  inst2.num_relays = 2;
  inst2.num_users = 1;
  inst2.channel = CMatrix(2, 1);
  inst2.channel(0, 0) = 1.0;
  inst2.channel(1, 0) = 1.0;
  inst2.noise_power = 1.0;
  inst2.fronthaul_caps = {2.0, 2.0};
  UplinkPoint pt2;
  pt2.user_powers = {2.0};
  pt2.quant_noise = {1.0, 1.0};
  pt2.rx_beams = CMatrix(2, 1);
  pt2.rx_beams(0, 0) = 1.0;
  CHECK(check_wz_chain_rule(inst2, pt2, {0, 1}) <= 1e-12);
  const auto rates = uplink_fronthaul_rates(inst2, pt2, UplinkCompression::WynerZiv, {0, 1});
  CHECK(rates[0] + rates[1] == doctest::Approx(std::log2(12.0)).epsilon(1e-12));

  // Random M=5.
  const auto inst3 = generate_rayleigh(5, 3, 77);
  CounterRng rng(78);
  UplinkPoint pt3;
  pt3.user_powers = {1.0, 0.4, 2.2};
  pt3.quant_noise = {0.3, 0.9, 0.5, 1.4, 0.2};
  pt3.rx_beams = CMatrix(5, 3);
  for (int k = 0; k < 3; ++k) pt3.rx_beams(k, k) = 1.0;
  CHECK(check_wz_chain_rule(inst3, pt3, {3, 1, 4, 0, 2}) <= 1e-9);
}

TEST_CASE("the duality gap tracks the barrier tolerance, not the model") {
  const auto inst = generate_rayleigh(3, 3, 23);
  const auto cfg = StrategyConfig::natural(StrategyCase::III, 3, 3);
  const auto targets = RateTargets::symmetric(3, 1.0);
  const auto ul = fixed_point_solve(inst, targets, cfg);
  REQUIRE(ul.converged);

  double previous_gap = 1e300;
  for (double tol : {1e-2, 1e-5, 1e-8}) {
    MvBarrierSettings settings;
    settings.gap_rel_tol = tol;
    const auto dl = solve_mv_barrier(inst, targets, ul.point.rx_beams, cfg, settings);
    REQUIRE(dl.status == SolveStatus::Optimal);
    const double gap = std::abs(ul.sum_power - dl.sum_power) / ul.sum_power;
    CHECK(gap <= previous_gap + 1e-9);
    previous_gap = gap;
  }
  CHECK(previous_gap <= 1e-4);
}

TEST_CASE("near-boundary targets are flagged and carved out of pass/fail") {
  const auto inst = scalar_instance();  // boundary at R = C = 2
  const auto cfg = StrategyConfig::natural(StrategyCase::I, 1, 1);

  const auto comfortable = verify_duality(inst, RateTargets{{1.0}}, cfg);
  CHECK_FALSE(comfortable.near_boundary);

  const auto close = verify_duality(inst, RateTargets{{1.995}}, cfg);
  CHECK(close.uplink_feasible);
  CHECK(close.near_boundary);
  CHECK(close.pass);  // feasibility agreement alone decides here
}

TEST_CASE("dominance orderings across the cases") {
  const auto inst = generate_rayleigh(3, 3, 7);
  const auto targets = RateTargets::symmetric(3, 1.25);
  double power[5] = {};
  for (auto c : {StrategyCase::I, StrategyCase::II, StrategyCase::III, StrategyCase::IV}) {
    const auto cfg = StrategyConfig::natural(c, 3, 3);
    const auto [ul, dl] = solve_downlink_via_duality(inst, targets, cfg);
    REQUIRE(ul.converged);
    power[static_cast<int>(c)] = dl.sum_power;
  }
  const double p1 = power[static_cast<int>(StrategyCase::I)];
  const double p2 = power[static_cast<int>(StrategyCase::II)];
  const double p3 = power[static_cast<int>(StrategyCase::III)];
  const double p4 = power[static_cast<int>(StrategyCase::IV)];
  CHECK(p3 <= p1 + 1e-6);
  CHECK(p4 <= p2 + 1e-6);
  CHECK(p2 <= p1 + 1e-6);
  CHECK(p4 <= p3 + 1e-6);
}

TEST_CASE("duality holds across network shapes beyond the reference scale") {
  double worst_lp = 0.0;
  double worst_sdp = 0.0;
  for (uint64_t seed : {31, 62, 93, 124}) {
    for (auto [m, k] : {std::pair{4, 4}, {5, 2}, {6, 3}}) {
      const auto inst = generate_rayleigh(m, k, seed);
      for (auto c :
           {StrategyCase::I, StrategyCase::II, StrategyCase::III, StrategyCase::IV}) {
        const auto cfg = StrategyConfig::natural(c, k, m);
        auto [ul, dl] = solve_downlink_via_duality(inst, RateTargets::symmetric(k, 1.0), cfg);
        // Verdicts must agree even when a draw is infeasible.
        CHECK(ul.converged == (dl.status == SolveStatus::Optimal));
        if (!ul.converged) continue;
        const double gap = std::abs(ul.sum_power - dl.sum_power) / ul.sum_power;
        (uses_wyner_ziv(c) ? worst_sdp : worst_lp) =
            std::max(uses_wyner_ziv(c) ? worst_sdp : worst_lp, gap);
      }
    }
  }
  CHECK(worst_lp <= 1e-8);
  CHECK(worst_sdp <= 1e-4);
}

TEST_CASE("feasibility verdicts agree across a boundary-straddling grid") {
  for (uint64_t seed : {401, 402, 403, 404, 405}) {
    const auto inst = generate_rayleigh(2, 2, seed);
    const auto cfg = StrategyConfig::natural(StrategyCase::I, 2, 2);

    // Find the uplink boundary bracket on a coarse geometric scan.
    double lo = 0.25;
    double hi = -1.0;
    for (double r = 0.25; r < 16.0; r *= 1.5) {
      const auto sol = fixed_point_solve(inst, RateTargets::symmetric(2, r), cfg);
      if (sol.converged) {
        lo = r;
      } else {
        hi = r;
        break;
      }
    }
    REQUIRE(hi > 0.0);
    const double boundary = 0.5 * (lo + hi);

    for (int i = 0; i <= 20; ++i) {
      const double r = lo + (hi - lo) * i / 20.0;
      if (std::abs(r - boundary) < 0.01 * boundary) continue;
      const auto ul = fixed_point_solve(inst, RateTargets::symmetric(2, r), cfg);
      const auto dl = [&] {
        // Downlink verdict at matched beamformers; fall back to the uplink's
        // own MMSE beams at a feasible shrinkage when the uplink diverged.
        if (ul.converged) {
          return solve_in_tight_linear(inst, RateTargets::symmetric(2, r), ul.point.rx_beams,
                                       cfg);
        }
        const auto anchor = fixed_point_solve(inst, RateTargets::symmetric(2, lo), cfg);
        return solve_in_tight_linear(inst, RateTargets::symmetric(2, r),
                                     anchor.point.rx_beams, cfg);
      }();
      if (ul.converged) {
        CHECK(dl.status == SolveStatus::Optimal);
      } else {
        // Joint infeasibility is beamformer-independent, so the tight solve
        // must reject the targets at any fixed beams as well.
        CHECK(dl.status == SolveStatus::Infeasible);
      }
    }
  }
}
