#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relaydual/errors.hpp"
#include "relaydual/network.hpp"
#include "relaydual/uplink.hpp"

using namespace relaydual;

namespace {

NetworkInstance scalar_instance(double cap = 2.0) {
  NetworkInstance inst;
  inst.num_relays = 1;
  inst.num_users = 1;
  inst.channel = CMatrix(1, 1);
  inst.channel(0, 0) = 1.0;
  inst.noise_power = 1.0;
  inst.fronthaul_caps = {cap};
  return inst;
}

std::vector<int> identity_perm(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  return p;
}

}  // namespace

TEST_CASE("independent-compression noise closed form") {
  const auto inst = scalar_instance(2.0);
  CHECK(q_independent(inst, {0.0})[0] == doctest::Approx(1.0 / 3.0));
  CHECK(q_independent(inst, {2.0})[0] == doctest::Approx(1.0));

  const auto wide = scalar_instance(20.0);
  CHECK(q_independent(wide, {0.0})[0] ==
        doctest::Approx(1.0 / (std::exp2(20.0) - 1.0)).epsilon(1e-12));
}

TEST_CASE("Wyner-Ziv noise recursion") {
  // M=1 matches the independent closed form.
  const auto inst1 = scalar_instance(2.0);
  CHECK(q_wyner_ziv(inst1, {1.3}, identity_perm(1))[0] ==
        doctest::Approx(q_independent(inst1, {1.3})[0]).epsilon(1e-14));

  // p = 0 decouples the relays entirely.
  const auto inst2 = generate_rayleigh(2, 2, 17);
  const auto q0 = q_wyner_ziv(inst2, {0.0, 0.0}, identity_perm(2));
  for (int m = 0; m < 2; ++m) {
    CHECK(q0[m] == doctest::Approx(1.0 / (std::exp2(3.0) - 1.0)).epsilon(1e-13));
  }

  // Worked M=2 example: q = (1, 2/3).
  NetworkInstance inst3;
  inst3.num_relays = 2;
  inst3.num_users = 1;
  inst3.channel = CMatrix(2, 1);
  inst3.channel(0, 0) = 1.0;
  inst3.channel(1, 0) = 1.0;
  inst3.noise_power = 1.0;
  inst3.fronthaul_caps = {2.0, 2.0};
  const auto q = q_wyner_ziv(inst3, {2.0}, identity_perm(2));
  CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(q[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("Wyner-Ziv noises make every fronthaul rate exactly tight") {
  CounterRng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + static_cast<int>(rng.next_u64() % 4);
    const int k = 1 + static_cast<int>(rng.next_u64() % 3);
    const auto inst = generate_rayleigh(m, k, 500 + trial);
    std::vector<double> p(k);
    for (auto& v : p) v = 2.0 * rng.next_unit();
    std::vector<int> rho = identity_perm(m);
    for (int i = m - 1; i > 0; --i) std::swap(rho[i], rho[rng.next_u64() % (i + 1)]);

    UplinkPoint pt;
    pt.user_powers = p;
    pt.quant_noise = q_wyner_ziv(inst, p, rho);
    pt.rx_beams = CMatrix(m, k);
    for (int kk = 0; kk < k; ++kk) pt.rx_beams(kk % m, kk) = 1.0;
    const auto rates = uplink_fronthaul_rates(inst, pt, UplinkCompression::WynerZiv, rho);
    for (int mm = 0; mm < m; ++mm) {
      CHECK(rates[mm] == doctest::Approx(inst.fronthaul_caps[mm]).epsilon(1e-9));
    }
  }
}

TEST_CASE("MMSE beamformers") {
  // Scalar case normalizes to 1.
  const auto inst1 = scalar_instance();
  const auto w1 = mmse_beamformers(inst1, {1.0}, {0.5});
  CHECK(std::abs(w1(0, 0)) == doctest::Approx(1.0));

  // Diagonal channels keep each user on its own relay.
  NetworkInstance diag;
  diag.num_relays = 2;
  diag.num_users = 2;
  diag.channel = CMatrix(2, 2);
  diag.channel(0, 0) = 2.0;
  diag.channel(1, 1) = 0.7;
  diag.noise_power = 1.0;
  diag.fronthaul_caps = {3.0, 3.0};
  const auto w2 = mmse_beamformers(diag, {1.0, 2.0}, {0.3, 0.4});
  CHECK(std::abs(w2(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(w2(1, 0)) == doctest::Approx(0.0));
  CHECK(std::abs(w2(1, 1)) == doctest::Approx(1.0));

  // K=1, M=2, h=(1,1), q=(1,3), sigma^2=1 -> w = (2,1)/sqrt(5).
  NetworkInstance inst3;
  inst3.num_relays = 2;
  inst3.num_users = 1;
  inst3.channel = CMatrix(2, 1);
  inst3.channel(0, 0) = 1.0;
  inst3.channel(1, 0) = 1.0;
  inst3.noise_power = 1.0;
  inst3.fronthaul_caps = {3.0, 3.0};
  const auto w3 = mmse_beamformers(inst3, {0.0}, {1.0, 3.0});
  CHECK(std::abs(w3(0, 0)) == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(std::abs(w3(1, 0)) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("interference map examples") {
  const auto inst = scalar_instance(2.0);
  const auto cfg = StrategyConfig::natural(StrategyCase::I, 1, 1);

  // At p=0 with R=1: q(0)=1/3 and I = (2-1)/(1/(4/3)) = 4/3.
  const auto i0 = interference_map(inst, {0.0}, RateTargets{{1.0}}, cfg);
  CHECK(i0[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  // Zero targets collapse the map to zero everywhere.
  const auto iz = interference_map(inst, {5.0}, RateTargets{{0.0}}, cfg);
  CHECK(iz[0] == 0.0);

  // p = 2 is the fixed point of the R=1, C=2 scalar instance.
  const auto ifix = interference_map(inst, {2.0}, RateTargets{{1.0}}, cfg);
  CHECK(ifix[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("fixed point on the analytic scalar instance") {
  const auto inst = scalar_instance(2.0);
  const auto cfg = StrategyConfig::natural(StrategyCase::I, 1, 1);
  const auto sol = fixed_point_solve(inst, RateTargets{{1.0}}, cfg);
  REQUIRE(sol.converged);
  CHECK(sol.point.user_powers[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sol.point.quant_noise[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.sum_power == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sol.achieved_rates[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sol.achieved_fronthauls[0] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("the t = c boundary is declared infeasible") {
  const auto inst = scalar_instance(2.0);
  const auto cfg = StrategyConfig::natural(StrategyCase::I, 1, 1);
  const auto sol = fixed_point_solve(inst, RateTargets{{2.0}}, cfg);
  CHECK_FALSE(sol.converged);
  CHECK_FALSE(sol.diagnostic.empty());
}

TEST_CASE("zero targets give a zero solution") {
  const auto inst = generate_rayleigh(3, 3, 21);
  for (auto c : {StrategyCase::I, StrategyCase::III}) {
    const auto cfg = StrategyConfig::natural(c, 3, 3);
    const auto sol = fixed_point_solve(inst, RateTargets::symmetric(3, 0.0), cfg);
    REQUIRE(sol.converged);
    CHECK(sol.sum_power == doctest::Approx(0.0));
    for (double r : sol.achieved_rates) CHECK(r == doctest::Approx(0.0));
  }
}

TEST_CASE("degenerate fixed beamformers are refused") {
  const auto inst = generate_rayleigh(2, 2, 23);
  const auto cfg = StrategyConfig::natural(StrategyCase::I, 2, 2);
  CMatrix dead(2, 2);
  dead(0, 0) = 1.0;
  dead(0, 1) = 1.0;
  CHECK_THROWS_AS(
      fixed_point_solve(inst, RateTargets::symmetric(2, 0.5), cfg, {}, dead),
      DegenerateRelay);
}

TEST_CASE("standard interference function properties across cases I and III") {
  CounterRng rng(77);
  for (auto c : {StrategyCase::I, StrategyCase::III}) {
    const auto cfg = StrategyConfig::natural(c, 3, 3);
    const RateTargets targets = RateTargets::symmetric(3, 0.8);

    for (int trial = 0; trial < 100; ++trial) {
      // fresh channel draw every few power samples
      const auto inst = generate_rayleigh(3, 3, 1 + trial / 5);
      std::vector<double> p(3);
      for (auto& v : p) v = 4.0 * rng.next_unit();
      const auto base = interference_map(inst, p, targets, cfg);
      for (double v : base) CHECK(v > 0.0);

      for (double alpha : {1.5, 2.0, 10.0}) {
        std::vector<double> scaled{alpha * p[0], alpha * p[1], alpha * p[2]};
        const auto mapped = interference_map(inst, scaled, targets, cfg);
        for (int k = 0; k < 3; ++k) CHECK(mapped[k] < alpha * base[k]);
      }

      std::vector<double> bigger{p[0] + rng.next_unit(), p[1] + rng.next_unit(),
                                 p[2] + rng.next_unit()};
      const auto mapped_up = interference_map(inst, bigger, targets, cfg);
      for (int k = 0; k < 3; ++k) CHECK(mapped_up[k] >= base[k] - 1e-14);
    }
  }
}

TEST_CASE("fixed-point residual and tightness at convergence") {
  for (auto c : {StrategyCase::I, StrategyCase::II, StrategyCase::III, StrategyCase::IV}) {
    const auto inst = generate_rayleigh(3, 3, 7);
    const auto cfg = StrategyConfig::natural(c, 3, 3);
    const auto sol = fixed_point_solve(inst, RateTargets::symmetric(3, 1.0), cfg);
    REQUIRE(sol.converged);

    double pmax = 1.0;
    for (double p : sol.point.user_powers) pmax = std::max(pmax, p);
    const auto mapped =
        interference_map(inst, sol.point.user_powers, RateTargets::symmetric(3, 1.0), cfg);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(mapped[k] - sol.point.user_powers[k]) <= 1e-8 * pmax);
      CHECK(std::abs(sol.achieved_rates[k] - 1.0) <= 1e-6);
    }
    for (int m = 0; m < 3; ++m) {
      CHECK(std::abs(sol.achieved_fronthauls[m] - 3.0) <= 1e-6);
    }
  }
}

TEST_CASE("uniqueness probe: distant starts meet at the same fixed point") {
  for (auto c : {StrategyCase::I, StrategyCase::IV}) {
    const auto inst = generate_rayleigh(3, 3, 13);
    const auto cfg = StrategyConfig::natural(c, 3, 3);
    const auto a = fixed_point_solve(inst, RateTargets::symmetric(3, 0.75), cfg);
    SolverSettings high_start;
    high_start.initial_power = 10.0;
    const auto b = fixed_point_solve(inst, RateTargets::symmetric(3, 0.75), cfg, high_start);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(a.point.user_powers[k] - b.point.user_powers[k]) <= 1e-6);
    }
  }
}

TEST_CASE("Case III feasibility does not depend on the decompression order") {
  const std::vector<std::vector<int>> orders{{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                             {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (uint64_t seed : {301, 302, 303}) {
    const auto inst = generate_rayleigh(3, 2, seed);
    for (double target : {0.6, 2.4, 4.5}) {
      int converged_count = 0;
      for (const auto& rho : orders) {
        auto cfg = StrategyConfig::natural(StrategyCase::III, 2, 3);
        cfg.decompress_order = rho;
        const auto sol = fixed_point_solve(inst, RateTargets::symmetric(2, target), cfg);
        converged_count += sol.converged ? 1 : 0;
      }
      const bool all = converged_count == static_cast<int>(orders.size());
      const bool none = converged_count == 0;
      CHECK((all || none));
    }
  }
}

TEST_CASE("fixed beamformers reproduce the adaptive optimum at its own beams") {
  const auto inst = generate_rayleigh(3, 3, 29);
  const auto cfg = StrategyConfig::natural(StrategyCase::III, 3, 3);
  const auto adaptive = fixed_point_solve(inst, RateTargets::symmetric(3, 0.9), cfg);
  REQUIRE(adaptive.converged);
  const auto pinned = fixed_point_solve(inst, RateTargets::symmetric(3, 0.9), cfg, {},
                                        adaptive.point.rx_beams);
  REQUIRE(pinned.converged);
  CHECK(pinned.sum_power == doctest::Approx(adaptive.sum_power).epsilon(1e-8));
}
