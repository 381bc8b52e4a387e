#include "relaydual/uplink.hpp"

#include <algorithm>
#include <cmath>

#include "relaydual/errors.hpp"

namespace relaydual {

namespace {

std::vector<double> pow2_minus_one(const std::vector<double>& rates) {
  std::vector<double> t(rates.size());
  for (size_t i = 0; i < rates.size(); ++i) t[i] = std::exp2(rates[i]) - 1.0;
  return t;
}

// Interference-plus-noise covariance seen by `user`, excluding its own signal
// and, for successive decoding, every user already decoded before it.
HermitianMatrix residual_covariance(const NetworkInstance& instance, const std::vector<double>& p,
                                    const std::vector<double>& q, const StrategyConfig& config,
                                    int user) {
  const int m_count = instance.num_relays;
  HermitianMatrix x(m_count);
  for (int m = 0; m < m_count; ++m) x.set(m, m, q[m] + instance.noise_power);

  auto add_user = [&](int j) {
    if (p[j] == 0.0) return;
    const auto hj = instance.user_channel(j);
    for (int a = 0; a < m_count; ++a)
      for (int b = a; b < m_count; ++b) x.add(a, b, p[j] * hj[a] * std::conj(hj[b]));
  };

  if (uses_successive_decoding(config.case_id)) {
    int pos = 0;
    while (config.decode_order[pos] != user) ++pos;
    for (int later = pos + 1; later < instance.num_users; ++later) {
      add_user(config.decode_order[later]);
    }
  } else {
    for (int j = 0; j < instance.num_users; ++j) {
      if (j != user) add_user(j);
    }
  }
  return x;
}

std::vector<double> tight_noise(const NetworkInstance& instance, const std::vector<double>& p,
                                const StrategyConfig& config) {
  return uses_wyner_ziv(config.case_id) ? q_wyner_ziv(instance, p, config.decompress_order)
                                        : q_independent(instance, p);
}

// SINR-inversion map at fixed beamformers: the power user k needs so that its
// beamformed SINR meets the target, with q eliminated via its tight form.
std::vector<double> fixed_beam_map(const NetworkInstance& instance, const std::vector<double>& p,
                                   const RateTargets& targets, const StrategyConfig& config,
                                   const CMatrix& beams) {
  const int k_count = instance.num_users;
  const std::vector<double> t = pow2_minus_one(targets.rates);
  const std::vector<double> q = tight_noise(instance, p, config);
  const bool sic = uses_successive_decoding(config.case_id);

  std::vector<double> next(k_count, 0.0);
  for (int pos = 0; pos < k_count; ++pos) {
    const int user = sic ? config.decode_order[pos] : pos;
    if (t[user] <= 0.0) continue;
    const auto wu = beams.col(user);
    double ipn = instance.noise_power;
    for (int m = 0; m < instance.num_relays; ++m) ipn += q[m] * std::norm(wu[m]);
    if (sic) {
      for (int later = pos + 1; later < k_count; ++later) {
        const int j = config.decode_order[later];
        ipn += p[j] * std::norm(dot(wu, instance.user_channel(j)));
      }
    } else {
      for (int j = 0; j < k_count; ++j) {
        if (j != user) ipn += p[j] * std::norm(dot(wu, instance.user_channel(j)));
      }
    }
    next[user] = t[user] * ipn / std::norm(dot(wu, instance.user_channel(user)));
  }
  return next;
}

struct IterationOutcome {
  std::vector<double> powers;
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
};

template <typename Map>
IterationOutcome picard(Map&& map, std::vector<double> p, const SolverSettings& settings) {
  IterationOutcome out;
  for (int it = 1; it <= settings.max_iters; ++it) {
    std::vector<double> next = map(p);
    double change = 0.0;
    double scale = 1.0;
    for (size_t k = 0; k < p.size(); ++k) {
      change = std::max(change, std::abs(next[k] - p[k]));
      scale = std::max(scale, std::abs(next[k]));
      if (!(next[k] < settings.divergence_power_cap)) {
        out.powers = std::move(next);
        out.iterations = it;
        out.diagnostic = "power diverged past the cap; declared infeasible";
        return out;
      }
    }
    p = std::move(next);
    if (change <= settings.rel_tol * scale) {
      out.powers = std::move(p);
      out.iterations = it;
      out.converged = true;
      return out;
    }
  }
  out.powers = std::move(p);
  out.iterations = settings.max_iters;
  out.diagnostic = "iteration budget exhausted before convergence; declared infeasible";
  return out;
}

// MMSE receivers matched to the decoding strategy: for successive decoding
// each user's covariance drops the users decoded before it.
CMatrix adapted_beamformers(const NetworkInstance& instance, const std::vector<double>& p,
                            const std::vector<double>& q, const StrategyConfig& config) {
  const int m_count = instance.num_relays;
  CMatrix beams(m_count, instance.num_users);
  for (int k = 0; k < instance.num_users; ++k) {
    const HermitianMatrix x = residual_covariance(instance, p, q, config, k);
    auto w = CholeskyFactor(x).solve(instance.user_channel(k));
    const double n = norm(w);
    for (int m = 0; m < m_count; ++m) beams(m, k) = w[m] / n;
  }
  return beams;
}

// Exact tight system for Cases I-II at fixed beamformers: all rate and
// fronthaul constraints at equality, linear in (p, q). Returns false when the
// system is singular or leaves a meaningfully negative component.
bool tight_linear_refine(const NetworkInstance& instance, const RateTargets& targets,
                         const StrategyConfig& config, const CMatrix& beams,
                         std::vector<double>& p, std::vector<double>& q) {
  const int k_count = instance.num_users;
  const int m_count = instance.num_relays;
  const std::vector<double> t = pow2_minus_one(targets.rates);
  const bool sic = uses_successive_decoding(config.case_id);

  std::vector<int> active;
  for (int k = 0; k < k_count; ++k)
    if (t[k] > 0.0) active.push_back(k);
  const int ka = static_cast<int>(active.size());
  std::vector<int> slot(k_count, -1);
  for (int i = 0; i < ka; ++i) slot[active[i]] = i;

  const int n = ka + m_count;
  RealMatrix a(n, n);
  std::vector<double> rhs(n, 0.0);

  std::vector<int> pos_of(k_count, 0);
  for (int posn = 0; posn < k_count; ++posn) pos_of[config.decode_order[posn]] = posn;

  for (int i = 0; i < ka; ++i) {
    const int user = active[i];
    const auto wu = beams.col(user);
    a(i, i) = std::norm(dot(wu, instance.user_channel(user)));
    for (int j = 0; j < k_count; ++j) {
      if (j == user || slot[j] < 0) continue;
      const bool interferes = sic ? pos_of[j] > pos_of[user] : true;
      if (interferes) a(i, slot[j]) = -t[user] * std::norm(dot(wu, instance.user_channel(j)));
    }
    for (int m = 0; m < m_count; ++m) a(i, ka + m) = -t[user] * std::norm(wu[m]);
    rhs[i] = t[user] * instance.noise_power;
  }
  for (int m = 0; m < m_count; ++m) {
    for (int i = 0; i < ka; ++i) {
      a(ka + m, i) = -std::norm(instance.channel(m, active[i]));
    }
    a(ka + m, ka + m) = std::exp2(instance.fronthaul_caps[m]) - 1.0;
    rhs[ka + m] = instance.noise_power;
  }

  std::vector<double> z;
  try {
    z = solve_real(a, rhs);
  } catch (const std::runtime_error&) {
    return false;
  }
  for (double v : z)
    if (v < -1e-9) return false;

  p.assign(k_count, 0.0);
  for (int i = 0; i < ka; ++i) p[active[i]] = std::max(z[i], 0.0);
  q.resize(m_count);
  for (int m = 0; m < m_count; ++m) q[m] = std::max(z[ka + m], 0.0);
  return true;
}

}  // namespace

std::vector<double> q_independent(const NetworkInstance& instance, const std::vector<double>& p) {
  std::vector<double> q(instance.num_relays);
  for (int m = 0; m < instance.num_relays; ++m) {
    double received = instance.noise_power;
    for (int k = 0; k < instance.num_users; ++k) {
      received += p[k] * std::norm(instance.channel(m, k));
    }
    q[m] = received / (std::exp2(instance.fronthaul_caps[m]) - 1.0);
  }
  return q;
}

std::vector<double> q_wyner_ziv(const NetworkInstance& instance, const std::vector<double>& p,
                                const std::vector<int>& rho) {
  const int m_count = instance.num_relays;
  std::vector<double> q(m_count, 0.0);

  // Signal-plus-thermal covariance in decompression order; the quantization
  // noises are added to the diagonal as they become known.
  HermitianMatrix gamma(m_count);
  for (int i = 0; i < m_count; ++i) {
    for (int j = i; j < m_count; ++j) {
      cxd s = 0.0;
      for (int k = 0; k < instance.num_users; ++k) {
        s += p[k] * instance.channel(rho[i], k) * std::conj(instance.channel(rho[j], k));
      }
      if (i == j) s += instance.noise_power;
      gamma.set(i, j, s);
    }
  }

  for (int j = 0; j < m_count; ++j) {
    const int relay = rho[j];
    // Conditional signal variance given the earlier-decompressed relays;
    // q_{rho(j)} does not appear in its own numerator.
    double numerator = gamma(j, j).real();
    if (j > 0) {
      CholeskyFactor lead(gamma.leading_block(j));
      std::vector<cxd> col(j);
      for (int i = 0; i < j; ++i) col[i] = gamma(i, j);
      const auto x = lead.solve(col);
      numerator -= dot(col, x).real();
    }
    q[relay] = numerator / (std::exp2(instance.fronthaul_caps[relay]) - 1.0);
    gamma.add(j, j, q[relay]);
  }
  return q;
}

CMatrix mmse_beamformers(const NetworkInstance& instance, const std::vector<double>& p,
                         const std::vector<double>& q) {
  return adapted_beamformers(
      instance, p, q,
      StrategyConfig::natural(StrategyCase::I, instance.num_users, instance.num_relays));
}

std::vector<double> interference_map(const NetworkInstance& instance, const std::vector<double>& p,
                                     const RateTargets& targets, const StrategyConfig& config) {
  const std::vector<double> t = pow2_minus_one(targets.rates);
  const std::vector<double> q = tight_noise(instance, p, config);

  std::vector<double> next(instance.num_users, 0.0);
  for (int user = 0; user < instance.num_users; ++user) {
    if (t[user] <= 0.0) continue;
    const HermitianMatrix x = residual_covariance(instance, p, q, config, user);
    const auto hk = instance.user_channel(user);
    const double quad = dot(hk, CholeskyFactor(x).solve(hk)).real();
    next[user] = t[user] / quad;
  }
  return next;
}

UplinkSolution fixed_point_solve(const NetworkInstance& instance, const RateTargets& targets,
                                 const StrategyConfig& config, const SolverSettings& settings,
                                 const std::optional<CMatrix>& fixed_beamformers) {
  instance.check_invariants();
  config.check_invariants(instance.num_users, instance.num_relays);
  if (static_cast<int>(targets.rates.size()) != instance.num_users) {
    throw DimensionMismatch("rate target vector length does not match K");
  }
  if (fixed_beamformers) {
    const auto report = validate_beamformers(instance, *fixed_beamformers);
    if (!report.unused_relays.empty()) {
      throw DegenerateRelay("fixed beamformers leave relay " +
                            std::to_string(report.unused_relays.front()) +
                            " unused; drop it before solving");
    }
  }

  std::vector<double> p0(instance.num_users, settings.initial_power);
  IterationOutcome outcome;
  if (fixed_beamformers) {
    outcome = picard(
        [&](const std::vector<double>& p) {
          return fixed_beam_map(instance, p, targets, config, *fixed_beamformers);
        },
        std::move(p0), settings);
  } else {
    outcome = picard(
        [&](const std::vector<double>& p) {
          return interference_map(instance, p, targets, config);
        },
        std::move(p0), settings);
  }

  UplinkSolution sol;
  sol.iterations = outcome.iterations;
  sol.converged = outcome.converged;
  sol.diagnostic = outcome.diagnostic;

  std::vector<double> p = std::move(outcome.powers);
  std::vector<double> q = tight_noise(instance, p, config);
  CMatrix beams =
      fixed_beamformers ? *fixed_beamformers : adapted_beamformers(instance, p, q, config);

  if (sol.converged) {
    // Refinement to squeeze out the linear tail of the Picard iteration. For
    // the independent-compression cases the tight system is linear, so one
    // exact solve per beamformer update lands on machine precision; for the
    // Wyner-Ziv cases a short fixed-beamformer Picard pass does the same job.
    if (!uses_wyner_ziv(config.case_id)) {
      for (int round = 0; round < 3; ++round) {
        if (!fixed_beamformers) beams = adapted_beamformers(instance, p, q, config);
        if (!tight_linear_refine(instance, targets, config, beams, p, q)) break;
        if (fixed_beamformers) break;
      }
    } else {
      SolverSettings polish = settings;
      polish.rel_tol = 1e-14;
      polish.max_iters = std::max(settings.max_iters, 20000);
      const int rounds = fixed_beamformers ? 1 : 2;
      for (int round = 0; round < rounds; ++round) {
        if (!fixed_beamformers) beams = adapted_beamformers(instance, p, q, config);
        auto tail = picard(
            [&](const std::vector<double>& pp) {
              return fixed_beam_map(instance, pp, targets, config, beams);
            },
            p, polish);
        if (!tail.converged) break;
        p = std::move(tail.powers);
        q = tight_noise(instance, p, config);
      }
    }
  }

  sol.point.user_powers = std::move(p);
  sol.point.quant_noise = std::move(q);
  sol.point.rx_beams = std::move(beams);
  sol.sum_power = sum_power(sol.point);

  const auto decoding = uses_successive_decoding(config.case_id) ? UplinkDecoding::Successive
                                                                 : UplinkDecoding::TreatAsNoise;
  const auto compression = uses_wyner_ziv(config.case_id) ? UplinkCompression::WynerZiv
                                                          : UplinkCompression::Independent;
  sol.achieved_rates =
      uplink_user_rates(instance, sol.point, decoding, config.decode_order);
  sol.achieved_fronthauls =
      uplink_fronthaul_rates(instance, sol.point, compression, config.decompress_order);
  return sol;
}

}  // namespace relaydual
