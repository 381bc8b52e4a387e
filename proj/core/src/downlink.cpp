#include "relaydual/downlink.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "barrier.hpp"
#include "relaydual/errors.hpp"

namespace relaydual {

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct ActiveUsers {
  std::vector<int> ids;      // users with positive rate targets
  std::vector<int> slot;     // user -> position in ids, -1 when pinned to p = 0
  std::vector<double> sinr;  // 2^{R_k} - 1, full length
};

ActiveUsers split_active(const NetworkInstance& instance, const RateTargets& targets) {
  ActiveUsers act;
  act.slot.assign(instance.num_users, -1);
  act.sinr.resize(instance.num_users);
  for (int k = 0; k < instance.num_users; ++k) {
    act.sinr[k] = std::exp2(targets.rates[k]) - 1.0;
    if (act.sinr[k] > 0.0) {
      act.slot[k] = static_cast<int>(act.ids.size());
      act.ids.push_back(k);
    }
  }
  return act;
}

// Downlink interference sets in the uplink decode-order indexing: under the
// reversed encoding order, the user decoded k-th in the uplink is interfered
// by the users decoded before it. Linear encoding interferes everyone.
std::vector<std::vector<int>> downlink_interferers(const NetworkInstance& instance,
                                                   const StrategyConfig& config) {
  const int k_count = instance.num_users;
  std::vector<std::vector<int>> sets(k_count);
  if (uses_successive_decoding(config.case_id)) {
    for (int pos = 0; pos < k_count; ++pos) {
      const int user = config.decode_order[pos];
      for (int earlier = 0; earlier < pos; ++earlier) {
        sets[user].push_back(config.decode_order[earlier]);
      }
    }
  } else {
    for (int user = 0; user < k_count; ++user) {
      for (int j = 0; j < k_count; ++j) {
        if (j != user) sets[user].push_back(j);
      }
    }
  }
  return sets;
}

void require_valid_beams(const NetworkInstance& instance, const CMatrix& beams) {
  const auto report = validate_beamformers(instance, beams);
  if (!report.unused_relays.empty()) {
    throw DegenerateRelay("beamformers leave relay " +
                          std::to_string(report.unused_relays.front()) +
                          " unused; drop it before solving");
  }
  if (!report.non_unit_columns.empty()) {
    throw ParseError("beamformer column " + std::to_string(report.non_unit_columns.front()) +
                     " is not unit norm");
  }
}

double beam_coupling(const NetworkInstance& instance, const CMatrix& beams, int at_user,
                     int from_user) {
  return std::norm(dot(beams.col(from_user), instance.user_channel(at_user)));
}

struct LpSolve {
  bool solvable = false;    // the tight system had a solution at all
  bool nonnegative = false; // ... with no meaningfully negative component
  std::vector<double> p;    // full length, pinned users at 0
  std::vector<double> q;
  DualVariables duals;
  std::string diagnostic;
};

// All rate and fronthaul constraints at equality; LP duals from the
// transposed system with the sigma^2-scaled objective, which lands beta and
// lambda directly in uplink power / quantization-noise units.
LpSolve tight_lp_solve(const NetworkInstance& instance, const RateTargets& targets,
                       const CMatrix& beams, const StrategyConfig& config) {
  const int k_count = instance.num_users;
  const int m_count = instance.num_relays;
  const ActiveUsers act = split_active(instance, targets);
  const auto interferers = downlink_interferers(instance, config);
  const int ka = static_cast<int>(act.ids.size());
  const int n = ka + m_count;

  RealMatrix a(n, n);
  std::vector<double> rhs(n, 0.0);
  for (int i = 0; i < ka; ++i) {
    const int user = act.ids[i];
    a(i, i) = beam_coupling(instance, beams, user, user) / act.sinr[user];
    for (int j : interferers[user]) {
      if (act.slot[j] >= 0) a(i, act.slot[j]) -= beam_coupling(instance, beams, user, j);
    }
    for (int m = 0; m < m_count; ++m) {
      a(i, ka + m) = -std::norm(instance.channel(m, user));
    }
    rhs[i] = instance.noise_power;
  }
  for (int m = 0; m < m_count; ++m) {
    const int row = ka + m;
    for (int i = 0; i < ka; ++i) a(row, i) = -std::norm(beams(m, act.ids[i]));
    a(row, ka + m) = std::exp2(instance.fronthaul_caps[m]) - 1.0;
  }

  LpSolve out;
  std::vector<double> z;
  std::vector<double> mu;
  try {
    z = solve_real(a, rhs);
    mu = solve_real(a.transposed(), std::vector<double>(n, instance.noise_power));
  } catch (const std::runtime_error& e) {
    out.diagnostic = std::string("tight system is singular: ") + e.what();
    return out;
  }
  out.solvable = true;
  out.nonnegative = std::all_of(z.begin(), z.end(), [](double v) { return v >= -1e-9; });
  if (!out.nonnegative) {
    out.diagnostic = "tight system solution has a negative component; targets infeasible";
  }

  out.p.assign(k_count, 0.0);
  for (int i = 0; i < ka; ++i) out.p[act.ids[i]] = std::max(z[i], 0.0);
  out.q.resize(m_count);
  for (int m = 0; m < m_count; ++m) out.q[m] = std::max(z[ka + m], 0.0);

  out.duals.rate_duals.assign(k_count, 0.0);
  for (int i = 0; i < ka; ++i) out.duals.rate_duals[act.ids[i]] = mu[i];
  out.duals.fronthaul_duals.assign(mu.begin() + ka, mu.end());
  return out;
}

HermitianMatrix diagonal_cov(const std::vector<double>& q) {
  HermitianMatrix cov(static_cast<int>(q.size()));
  for (size_t m = 0; m < q.size(); ++m) cov.set(static_cast<int>(m), static_cast<int>(m), q[m]);
  return cov;
}

// Fronthaul rates with the tight-limit convention at q_m = 0: along the tight
// manifold the ratio stays pinned at 2^{C_m}, so the vanishing-noise limit is
// C_m itself.
std::vector<double> fronthauls_with_limit(const NetworkInstance& instance,
                                          const DownlinkPoint& point, DownlinkCompression mode,
                                          const std::vector<int>& rho_dl) {
  bool all_positive = true;
  for (int m = 0; m < instance.num_relays; ++m) {
    if (point.quant_cov(m, m).real() <= 0.0) all_positive = false;
  }
  if (all_positive) return downlink_fronthaul_rates(instance, point, mode, rho_dl);

  std::vector<double> rates(instance.num_relays);
  for (int m = 0; m < instance.num_relays; ++m) {
    const double q = point.quant_cov(m, m).real();
    if (q <= 0.0) {
      rates[m] = instance.fronthaul_caps[m];
      continue;
    }
    double bp = 0.0;
    for (int k = 0; k < instance.num_users; ++k) {
      bp += point.user_powers[k] * std::norm(point.tx_beams(m, k));
    }
    rates[m] = std::log((bp + q) / q) / kLn2;
  }
  return rates;
}

DownlinkEncoding encoding_of(const StrategyConfig& config) {
  return uses_successive_decoding(config.case_id) ? DownlinkEncoding::DirtyPaper
                                                  : DownlinkEncoding::Linear;
}

// --- multivariate barrier ----------------------------------------------------

// Variable layout for the barrier: active powers first, then the Hermitian
// covariance as M real diagonals followed by (re, im) per strict lower pair.
struct QParam {
  int m_count = 0;
  int ka = 0;

  int num_vars() const { return ka + m_count * m_count; }
  int p_index(int slot) const { return slot; }
  int diag_index(int m) const { return ka + m; }
  int pair_base(int i, int j) const {  // i > j
    const int pair = (i * (i - 1)) / 2 + j;
    return ka + m_count + 2 * pair;
  }

  HermitianMatrix basis(int var) const {  // dQ for covariance variables
    HermitianMatrix b(m_count);
    const int v = var - ka;
    if (v < m_count) {
      b.set(v, v, 1.0);
      return b;
    }
    const int pair = (v - m_count) / 2;
    const bool imag = ((v - m_count) % 2) != 0;
    int i = 1;
    while ((i * (i + 1)) / 2 <= pair) ++i;
    const int j = pair - (i * (i - 1)) / 2;
    b.set(i, j, imag ? cxd(0.0, 1.0) : cxd(1.0, 0.0));
    return b;
  }

  HermitianMatrix cov_of(const std::vector<double>& x) const {
    HermitianMatrix q(m_count);
    for (int m = 0; m < m_count; ++m) q.set(m, m, x[diag_index(m)]);
    for (int i = 1; i < m_count; ++i) {
      for (int j = 0; j < i; ++j) {
        const int base = pair_base(i, j);
        q.set(i, j, cxd(x[base], x[base + 1]));
      }
    }
    return q;
  }
};

struct MvProblem {
  QParam layout;
  detail::BarrierProblem barrier;
  ActiveUsers act;
  std::vector<int> pi;  // decompression order: LMI position -> relay
  int rate_offset = 0;  // scalar index of the first rate slack
  int lmi_offset = 0;   // LMI index of the first compression block (Q is last)
};

MvProblem build_mv_problem(const NetworkInstance& instance, const RateTargets& targets,
                           const CMatrix& beams, const StrategyConfig& config) {
  const int m_count = instance.num_relays;
  MvProblem pb;
  pb.act = split_active(instance, targets);
  pb.pi = config.decompress_order;
  pb.layout.m_count = m_count;
  pb.layout.ka = static_cast<int>(pb.act.ids.size());
  const int n = pb.layout.num_vars();

  pb.barrier.objective.assign(n, 0.0);
  for (int i = 0; i < pb.layout.ka; ++i) {
    pb.barrier.objective[pb.layout.p_index(i)] = instance.noise_power;
  }
  for (int m = 0; m < m_count; ++m) {
    pb.barrier.objective[pb.layout.diag_index(m)] = instance.noise_power;
  }

  // p_k > 0 barriers.
  for (int i = 0; i < pb.layout.ka; ++i) {
    detail::AffineScalar s;
    s.coeff.assign(n, 0.0);
    s.coeff[pb.layout.p_index(i)] = 1.0;
    pb.barrier.scalars.push_back(std::move(s));
  }

  // Rate slacks.
  pb.rate_offset = static_cast<int>(pb.barrier.scalars.size());
  const auto interferers = downlink_interferers(instance, config);
  for (int i = 0; i < pb.layout.ka; ++i) {
    const int user = pb.act.ids[i];
    detail::AffineScalar s;
    s.coeff.assign(n, 0.0);
    s.constant = -instance.noise_power;
    s.coeff[pb.layout.p_index(i)] =
        beam_coupling(instance, beams, user, user) / pb.act.sinr[user];
    for (int j : interferers[user]) {
      if (pb.act.slot[j] >= 0) {
        s.coeff[pb.layout.p_index(pb.act.slot[j])] -= beam_coupling(instance, beams, user, j);
      }
    }
    const auto hu = instance.user_channel(user);
    for (int v = pb.layout.ka; v < n; ++v) {
      const HermitianMatrix dq = pb.layout.basis(v);
      s.coeff[v] -= dot(hu, matvec(dq.matrix(), hu)).real();
    }
    pb.barrier.scalars.push_back(std::move(s));
  }

  // Compression LMIs, one per decompression position j, built in the
  // pi-permuted basis: 2^{C_pi(j)} Q~[j:,j:] - (Q~(j,j) + Psi_pi(j)) E_00.
  pb.lmi_offset = 0;
  for (int j = 0; j < m_count; ++j) {
    const int relay = pb.pi[j];
    const int dim = m_count - j;
    const double gain = std::exp2(instance.fronthaul_caps[relay]);
    detail::AffineLmi lmi(dim, n);
    for (int i = 0; i < pb.layout.ka; ++i) {
      lmi.coeff[pb.layout.p_index(i)].set(0, 0,
                                          -std::norm(beams(relay, pb.act.ids[i])));
    }
    for (int v = pb.layout.ka; v < n; ++v) {
      const HermitianMatrix dq = pb.layout.basis(v).permuted(pb.pi);
      HermitianMatrix block(dim);
      for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) block.set(a, b, gain * dq(j + a, j + b));
      block.add(0, 0, -dq(j, j));
      lmi.coeff[v] = std::move(block);
    }
    pb.barrier.lmis.push_back(std::move(lmi));
  }

  // Q itself must stay PSD.
  detail::AffineLmi qpsd(m_count, n);
  for (int v = pb.layout.ka; v < n; ++v) qpsd.coeff[v] = pb.layout.basis(v);
  pb.barrier.lmis.push_back(std::move(qpsd));

  return pb;
}

// Strictly feasible start by inflating the tight independent-compression
// solution: q(1+delta), p(1+eps) with max_k delta S_k/(sigma^2+S_k) < eps <
// delta keeps every rate slack and every LMI strictly positive.
bool lp_warm_start(const NetworkInstance& instance, const RateTargets& targets,
                   const CMatrix& beams, const StrategyConfig& config, const MvProblem& pb,
                   std::vector<double>& x0) {
  const LpSolve lp = tight_lp_solve(instance, targets, beams, config);
  if (!lp.solvable || !lp.nonnegative) return false;
  for (int m = 0; m < instance.num_relays; ++m) {
    if (lp.q[m] <= 0.0) return false;
  }
  for (int user : pb.act.ids) {
    if (lp.p[user] <= 0.0) return false;
  }

  const double delta = 0.05;
  double max_ratio = 0.0;
  for (int user : pb.act.ids) {
    double s = 0.0;
    for (int m = 0; m < instance.num_relays; ++m) {
      s += lp.q[m] * std::norm(instance.channel(m, user));
    }
    max_ratio = std::max(max_ratio, s / (instance.noise_power + s));
  }
  const double eps = delta * 0.5 * (1.0 + max_ratio);

  x0.assign(pb.layout.num_vars(), 0.0);
  for (int i = 0; i < pb.layout.ka; ++i) {
    x0[pb.layout.p_index(i)] = lp.p[pb.act.ids[i]] * (1.0 + eps);
  }
  for (int m = 0; m < instance.num_relays; ++m) {
    x0[pb.layout.diag_index(m)] = lp.q[m] * (1.0 + delta);
  }
  return pb.barrier.strictly_feasible(x0);
}

// Max-min-slack phase I over (x, u): every scalar and matrix slack must
// exceed u, and u is pushed upward until it clears zero (or provably cannot).
bool phase_one_start(const NetworkInstance& instance, const MvProblem& pb,
                     const detail::BarrierSettings& engine, std::vector<double>& x0,
                     std::string& diagnostic) {
  const int n = pb.layout.num_vars();
  detail::BarrierProblem ph;
  ph.objective.assign(n + 1, 0.0);
  ph.objective[n] = -1.0;

  for (const auto& s : pb.barrier.scalars) {
    detail::AffineScalar e;
    e.coeff = s.coeff;
    e.coeff.push_back(-1.0);
    e.constant = s.constant;
    ph.scalars.push_back(std::move(e));
  }
  for (const auto& lmi : pb.barrier.lmis) {
    const int dim = lmi.constant.dim();
    detail::AffineLmi e(dim, n + 1);
    e.constant = lmi.constant;
    for (int v = 0; v < n; ++v) e.coeff[v] = lmi.coeff[v];
    HermitianMatrix neg_i(dim);
    for (int d = 0; d < dim; ++d) neg_i.set(d, d, -1.0);
    e.coeff[n] = std::move(neg_i);
    ph.lmis.push_back(std::move(e));
  }

  std::vector<double> y(n + 1, 0.0);
  for (int i = 0; i < pb.layout.ka; ++i) y[pb.layout.p_index(i)] = instance.noise_power;
  for (int m = 0; m < pb.layout.m_count; ++m) {
    y[pb.layout.diag_index(m)] = instance.noise_power;
  }
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& s : pb.barrier.scalars) min_slack = std::min(min_slack, s.eval(y));
  for (const auto& lmi : pb.barrier.lmis) {
    min_slack = std::min(min_slack, eigenvalues_hermitian(lmi.eval(y)).front());
  }
  y[n] = min_slack - 0.1 * std::max(1.0, std::abs(min_slack));

  detail::BarrierSettings ph_settings = engine;
  ph_settings.gap_rel_tol = 1e-6;
  const double clear = 1e-3 * instance.noise_power;
  const auto result = detail::minimize_barrier(
      ph, std::move(y), ph_settings,
      [&](const std::vector<double>& yy, double) { return yy[n] > clear; });

  const double u = result.x[n];
  if (u <= 1e-9 * instance.noise_power) {
    diagnostic = "phase I found no strictly feasible point (max min-slack " +
                 std::to_string(u) + ")";
    return false;
  }
  x0.assign(result.x.begin(), result.x.begin() + n);
  return pb.barrier.strictly_feasible(x0);
}

DownlinkSolution zero_target_solution(const NetworkInstance& instance, const CMatrix& beams,
                                      const StrategyConfig& config, bool multivariate) {
  DownlinkSolution sol;
  sol.point.user_powers.assign(instance.num_users, 0.0);
  sol.point.quant_cov = HermitianMatrix::zero(instance.num_relays);
  sol.point.tx_beams = beams;
  sol.sum_power = 0.0;
  sol.achieved_rates.assign(instance.num_users, 0.0);
  sol.achieved_fronthauls = instance.fronthaul_caps;  // tight-limit convention
  DualVariables duals;
  duals.rate_duals.assign(instance.num_users, 0.0);
  duals.fronthaul_duals.resize(instance.num_relays);
  for (int m = 0; m < instance.num_relays; ++m) {
    duals.fronthaul_duals[m] =
        instance.noise_power / (std::exp2(instance.fronthaul_caps[m]) - 1.0);
  }
  sol.duals = std::move(duals);
  if (multivariate) {
    for (int j = 0; j < instance.num_relays; ++j) {
      const int relay = config.decompress_order[j];
      HermitianMatrix block(instance.num_relays - j);
      block.set(0, 0, sol.duals->fronthaul_duals[relay]);
      sol.fronthaul_dual_blocks.push_back(std::move(block));
    }
  }
  sol.status = SolveStatus::Optimal;
  return sol;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIter: return "max-iterations";
  }
  return "?";
}

DownlinkSolution solve_in_tight_linear(const NetworkInstance& instance,
                                       const RateTargets& targets, const CMatrix& beams,
                                       const StrategyConfig& config) {
  instance.check_invariants();
  config.check_invariants(instance.num_users, instance.num_relays);
  require_valid_beams(instance, beams);
  if (uses_wyner_ziv(config.case_id)) {
    throw ParseError("tight linear solve handles the independent-compression cases only");
  }

  const ActiveUsers act = split_active(instance, targets);
  if (act.ids.empty()) return zero_target_solution(instance, beams, config, false);

  const LpSolve lp = tight_lp_solve(instance, targets, beams, config);
  DownlinkSolution sol;
  sol.point.tx_beams = beams;
  if (!lp.solvable || !lp.nonnegative) {
    sol.point.user_powers.assign(instance.num_users, 0.0);
    sol.point.quant_cov = HermitianMatrix::zero(instance.num_relays);
    sol.status = SolveStatus::Infeasible;
    sol.diagnostic = lp.diagnostic;
    return sol;
  }

  sol.point.user_powers = lp.p;
  sol.point.quant_cov = diagonal_cov(lp.q);
  sol.sum_power = sum_power(sol.point);
  sol.achieved_rates = downlink_user_rates(instance, sol.point, encoding_of(config),
                                           config.downlink_encode_order());
  sol.achieved_fronthauls = fronthauls_with_limit(instance, sol.point,
                                                  DownlinkCompression::Independent,
                                                  config.downlink_compression_order());
  sol.duals = lp.duals;
  sol.status = SolveStatus::Optimal;
  return sol;
}

DownlinkSolution solve_mv_barrier(const NetworkInstance& instance, const RateTargets& targets,
                                  const CMatrix& beams, const StrategyConfig& config,
                                  const MvBarrierSettings& settings) {
  instance.check_invariants();
  config.check_invariants(instance.num_users, instance.num_relays);
  require_valid_beams(instance, beams);
  if (!uses_wyner_ziv(config.case_id)) {
    throw ParseError("the barrier solver handles the multivariate cases only");
  }

  MvProblem pb = build_mv_problem(instance, targets, beams, config);
  if (pb.act.ids.empty()) return zero_target_solution(instance, beams, config, true);

  detail::BarrierSettings engine;
  engine.t_init = settings.t_init;
  engine.t_mult = settings.t_mult;
  engine.newton_tol = settings.newton_tol;
  engine.ls_alpha = settings.ls_alpha;
  engine.ls_beta = settings.ls_beta;
  engine.gap_rel_tol = settings.gap_rel_tol;
  engine.max_newton_per_stage = settings.max_newton_per_stage;
  engine.max_stages = settings.max_stages;

  DownlinkSolution sol;
  sol.point.tx_beams = beams;
  sol.point.user_powers.assign(instance.num_users, 0.0);
  sol.point.quant_cov = HermitianMatrix::zero(instance.num_relays);

  std::vector<double> x0;
  if (!lp_warm_start(instance, targets, beams, config, pb, x0)) {
    std::string diag;
    if (!phase_one_start(instance, pb, engine, x0, diag)) {
      sol.status = SolveStatus::Infeasible;
      sol.diagnostic = diag;
      return sol;
    }
  }

  const auto result = detail::minimize_barrier(pb.barrier, std::move(x0), engine);
  if (!result.converged) {
    sol.status = SolveStatus::MaxIter;
    sol.diagnostic = result.diagnostic;
    return sol;
  }

  const std::vector<double>& x = result.x;
  for (int i = 0; i < pb.layout.ka; ++i) {
    sol.point.user_powers[pb.act.ids[i]] = x[pb.layout.p_index(i)];
  }
  sol.point.quant_cov = pb.layout.cov_of(x);
  sol.sum_power = sum_power(sol.point);
  sol.achieved_rates = downlink_user_rates(instance, sol.point, encoding_of(config),
                                           config.downlink_encode_order());
  sol.achieved_fronthauls = downlink_fronthaul_rates(instance, sol.point,
                                                     DownlinkCompression::Multivariate,
                                                     config.downlink_compression_order());

  // Dual recovery from the barrier gradients at the final centering.
  DualVariables duals;
  duals.rate_duals.assign(instance.num_users, 0.0);
  for (int i = 0; i < pb.layout.ka; ++i) {
    const double slack = pb.barrier.scalars[pb.rate_offset + i].eval(x);
    duals.rate_duals[pb.act.ids[i]] = 1.0 / (result.t_final * slack);
  }
  duals.fronthaul_duals.assign(instance.num_relays, 0.0);
  for (int j = 0; j < instance.num_relays; ++j) {
    const HermitianMatrix t_block = pb.barrier.lmis[pb.lmi_offset + j].eval(x);
    const int dim = t_block.dim();
    CholeskyFactor f(t_block);
    HermitianMatrix lambda(dim);
    for (int c = 0; c < dim; ++c) {
      std::vector<cxd> e(dim, 0.0);
      e[c] = 1.0;
      const auto col = f.solve(e);
      for (int r = 0; r <= c; ++r) lambda.set(r, c, col[r] / result.t_final);
    }
    duals.fronthaul_duals[pb.pi[j]] = lambda(0, 0).real();
    sol.fronthaul_dual_blocks.push_back(std::move(lambda));
  }
  sol.duals = std::move(duals);
  sol.status = SolveStatus::Optimal;
  return sol;
}

std::pair<UplinkSolution, DownlinkSolution> solve_downlink_via_duality(
    const NetworkInstance& instance, const RateTargets& targets, const StrategyConfig& config,
    const SolverSettings& settings, const MvBarrierSettings& barrier_settings) {
  UplinkSolution ul = fixed_point_solve(instance, targets, config, settings);
  if (!ul.converged) {
    DownlinkSolution dl;
    dl.status = SolveStatus::Infeasible;
    dl.diagnostic = "uplink stage declared infeasible: " + ul.diagnostic;
    return {std::move(ul), std::move(dl)};
  }

  const CMatrix& beams = ul.point.rx_beams;
  DownlinkSolution dl = uses_wyner_ziv(config.case_id)
                            ? solve_mv_barrier(instance, targets, beams, config, barrier_settings)
                            : solve_in_tight_linear(instance, targets, beams, config);
  return {std::move(ul), std::move(dl)};
}

DualVariables extract_duals(const DownlinkSolution& solution) {
  if (solution.status != SolveStatus::Optimal || !solution.duals) {
    throw DualsUnavailable("solution carries no dual variables");
  }
  return *solution.duals;
}

}  // namespace relaydual
