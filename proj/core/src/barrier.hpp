#pragma once

// Internal path-following log-barrier engine over affine scalar and
// linear-matrix-inequality constraints. Shared by the multivariate downlink
// solver (phase II) and its feasibility phase I.

#include <functional>
#include <string>
#include <vector>

#include "relaydual/linalg.hpp"

namespace relaydual::detail {

// value(x) = coeff . x + constant, constrained to stay strictly positive.
struct AffineScalar {
  std::vector<double> coeff;
  double constant = 0.0;

  double eval(const std::vector<double>& x) const;
};

// S(x) = constant + sum_i x_i coeff[i], constrained to stay positive definite.
struct AffineLmi {
  HermitianMatrix constant;
  std::vector<HermitianMatrix> coeff;

  explicit AffineLmi(int dim, int num_vars);
  HermitianMatrix eval(const std::vector<double>& x) const;
};

struct BarrierProblem {
  std::vector<double> objective;  // minimize objective . x
  std::vector<AffineScalar> scalars;
  std::vector<AffineLmi> lmis;

  int num_vars() const { return static_cast<int>(objective.size()); }
  // Barrier parameter nu: one per scalar log, matrix dimension per logdet.
  double barrier_order() const;
  bool strictly_feasible(const std::vector<double>& x) const;
};

struct BarrierSettings {
  double t_init = 1.0;
  double t_mult = 10.0;
  double newton_tol = 1e-10;  // stop stage when (decrement^2)/2 falls below
  double ls_alpha = 0.25;
  double ls_beta = 0.5;
  double gap_rel_tol = 1e-8;  // stop when nu/t <= gap_rel_tol * (1 + |objective|)
  int max_newton_per_stage = 250;
  int max_stages = 60;
};

struct BarrierResult {
  std::vector<double> x;
  double t_final = 0.0;
  bool converged = false;
  int stages = 0;
  int newton_steps = 0;
  std::string diagnostic;
};

// early_stop(x, objective_value) may end the solve once the caller has what
// it needs (phase I uses it to bail out as soon as a safely interior point
// appears). x0 must be strictly feasible.
BarrierResult minimize_barrier(const BarrierProblem& problem, std::vector<double> x0,
                               const BarrierSettings& settings,
                               const std::function<bool(const std::vector<double>&, double)>&
                                   early_stop = nullptr);

}  // namespace relaydual::detail
