#include "barrier.hpp"

#include <cmath>
#include <optional>

#include "relaydual/errors.hpp"

namespace relaydual::detail {

double AffineScalar::eval(const std::vector<double>& x) const {
  double v = constant;
  for (size_t i = 0; i < coeff.size(); ++i) v += coeff[i] * x[i];
  return v;
}

AffineLmi::AffineLmi(int dim, int num_vars)
    : constant(dim), coeff(num_vars, HermitianMatrix(dim)) {}

HermitianMatrix AffineLmi::eval(const std::vector<double>& x) const {
  const int d = constant.dim();
  HermitianMatrix s(d);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      cxd v = constant(a, b);
      for (size_t i = 0; i < coeff.size(); ++i) {
        if (x[i] != 0.0) v += x[i] * coeff[i](a, b);
      }
      s.set(a, b, v);
    }
  }
  return s;
}

double BarrierProblem::barrier_order() const {
  double nu = static_cast<double>(scalars.size());
  for (const auto& lmi : lmis) nu += lmi.constant.dim();
  return nu;
}

bool BarrierProblem::strictly_feasible(const std::vector<double>& x) const {
  for (const auto& s : scalars) {
    if (!(s.eval(x) > 0.0)) return false;
  }
  for (const auto& lmi : lmis) {
    try {
      CholeskyFactor f(lmi.eval(x));
      (void)f;
    } catch (const NotPositiveDefinite&) {
      return false;
    }
  }
  return true;
}

namespace {

// phi_t(x) = t * obj.x - sum log s_i(x) - sum logdet S_j(x); returns nullopt
// outside the domain.
std::optional<double> barrier_value(const BarrierProblem& pb, double t,
                                    const std::vector<double>& x) {
  double phi = 0.0;
  for (int i = 0; i < pb.num_vars(); ++i) phi += t * pb.objective[i] * x[i];
  for (const auto& s : pb.scalars) {
    const double v = s.eval(x);
    if (!(v > 0.0)) return std::nullopt;
    phi -= std::log(v);
  }
  for (const auto& lmi : pb.lmis) {
    try {
      phi -= CholeskyFactor(lmi.eval(x)).log_det();
    } catch (const NotPositiveDefinite&) {
      return std::nullopt;
    }
  }
  return phi;
}

struct Derivatives {
  std::vector<double> grad;
  RealMatrix hess;
};

Derivatives barrier_derivatives(const BarrierProblem& pb, double t,
                                const std::vector<double>& x) {
  const int n = pb.num_vars();
  Derivatives d;
  d.grad.assign(n, 0.0);
  d.hess = RealMatrix(n, n);
  for (int i = 0; i < n; ++i) d.grad[i] = t * pb.objective[i];

  for (const auto& s : pb.scalars) {
    const double v = s.eval(x);
    for (int a = 0; a < n; ++a) {
      if (s.coeff[a] == 0.0) continue;
      d.grad[a] -= s.coeff[a] / v;
      for (int b = a; b < n; ++b) {
        if (s.coeff[b] == 0.0) continue;
        d.hess(a, b) += s.coeff[a] * s.coeff[b] / (v * v);
      }
    }
  }

  for (const auto& lmi : pb.lmis) {
    const int dim = lmi.constant.dim();
    const HermitianMatrix s = lmi.eval(x);
    CholeskyFactor f(s);

    // W_i = S^{-1} dS_i; gradient -tr(W_i), Hessian tr(W_a W_b).
    std::vector<CMatrix> w;
    std::vector<int> idx;
    w.reserve(n);
    for (int i = 0; i < n; ++i) {
      bool zero = true;
      for (int a = 0; a < dim && zero; ++a)
        for (int b = 0; b < dim; ++b)
          if (lmi.coeff[i](a, b) != cxd(0.0, 0.0)) {
            zero = false;
            break;
          }
      if (zero) continue;
      CMatrix wi(dim, dim);
      std::vector<cxd> col(dim);
      for (int c = 0; c < dim; ++c) {
        for (int r = 0; r < dim; ++r) col[r] = lmi.coeff[i](r, c);
        const auto sol = f.solve(col);
        for (int r = 0; r < dim; ++r) wi(r, c) = sol[r];
      }
      idx.push_back(i);
      w.push_back(std::move(wi));
    }

    for (size_t a = 0; a < idx.size(); ++a) {
      double tr = 0.0;
      for (int r = 0; r < dim; ++r) tr += w[a](r, r).real();
      d.grad[idx[a]] -= tr;
      for (size_t b = a; b < idx.size(); ++b) {
        double hab = 0.0;
        for (int r = 0; r < dim; ++r)
          for (int c = 0; c < dim; ++c) hab += (w[a](r, c) * w[b](c, r)).real();
        const int ia = idx[a];
        const int ib = idx[b];
        if (ia <= ib) {
          d.hess(ia, ib) += hab;
        } else {
          d.hess(ib, ia) += hab;
        }
      }
    }
  }

  for (int a = 0; a < n; ++a)
    for (int b = 0; b < a; ++b) d.hess(a, b) = d.hess(b, a);
  return d;
}

}  // namespace

BarrierResult minimize_barrier(const BarrierProblem& problem, std::vector<double> x0,
                               const BarrierSettings& settings,
                               const std::function<bool(const std::vector<double>&, double)>&
                                   early_stop) {
  BarrierResult result;
  if (!problem.strictly_feasible(x0)) {
    result.x = std::move(x0);
    result.diagnostic = "barrier start point is not strictly feasible";
    return result;
  }

  std::vector<double> x = std::move(x0);
  const double nu = problem.barrier_order();
  double t = settings.t_init;

  auto objective_value = [&](const std::vector<double>& xx) {
    double v = 0.0;
    for (int i = 0; i < problem.num_vars(); ++i) v += problem.objective[i] * xx[i];
    return v;
  };

  for (int stage = 0; stage < settings.max_stages; ++stage) {
    ++result.stages;

    for (int step = 0; step < settings.max_newton_per_stage; ++step) {
      Derivatives d = barrier_derivatives(problem, t, x);
      std::vector<double> neg_grad(d.grad.size());
      for (size_t i = 0; i < d.grad.size(); ++i) neg_grad[i] = -d.grad[i];

      std::vector<double> dx;
      try {
        dx = solve_spd(d.hess, neg_grad);
      } catch (const std::runtime_error&) {
        result.diagnostic = "Newton system not positive definite";
        result.x = std::move(x);
        return result;
      }

      double slope = 0.0;  // grad . dx, negative for a descent direction
      double decrement2 = 0.0;
      for (size_t i = 0; i < dx.size(); ++i) {
        slope += d.grad[i] * dx[i];
        decrement2 -= d.grad[i] * dx[i];
      }
      if (0.5 * decrement2 <= settings.newton_tol) break;

      const double phi0 = *barrier_value(problem, t, x);
      double step_len = 1.0;
      std::vector<double> trial(x.size());
      bool accepted = false;
      while (step_len > 1e-14) {
        for (size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + step_len * dx[i];
        const auto phi = barrier_value(problem, t, trial);
        if (phi && *phi <= phi0 + settings.ls_alpha * step_len * slope) {
          accepted = true;
          break;
        }
        step_len *= settings.ls_beta;
      }
      if (!accepted) break;  // stagnated at this stage's accuracy
      x = trial;
      ++result.newton_steps;

      if (early_stop && early_stop(x, objective_value(x))) {
        result.x = std::move(x);
        result.t_final = t;
        result.converged = true;
        result.diagnostic = "stopped early at caller's request";
        return result;
      }
    }

    const double obj = objective_value(x);
    if (nu / t <= settings.gap_rel_tol * (1.0 + std::abs(obj))) {
      result.x = std::move(x);
      result.t_final = t;
      result.converged = true;
      return result;
    }
    t *= settings.t_mult;
  }

  result.x = std::move(x);
  result.t_final = t;
  result.diagnostic = "stage budget exhausted before reaching the gap target";
  return result;
}

}  // namespace relaydual::detail
