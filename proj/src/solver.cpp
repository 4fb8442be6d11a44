#include "wcurv/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

namespace wcurv {

LinearSolverKind linear_solver_from_string(const std::string& s) {
  if (s == "auto") return LinearSolverKind::Auto;
  if (s == "lu") return LinearSolverKind::DirectLU;
  if (s == "bicgstab") return LinearSolverKind::BiCgStab;
  throw ConfigError("unknown linear solver: " + s);
}

std::string to_string(LinearSolverKind kind) {
  switch (kind) {
    case LinearSolverKind::Auto: return "auto";
    case LinearSolverKind::DirectLU: return "lu";
    case LinearSolverKind::BiCgStab: return "bicgstab";
  }
  return "?";
}

std::string to_string(NewtonStatus status) {
  switch (status) {
    case NewtonStatus::Converged: return "converged";
    case NewtonStatus::AdmissibilityLost: return "admissibility_lost";
    case NewtonStatus::BarrierViolated: return "barrier_violated";
    case NewtonStatus::MaxIters: return "max_iters";
    case NewtonStatus::SingularLinearSystem: return "singular_linear_system";
  }
  return "?";
}

namespace {

/// Nonsymmetric sparse solve to tight relative accuracy. Direct LU by
/// default; ILU-preconditioned BiCGSTAB for the larger 3-d systems, with a
/// direct fallback if the iteration stalls.
bool solve_linear(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs,
                  LinearSolverKind kind, int grid_dim, Eigen::VectorXd& out) {
  LinearSolverKind pick = kind;
  if (pick == LinearSolverKind::Auto)
    pick = grid_dim >= 3 ? LinearSolverKind::BiCgStab : LinearSolverKind::DirectLU;

  if (pick == LinearSolverKind::BiCgStab) {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
    it.preconditioner().setFillfactor(12);
    it.preconditioner().setDroptol(1e-5);
    it.setTolerance(1e-13);
    it.setMaxIterations(2000);
    it.compute(J);
    if (it.info() == Eigen::Success) {
      out = it.solve(rhs);
      const double rel = (J * out - rhs).norm() / std::max(rhs.norm(), 1e-300);
      if (it.info() == Eigen::Success && rel < 1e-11) return true;
    }
    // fall through to the direct factorization
  }

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(J);
  lu.factorize(J);
  if (lu.info() != Eigen::Success) return false;
  out = lu.solve(rhs);
  return lu.info() == Eigen::Success && out.allFinite();
}

enum class Blocker { None, Barrier, Admissibility, NoDecrease };

}  // namespace

RadialGraphField initial_solution(const HomotopyConfig& cfg, const BaseGrid& grid,
                                  const PsiSpec& spec, const WarpProfile& profile) {
  RadialGraphField field =
      RadialGraphField::constant(grid, cfg.r_mid(), cfg.r1, cfg.r2);
  HomotopyConfig zero = cfg;
  zero.t = 0.0;
  const ResidualResult res = residual(field, zero, spec, profile);
  if (res.norm_inf > 1e-12)
    throw InternalError("initial_solution: t = 0 residual exceeds 1e-12");
  return field;
}

NewtonResult newton_solve(const RadialGraphField& start, const HomotopyConfig& cfg,
                          const PsiSpec& spec, const WarpProfile& profile,
                          const NewtonOptions& opts) {
  NewtonResult res;
  res.field = start;
  if (!start.inside_barrier()) {
    res.status = NewtonStatus::BarrierViolated;
    return res;
  }
  try {
    res.last = residual(res.field, cfg, spec, profile, opts.threads);
  } catch (const AdmissibilityError&) {
    res.status = NewtonStatus::AdmissibilityLost;
    return res;
  }

  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    if (res.last.norm_inf <= opts.tol) {
      res.status = NewtonStatus::Converged;
      res.iters = iter;
      return res;
    }
    if (iter == opts.max_iters) break;

    const Eigen::SparseMatrix<double> J =
        jacobian(res.field, cfg, spec, profile, opts.threads);
    Eigen::VectorXd w;
    if (!solve_linear(J, -res.last.F, opts.linear_solver, start.grid.dim, w)) {
      res.status = NewtonStatus::SingularLinearSystem;
      res.iters = iter;
      return res;
    }

    double alpha = 1.0;
    bool accepted = false;
    Blocker last_block = Blocker::None;
    RadialGraphField cand = res.field;
    for (int halv = 0; halv < opts.max_halvings; ++halv, alpha *= 0.5) {
      cand.r = res.field.r + alpha * w;
      if (!cand.inside_barrier()) {
        last_block = Blocker::Barrier;
        continue;
      }
      try {
        ResidualResult next = residual(cand, cfg, spec, profile, opts.threads);
        if (next.norm_inf < res.last.norm_inf) {
          res.field.r = cand.r;
          res.last = std::move(next);
          accepted = true;
          break;
        }
        last_block = Blocker::NoDecrease;
      } catch (const AdmissibilityError&) {
        last_block = Blocker::Admissibility;
      }
    }
    if (!accepted) {
      res.iters = iter;
      switch (last_block) {
        case Blocker::Admissibility: res.status = NewtonStatus::AdmissibilityLost; break;
        case Blocker::Barrier: res.status = NewtonStatus::BarrierViolated; break;
        default: res.status = NewtonStatus::MaxIters; break;
      }
      return res;
    }
  }
  res.status = NewtonStatus::MaxIters;
  res.iters = opts.max_iters;
  return res;
}

ContinuationResult continuation_run(const BaseGrid& grid, HomotopyConfig cfg,
                                    const PsiSpec& spec, const WarpProfile& profile,
                                    const ContinuationOptions& opts) {
  ContinuationResult out;
  out.field = initial_solution(cfg, grid, spec, profile);

  HomotopyConfig step_cfg = cfg;
  step_cfg.t = 0.0;
  const ResidualResult res0 =
      residual(out.field, step_cfg, spec, profile, opts.newton.threads);
  out.trace.push_back({0.0, res0.norm_inf, res0.min_cone_margin, res0.min_tau,
                       res0.max_kappa, 0, opts.dt0});

  double t = 0.0;
  double dt = opts.dt0;
  while (t < 1.0) {
    const double tn = std::min(t + dt, 1.0);
    step_cfg.t = tn;
    const NewtonResult nres = newton_solve(out.field, step_cfg, spec, profile, opts.newton);
    if (nres.status == NewtonStatus::Converged) {
      out.field = nres.field;
      t = tn;
      out.trace.push_back({t, nres.last.norm_inf, nres.last.min_cone_margin,
                           nres.last.min_tau, nres.last.max_kappa, nres.iters, dt});
      if (nres.iters <= 5) dt = std::min(1.5 * dt, opts.dt_max);
    } else {
      out.last_failure = nres.status;
      dt *= 0.5;
      if (dt < opts.dt_min) {
        out.status = ContinuationStatus::StepBelowMinimum;
        out.t_final = t;
        return out;
      }
    }
  }
  out.status = ContinuationStatus::ReachedTarget;
  out.t_final = 1.0;
  return out;
}

}  // namespace wcurv
