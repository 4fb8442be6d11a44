#pragma once

#include <vector>

#include "wcurv/operator.hpp"

namespace wcurv {

enum class LinearSolverKind { Auto, DirectLU, BiCgStab };

LinearSolverKind linear_solver_from_string(const std::string& s);
std::string to_string(LinearSolverKind kind);

enum class NewtonStatus {
  Converged,
  AdmissibilityLost,
  BarrierViolated,
  MaxIters,
  SingularLinearSystem,
};

std::string to_string(NewtonStatus status);

struct NewtonOptions {
  double tol = 1e-10;  // max-norm of the residual
  int max_iters = 30;
  int max_halvings = 40;
  LinearSolverKind linear_solver = LinearSolverKind::Auto;
  int threads = 0;
};

struct NewtonResult {
  NewtonStatus status = NewtonStatus::MaxIters;
  RadialGraphField field;
  int iters = 0;
  ResidualResult last;  // residual data at the returned field
};

/// The unique t = 0 solution of the homotopy family: the constant slice at
/// the radius where phi = 1 (the annulus midpoint for the exponential phi).
/// Asserts that its t = 0 residual vanishes to 1e-12.
RadialGraphField initial_solution(const HomotopyConfig& cfg, const BaseGrid& grid,
                                  const PsiSpec& spec, const WarpProfile& profile);

/// Damped Newton corrector: solves J w = -F and halves the step until the
/// residual decreases while the cone and the open barrier r1 < r < r2 are
/// preserved.
NewtonResult newton_solve(const RadialGraphField& start, const HomotopyConfig& cfg,
                          const PsiSpec& spec, const WarpProfile& profile,
                          const NewtonOptions& opts = {});

struct TraceEntry {
  double t = 0.0;
  double residual_norm = 0.0;
  double min_cone_margin = 0.0;
  double min_tau = 0.0;
  double max_kappa = 0.0;
  int newton_iters = 0;
  double dt = 0.0;
};

enum class ContinuationStatus { ReachedTarget, StepBelowMinimum };

struct ContinuationOptions {
  double dt0 = 0.1;
  double dt_min = 1e-4;
  double dt_max = 0.25;
  NewtonOptions newton;
};

struct ContinuationResult {
  ContinuationStatus status = ContinuationStatus::StepBelowMinimum;
  RadialGraphField field;  // last accepted state
  double t_final = 0.0;
  std::vector<TraceEntry> trace;
  NewtonStatus last_failure = NewtonStatus::Converged;
};

/// Path-following in t from the exact t = 0 solution to t = 1 with an
/// order-0 predictor and adaptive dt: grow after fast Newton solves, halve
/// on failure, abort below dt_min.
ContinuationResult continuation_run(const BaseGrid& grid, HomotopyConfig cfg,
                                    const PsiSpec& spec, const WarpProfile& profile,
                                    const ContinuationOptions& opts = {});

}  // namespace wcurv
